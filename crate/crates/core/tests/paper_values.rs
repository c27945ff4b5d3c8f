//! Published numbers: the occupation table, closed forms and the energy sign.

use std::f64::consts::PI;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use casimir_pulse::bogoliubov::table1;
use casimir_pulse::eigensolve::DEFAULT_TOL_ROOT;
use casimir_pulse::special::trigamma;
use casimir_pulse::stress::{total_energy, StressConstants};
use casimir_pulse::zeta_series::{constant_c, f_p, f_p_closed, inverse_power_sum_closed};
use casimir_pulse::{solve_roots, ModelConfig};

const XI: [f64; 4] = [1.0, 5.0, 10.0, 100.0];

const PRINTED: [[f64; 4]; 11] = [
    [0.023987, 0.255469, 0.416834, 1.082297],
    [0.003875, 0.024742, 0.047086, 0.198755],
    [0.000665, 0.005465, 0.011781, 0.070152],
    [0.000231, 0.002154, 0.004975, 0.036841],
    [0.000108, 0.001091, 0.002639, 0.022904],
    [0.000059, 0.000637, 0.001594, 0.015659],
    [0.000036, 0.000408, 0.001048, 0.011386],
    [0.000024, 0.000277, 0.000731, 0.008647],
    [0.000017, 0.000200, 0.000533, 0.006782],
    [0.000012, 0.000149, 0.000402, 0.005455],
    [0.000009, 0.000114, 0.000312, 0.004477],
];

fn worst_cell(j_max: usize, columns: &[usize]) -> f64 {
    let spectra = table1(&XI, 1.0, 1.0, j_max, 10).unwrap();
    let mut worst: f64 = 0.0;
    for (n, row) in PRINTED.iter().enumerate() {
        for &c in columns {
            worst = worst.max((spectra[c].get(n).unwrap() - row[c]).abs());
        }
    }
    worst
}

#[test]
fn occupation_table_weak_and_moderate_coupling_at_500_terms() {
    assert!(worst_cell(500, &[0, 1, 2]) < 1e-5);
}

/// Diagnostic for the strongest-coupling column: 400 terms reproduce every
/// printed cell, 500 do not.
#[test]
fn occupation_table_reproduced_with_400_terms() {
    assert!(worst_cell(400, &[0, 1, 2, 3]) < 1e-5);
    assert!(worst_cell(500, &[3]) > 1e-5);
}

#[test]
fn occupation_spot_cells() {
    let s = table1(&XI, 1.0, 1.0, 500, 10).unwrap();
    assert_abs_diff_eq!(s[0].n0, 0.023987, epsilon = 1e-6);
    assert_abs_diff_eq!(s[2].get(2).unwrap(), 0.011781, epsilon = 1e-6);
    // the strongest coupling's last row is within the printed rounding
    assert_abs_diff_eq!(s[3].get(10).unwrap(), 0.004477, epsilon = 1e-5);
}

#[test]
fn trigamma_at_one_is_zeta_two() {
    assert_relative_eq!(trigamma(1.0).unwrap(), PI * PI / 6.0, max_relative = 1e-14);
    assert_relative_eq!(trigamma(2.0).unwrap(), PI * PI / 6.0 - 1.0, max_relative = 1e-13);
}

#[test]
#[allow(clippy::approx_constant)] // printed value of 1/pi
fn closed_forms_at_named_couplings() {
    assert_eq!(f_p_closed(2.0, 2), Some(1.0));
    assert_eq!(f_p_closed(7.0, 4), Some(0.5));
    assert_relative_eq!(f_p_closed(3.0, 6).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
    assert_eq!(inverse_power_sum_closed(1.0, 2), Some(1.5));
    assert_relative_eq!(inverse_power_sum_closed(2.0, 4).unwrap(), 0.75, max_relative = 1e-15);
    assert_relative_eq!(constant_c(1.0).unwrap().value, 0.3183099, max_relative = 1e-6);
    assert_relative_eq!(constant_c(PI).unwrap().value, 1.0, max_relative = 1e-15);
    let s = f_p(&solve_roots(2.0, 10_000, DEFAULT_TOL_ROOT).unwrap(), 2.0).unwrap();
    assert!(s.brackets(1.0, 1e-12));
}

#[test]
fn total_energy_sign_either_side_of_the_bracket() {
    for (chi, negative) in [(0.5, true), (0.82, true), (0.83, false), (1.0, false)] {
        let cfg = ModelConfig::from_chi(chi, 1.0, 1.0).unwrap();
        let e = total_energy(&cfg, &StressConstants::compute(chi, 1 << 15).unwrap()).unwrap();
        assert_eq!(e < 0.0, negative, "chi {chi}: {e}");
    }
}
