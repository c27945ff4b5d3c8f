//! Invariants as properties over random inputs.

use std::f64::consts::PI;
use std::sync::Arc;

use casimir_pulse::bogoliubov::build_bogolubov;
use casimir_pulse::eigensolve::DEFAULT_TOL_ROOT;
use casimir_pulse::greens::kernel_closed;
use casimir_pulse::overlap::build_overlaps;
use casimir_pulse::quantum_inequality::{flanagan_bound, mamev_trunov_eta, TestFunction};
use casimir_pulse::special::{background_kernel, trigamma};
use casimir_pulse::stress::{build_out_tensor, PointValue, StressConstants};
use casimir_pulse::zeta_series::{constant_b_minus_c, inverse_power_sum, recurrence_residual};
use casimir_pulse::{solve_roots, ModelConfig};
use proptest::prelude::*;

fn coupling() -> impl Strategy<Value = f64> {
    // log-uniform over (1e-3, 1e3)
    (-3.0f64..3.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_sit_in_their_brackets(chi in coupling()) {
        let t = solve_roots(chi, 200, DEFAULT_TOL_ROOT).unwrap();
        for r in t.iter() {
            let lo = (r.j - 1) as f64 * PI;
            prop_assert!(r.z > lo && r.z < lo + 0.5 * PI);
            prop_assert!(r.a2 > 0.0 && r.a2 < 1.0);
            prop_assert!(r.residual < DEFAULT_TOL_ROOT);
            prop_assert!((r.z - lo - r.eps).abs() <= 4.0 * f64::EPSILON * r.z.max(1.0));
        }
        prop_assert!(t.roots().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn overlap_columns_obey_bessel(chi in coupling()) {
        let cfg = ModelConfig::from_chi(chi, 1.0, 1.0).unwrap();
        let eig = solve_roots(chi, 300, DEFAULT_TOL_ROOT).unwrap();
        let ov = build_overlaps(Arc::new(eig), cfg, 5).unwrap();
        for n in 0..=5 {
            let s = ov.inner_product(n, n, 300).unwrap();
            prop_assert!(s <= 1.0 + 1e-12, "n {} sum {}", n, s);
        }
    }

    #[test]
    fn alpha_and_beta_squares_differ_by_overlap_square(chi in coupling(), ell in 0.1f64..10.0) {
        let cfg = ModelConfig::from_chi(chi, 1.0, ell).unwrap();
        let eig = solve_roots(chi, 40, DEFAULT_TOL_ROOT).unwrap();
        let ov = build_overlaps(Arc::new(eig), cfg, 6).unwrap();
        let bog = build_bogolubov(&ov, &cfg).unwrap();
        for n in 0..=6 {
            for j in 1..=40 {
                let (a, b, y) = (bog.alpha(n, j).unwrap(), bog.beta(n, j).unwrap(), ov.y(j, n).unwrap());
                prop_assert!((a * a - b * b - y * y).abs() <= 1e-12 * (a * a).max(1e-300));
            }
        }
    }

    #[test]
    fn trigamma_recurrence_and_monotonicity(y in 0.01f64..200.0) {
        let a = trigamma(y).unwrap();
        let b = trigamma(y + 1.0).unwrap();
        prop_assert!(((a - 1.0 / (y * y)) - b).abs() <= 1e-12 * a);
        prop_assert!(b < a);
    }

    #[test]
    fn background_kernel_between_zero_and_cubic_bound(y in 0.01f64..1e4) {
        let f = background_kernel(y).unwrap();
        prop_assert!(f >= 0.0 && f <= 1.0 / (6.0 * y * y * y));
    }

    #[test]
    fn background_shift_bounded(chi in coupling()) {
        let s = constant_b_minus_c(&solve_roots(chi, 2000, DEFAULT_TOL_ROOT).unwrap());
        prop_assert!(s.value >= -s.tail_bound && s.value <= PI / 6.0 + s.tail_bound);
    }

    #[test]
    fn f_recurrence_holds_root_by_root(chi in coupling(), p in 2.0f64..6.0) {
        let eig = solve_roots(chi, 500, DEFAULT_TOL_ROOT).unwrap();
        let scale = chi * chi * inverse_power_sum(&eig, p).unwrap().value;
        prop_assert!(recurrence_residual(&eig, p).unwrap().abs() <= 1e-12 * scale);
    }

    #[test]
    fn kernel_antisymmetric_and_periodic(
        x in -2.0f64..2.0, t in -2.0f64..2.0, xp in -2.0f64..2.0, tp in -2.0f64..2.0, l in 0.5f64..3.0
    ) {
        let a = kernel_closed(x, t, xp, tp, l).unwrap().value;
        let b = kernel_closed(xp, tp, x, t, l).unwrap().value;
        prop_assert!((a + b).abs() < 1e-13);
        let c = kernel_closed(x + l, t, xp, tp, l).unwrap().value;
        prop_assert!((a - c).abs() < 1e-13);
    }

    #[test]
    fn out_tensor_is_traceless_and_isotropic_off_pulses(chi in coupling(), x in -0.5f64..0.5, t in 0.0f64..3.0) {
        let cfg = ModelConfig::from_chi(chi, 1.0, 1.0).unwrap();
        let k = StressConstants::compute(chi, 512).unwrap();
        let field = build_out_tensor(&cfg, &k).unwrap();
        match field.evaluate(x, t).unwrap() {
            PointValue::Regular(c) => {
                prop_assert_eq!(c.trace(), 0.0);
                prop_assert_eq!(c.tx, 0.0);
            }
            PointValue::OnPulse(d) => prop_assert!(!d.is_empty()),
        }
    }

    #[test]
    fn flanagan_bound_scales_inverse_square(s in 0.1f64..10.0, c in -5.0f64..5.0) {
        let base = flanagan_bound(&TestFunction::bump(0.0, 1.0, 1.0).unwrap());
        let scaled = flanagan_bound(&TestFunction::bump(c, s, 1.0 / s).unwrap());
        prop_assert!((scaled * s * s / base - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eta_positive(xi in 0.01f64..50.0, a in 0.05f64..5.0) {
        let e = mamev_trunov_eta(xi, a).unwrap();
        prop_assert!(e.value() > 0.0);
        prop_assert!(e.discrepancy() < 1e-8 * e.value().max(1e-3));
    }
}
