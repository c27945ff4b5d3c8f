//! Spectral series over the roots `Z_j` and the constants built from them.
//!
//! ```text
//! F_p(chi)  = chi^2 sum_j A_j^2 / Z_j^p
//! C(chi)    = (2/pi) F_2(chi) = chi / pi
//! B(chi)    = (2 chi^2 / pi^2) sum_j (A_j^2 / Z_j) [psi'(1 + Z_j/pi) + pi^2 / (2 Z_j^2)]
//! B - C     = (2 chi^2 / pi^2) sum_j (A_j^2 / Z_j) f(Z_j / pi)
//! A(chi)    = sum_j (eps_j - tan eps_j) + (chi + 1) F_3(chi)
//! ```
//!
//! Every truncated series comes with an upper bound on its neglected tail,
//! derived from `A_j^2 <= 1` and `Z_j >= (j - 1) pi`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::eigensolve::{solve_roots, EigenTable, DEFAULT_TOL_ROOT};
use crate::error::{domain, Result};
use crate::special::{background_kernel_unchecked, trigamma_unchecked};
use crate::sum::{zeta_tail_bound, NeumaierSum};

/// Truncation used for the constants plotted against `chi`.
pub const FIG2_J_MAX: usize = 1 << 15;
/// Hyperbola parameter `b = 12 / pi^2` of the empirical fit to `B(chi)`.
pub const HYPERBOLA_B: f64 = 12.0 / (PI * PI);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ConstantName {
    A,
    B,
    C,
    BMinusC,
    /// `F_p` with the given `p`.
    F(f64),
    /// `sum_j Z_j^{-p}`.
    InvZp(f64),
}

/// A truncated spectral sum together with a bound on what was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralConstant {
    pub name: ConstantName,
    pub chi: f64,
    pub value: f64,
    /// Number of roots summed; 0 for a closed form.
    pub j_max: usize,
    /// Upper bound on `|exact - value|` from the neglected roots.
    pub tail_bound: f64,
}

impl SpectralConstant {
    /// True when `target` lies within the tail bound of `value`, padded by
    /// `slack` for rounding.
    pub fn brackets(&self, target: f64, slack: f64) -> bool {
        (self.value - target).abs() <= self.tail_bound + slack
    }
}

/// `sum_{j > j_max} ((j - 1) pi)^{-p}`, bounded.
fn root_tail(p: f64, j_max: usize) -> f64 {
    PI.powf(-p) * zeta_tail_bound(p, j_max)
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return domain(format!("series exponent must exceed 1, got {p}"));
    }
    Ok(())
}

#[inline]
fn inv_pow(z: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < 64.0 {
        z.powi(-(p as i32))
    } else {
        z.powf(-p)
    }
}

/// `F_p(chi) = chi^2 sum_j A_j^2 / Z_j^p`.
pub fn f_p(eigen: &EigenTable, p: f64) -> Result<SpectralConstant> {
    check_p(p)?;
    let chi = eigen.chi();
    let s: NeumaierSum = eigen.iter().map(|r| r.a2 * inv_pow(r.z, p)).collect();
    Ok(SpectralConstant {
        name: ConstantName::F(p),
        chi,
        value: chi * chi * s.value(),
        j_max: eigen.j_max(),
        tail_bound: chi * chi * root_tail(p, eigen.j_max()),
    })
}

/// `sum_j Z_j^{-p}`.
pub fn inverse_power_sum(eigen: &EigenTable, p: f64) -> Result<SpectralConstant> {
    check_p(p)?;
    let s: NeumaierSum = eigen.iter().map(|r| inv_pow(r.z, p)).collect();
    Ok(SpectralConstant {
        name: ConstantName::InvZp(p),
        chi: eigen.chi(),
        value: s.value(),
        j_max: eigen.j_max(),
        tail_bound: root_tail(p, eigen.j_max()),
    })
}

/// Closed forms of `F_2`, `F_4`, `F_6`.
pub fn f_p_closed(chi: f64, p: u32) -> Option<f64> {
    match p {
        2 => Some(chi / 2.0),
        4 => Some(0.5),
        6 => Some(0.5 * (1.0 / chi + 1.0 / 3.0)),
        _ => None,
    }
}

/// Closed forms of `sum_j Z_j^{-2}` and `sum_j Z_j^{-4}`.
pub fn inverse_power_sum_closed(chi: f64, p: u32) -> Option<f64> {
    match p {
        2 => Some(0.5 + 1.0 / chi),
        4 => Some((1.0 + 4.0 / chi + 6.0 / (chi * chi)) / 6.0),
        _ => None,
    }
}

/// Residual of `(chi^2 + chi) F_{p+2} + F_p = chi^2 sum_j Z_j^{-p}` at equal
/// truncation. The identity holds root by root, so this measures rounding.
pub fn recurrence_residual(eigen: &EigenTable, p: f64) -> Result<f64> {
    let chi = eigen.chi();
    let lhs = (chi * chi + chi) * f_p(eigen, p + 2.0)?.value + f_p(eigen, p)?.value;
    let rhs = chi * chi * inverse_power_sum(eigen, p)?.value;
    Ok(lhs - rhs)
}

/// `C = chi / pi`.
pub fn constant_c(chi: f64) -> Result<SpectralConstant> {
    if !(chi > 0.0) || !chi.is_finite() {
        return domain(format!("chi must be positive and finite, got {chi}"));
    }
    Ok(SpectralConstant {
        name: ConstantName::C,
        chi,
        value: chi / PI,
        j_max: 0,
        tail_bound: 0.0,
    })
}

/// `C` from its series `(2 chi^2 / pi) sum_j A_j^2 / Z_j^2`.
pub fn constant_c_series(eigen: &EigenTable) -> SpectralConstant {
    let f2 = f_p(eigen, 2.0).expect("p = 2 is admissible");
    SpectralConstant {
        name: ConstantName::C,
        chi: f2.chi,
        value: 2.0 / PI * f2.value,
        j_max: f2.j_max,
        tail_bound: 2.0 / PI * f2.tail_bound,
    }
}

/// `B(chi)` by its trigamma series.
///
/// With `psi'(1 + y) < 1/y`, each term is below
/// `2 chi^2 / (pi Z^2) + chi^2 / Z^3`, which gives the tail bound.
pub fn constant_b(eigen: &EigenTable) -> SpectralConstant {
    let chi = eigen.chi();
    let s: NeumaierSum = eigen
        .iter()
        .map(|r| {
            let y = r.z / PI;
            r.a2 / r.z * (trigamma_unchecked(1.0 + y) + 0.5 / (y * y))
        })
        .collect();
    let j_max = eigen.j_max();
    let c = chi * chi;
    SpectralConstant {
        name: ConstantName::B,
        chi,
        value: 2.0 * c / (PI * PI) * s.value(),
        j_max,
        tail_bound: 2.0 * c / PI * root_tail(2.0, j_max) + c * root_tail(3.0, j_max),
    }
}

/// Individual nonnegative terms `(2 chi^2/pi^2) (A_j^2/Z_j) f(Z_j/pi)` of `B - C`.
pub fn b_minus_c_terms(eigen: &EigenTable) -> Vec<f64> {
    let chi = eigen.chi();
    let pre = 2.0 * chi * chi / (PI * PI);
    eigen
        .iter()
        .map(|r| pre * r.a2 / r.z * background_kernel_unchecked(r.z / PI))
        .collect()
}

/// `B - C` through the kernel `f(y) = psi'(1+y) + 1/(2y^2) - 1/y`.
///
/// From `0 <= f(y) <= 1/(6 y^3)`, each term is below `pi chi^2 / (3 Z^4)`.
pub fn constant_b_minus_c(eigen: &EigenTable) -> SpectralConstant {
    let chi = eigen.chi();
    let s: NeumaierSum = b_minus_c_terms(eigen).into_iter().collect();
    SpectralConstant {
        name: ConstantName::BMinusC,
        chi,
        value: s.value(),
        j_max: eigen.j_max(),
        tail_bound: PI * chi * chi / 3.0 * root_tail(4.0, eigen.j_max()),
    }
}

/// `eps - tan eps`, with the Taylor series where the difference cancels.
fn eps_minus_tan(e: f64) -> f64 {
    if e < 0.02 {
        let e2 = e * e;
        -e * e2 * (1.0 / 3.0 + e2 * (2.0 / 15.0 + e2 * (17.0 / 315.0 + e2 * (62.0 / 2835.0))))
    } else {
        e - e.tan()
    }
}

/// The two pieces of `A`: `sum_j (eps_j - tan eps_j)` and `(chi + 1) F_3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AParts {
    pub offset_sum: f64,
    pub f3_term: f64,
}

pub fn constant_a_parts(eigen: &EigenTable) -> AParts {
    let offset_sum = eigen
        .offsets()
        .iter()
        .map(|&e| eps_minus_tan(e))
        .collect::<NeumaierSum>()
        .value();
    let f3 = f_p(eigen, 3.0).expect("p = 3 is admissible");
    AParts {
        offset_sum,
        f3_term: (eigen.chi() + 1.0) * f3.value,
    }
}

/// `A(chi) = sum_j (eps_j - tan eps_j) + (chi + 1) F_3(chi)`.
///
/// The tail bound uses `eps_j < chi / ((j-1) pi)` and
/// `0 <= tan e - e <= (tan 1 - 1) e^3` for `e <= 1`, so it is finite only once
/// `j_max pi >= chi`; otherwise it is reported as infinite.
pub fn constant_a(eigen: &EigenTable) -> SpectralConstant {
    let chi = eigen.chi();
    let j_max = eigen.j_max();
    let parts = constant_a_parts(eigen);
    let f3_tail = (chi + 1.0) * chi * chi * root_tail(3.0, j_max);
    let offset_tail = if j_max as f64 * PI >= chi {
        (1f64.tan() - 1.0) * chi.powi(3) * root_tail(3.0, j_max)
    } else {
        f64::INFINITY
    };
    SpectralConstant {
        name: ConstantName::A,
        chi,
        value: parts.offset_sum + parts.f3_term,
        j_max,
        tail_bound: offset_tail + f3_tail,
    }
}

/// One row of the constants-versus-coupling series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsRow {
    pub chi: f64,
    pub a: SpectralConstant,
    pub b: SpectralConstant,
    pub c: SpectralConstant,
    pub b_minus_c: SpectralConstant,
    /// `|A - B|`, reported and never asserted.
    pub a_minus_b_abs: f64,
}

pub fn constants_at(chi: f64, j_max: usize) -> Result<ConstantsRow> {
    let eigen = solve_roots(chi, j_max, DEFAULT_TOL_ROOT)?;
    let a = constant_a(&eigen);
    let b = constant_b(&eigen);
    Ok(ConstantsRow {
        chi,
        a,
        b,
        c: constant_c(chi)?,
        b_minus_c: constant_b_minus_c(&eigen),
        a_minus_b_abs: (a.value - b.value).abs(),
    })
}

/// Constants on a grid of couplings, one independent solve per point.
pub fn constants_on_grid(chis: &[f64], j_max: usize) -> Result<Vec<ConstantsRow>> {
    chis.par_iter().map(|&chi| constants_at(chi, j_max)).collect()
}

/// Hyperbola `sqrt(chi (chi + 2 b)) / pi`.
///
/// Fitted to `B`, it matches to a few parts in 1e3 at `b = 12 / pi^2`.
/// Diagnostic only.
pub fn hyperbola(chi: f64, b: f64) -> f64 {
    (chi * (chi + 2.0 * b)).sqrt() / PI
}

/// Least-squares `b` for `pi^2 B^2 = chi^2 + 2 b chi` over `(chi, B)` pairs.
pub fn fit_hyperbola_b(points: &[(f64, f64)]) -> f64 {
    let mut num = NeumaierSum::new();
    let mut den = NeumaierSum::new();
    for &(chi, b) in points {
        num.add(chi * (PI * PI * b * b - chi * chi));
        den.add(2.0 * chi * chi);
    }
    num.value() / den.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_kronrod_semi_infinite;

    fn roots(chi: f64, j_max: usize) -> EigenTable {
        solve_roots(chi, j_max, DEFAULT_TOL_ROOT).unwrap()
    }

    #[test]
    fn closed_forms_at_moderate_truncation() {
        for &chi in &[0.3, 2.0, 15.0] {
            let e = roots(chi, 2000);
            for p in [2u32, 4, 6] {
                let f = f_p(&e, p as f64).unwrap();
                assert!(f.brackets(f_p_closed(chi, p).unwrap(), 1e-13), "F{p} chi {chi}");
            }
            for p in [2u32, 4] {
                let s = inverse_power_sum(&e, p as f64).unwrap();
                assert!(s.brackets(inverse_power_sum_closed(chi, p).unwrap(), 1e-12));
            }
            assert!(recurrence_residual(&e, 2.0).unwrap().abs() < 1e-12);
            assert!(recurrence_residual(&e, 4.0).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn f2_at_chi_two_is_one() {
        let f = f_p(&roots(2.0, 10_000), 2.0).unwrap();
        assert!((f.value - 1.0).abs() <= f.tail_bound);
        assert!(f.tail_bound < 1e-4);
    }

    #[test]
    fn rejects_p_at_most_one() {
        let e = roots(1.0, 3);
        assert!(f_p(&e, 1.0).is_err());
        assert!(inverse_power_sum(&e, 0.5).is_err());
    }

    #[test]
    fn c_closed_and_series() {
        assert!((constant_c(1.0).unwrap().value - 1.0 / PI).abs() < 1e-16);
        assert_eq!(constant_c(PI).unwrap().value, 1.0);
        let s = constant_c_series(&roots(1.0, 10_000));
        assert!(s.brackets(1.0 / PI, 1e-14));
    }

    #[test]
    fn trigamma_matches_integral_oracle() {
        let y = 10.5;
        let q = gauss_kronrod_semi_infinite(|t| t * (-y * t).exp() / -(-t).exp_m1(), 0.0, 1e-15, 1e-14);
        assert!((trigamma_unchecked(y) / q.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn b_minus_c_terms_nonnegative_and_routes_agree() {
        for &chi in &[0.1, 1.0, 10.0] {
            let e = roots(chi, 5000);
            assert!(b_minus_c_terms(&e).iter().take(100).all(|&t| t >= 0.0));
            let d = constant_b_minus_c(&e);
            assert!(d.value >= -d.tail_bound && d.value <= PI / 6.0 + d.tail_bound);
            let b = constant_b(&e);
            let c = constant_c(chi).unwrap();
            let c_series = constant_c_series(&e);
            // B and the C series share the slowly converging part, so their
            // difference matches the f(y) route far inside the separate tails
            assert!((b.value - c_series.value - d.value).abs() < 1e-12 * b.value.max(1.0));
            assert!((b.value - c.value - d.value).abs() <= b.tail_bound + d.tail_bound);
        }
    }

    #[test]
    fn b_double_sum_oracle() {
        // psi'(1 + y) + 1/(2 y^2) is sum_{n >= 0} 1/(n + 1 + y)^2 + 1/(2 y^2),
        // i.e. pi^2 sum over n of 1/(pi n + Z)^2 with the n = 0 term halved.
        let chi = 1.0;
        let e = roots(chi, 1000);
        let mut outer = NeumaierSum::new();
        for r in e.iter() {
            let mut inner = NeumaierSum::new();
            inner.add(0.5 / (r.z * r.z));
            for n in 1..100_000 {
                let d = PI * n as f64 + r.z;
                inner.add(1.0 / (d * d));
            }
            outer.add(r.a2 / r.z * inner.value());
        }
        let double = 2.0 * chi * chi * outer.value();
        let b = constant_b(&e).value;
        assert!((double - b).abs() < 1e-4, "{double} {b}");
    }

    #[test]
    fn a_offset_sum_negative_and_series_switch_is_smooth() {
        let e = roots(3.0, 500);
        assert!(constant_a_parts(&e).offset_sum < 0.0);
        let below = eps_minus_tan(0.02 - 1e-12);
        let above = eps_minus_tan(0.02);
        assert!((below - above).abs() < 1e-15);
    }

    #[test]
    fn hyperbola_fit_recovers_parameter() {
        let pts: Vec<(f64, f64)> = [0.5, 1.0, 4.0, 9.0].iter().map(|&c| (c, hyperbola(c, 1.3))).collect();
        assert!((fit_hyperbola_b(&pts) - 1.3).abs() < 1e-12);
    }
}
