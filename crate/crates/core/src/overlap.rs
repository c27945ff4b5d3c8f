//! IN and OUT even mode functions and their overlaps.
//!
//! The IN even eigenfunctions on `[-L/2, L/2]` are
//!
//! ```text
//! u_j(x) = sqrt(2/L) A_j [cos(kappa_j |x|) + (chi/Z_j) sin(kappa_j |x|)],  kappa_j = 2 Z_j / L,
//! ```
//!
//! and the OUT even basis is the topological mode `1/sqrt(L)` together with
//! `sqrt(2/L) cos(k_n x)`, `k_n = 2 pi n / L`. Their overlaps are
//!
//! ```text
//! Y_{j,0} = xi L A_j / (sqrt(2) Z_j^2),   Y_{j,n} = xi L A_j / (Z_j^2 - (pi n)^2).
//! ```

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ModelConfig;
use crate::eigensolve::EigenTable;
use crate::error::{domain, Error, Result};
use crate::quad::simpson;
use crate::sum::NeumaierSum;

/// Default number of OUT modes used when evaluating mode functions.
pub const DEFAULT_N_MAX: usize = 2048;
/// Points closer than this fraction of `L` to a light-cone line are flagged.
pub const LIGHT_CONE_MARGIN: f64 = 1e-3;

/// Complex mode amplitude at a spacetime point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeValue {
    pub re: f64,
    pub im: f64,
}

impl ModeValue {
    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn distance(&self, other: &ModeValue) -> f64 {
        (self.re - other.re).hypot(self.im - other.im)
    }
}

/// A truncated OUT-series value, flagged when the point sits near the light
/// cone of the switch-off event, where the partial sums converge slowly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutModeValue {
    pub value: ModeValue,
    pub near_light_cone: bool,
}

/// Overlap coefficients `Y_{j,n}` for `j = 1..=j_max`, `n = 0..=n_max`.
#[derive(Debug, Clone)]
pub struct OverlapTable {
    eigen: Arc<EigenTable>,
    config: ModelConfig,
    n_max: usize,
    y0: Vec<f64>,
    // row-major, j-th row holds n = 1..=n_max
    y: Vec<f64>,
}

/// Builds the overlap table. The eigen table must belong to `config.chi()`.
pub fn build_overlaps(eigen: Arc<EigenTable>, config: ModelConfig, n_max: usize) -> Result<OverlapTable> {
    let chi = config.chi();
    if (eigen.chi() - chi).abs() > 1e-12 * chi {
        return domain(format!(
            "eigen table was solved for chi = {}, configuration has chi = {chi}",
            eigen.chi()
        ));
    }
    let j_max = eigen.j_max();
    let two_chi = 2.0 * chi;

    let y0 = eigen
        .iter()
        .map(|r| SQRT_2 * chi * r.a2.sqrt() / (r.z * r.z))
        .collect();

    let mut y = vec![0.0; j_max * n_max];
    if n_max > 0 {
        y.par_chunks_mut(n_max).enumerate().for_each(|(i, row)| {
            let eps = eigen.offsets()[i];
            let a = eigen.norm_squares()[i].sqrt();
            for (col, slot) in row.iter_mut().enumerate() {
                let n = col + 1;
                // Z - pi n and Z + pi n without cancellation
                let minus = (i as f64 - n as f64) * PI + eps;
                let plus = (i + n) as f64 * PI + eps;
                *slot = two_chi * a / (minus * plus);
            }
        });
    }

    Ok(OverlapTable {
        eigen,
        config,
        n_max,
        y0,
        y,
    })
}

impl OverlapTable {
    pub fn eigen(&self) -> &EigenTable {
        &self.eigen
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn j_max(&self) -> usize {
        self.eigen.j_max()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `Y_{j,n}` with `j` 1-based and `n = 0` the topological column.
    pub fn y(&self, j: usize, n: usize) -> Result<f64> {
        self.eigen.check_index(j)?;
        if n > self.n_max {
            return Err(Error::IndexOutOfRange {
                index: n,
                max: self.n_max,
            });
        }
        Ok(self.get(j - 1, n))
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, n: usize) -> f64 {
        if n == 0 {
            self.y0[i]
        } else {
            self.y[i * self.n_max + n - 1]
        }
    }

    /// Column `n` over `j = 1..=j_max`.
    pub fn column(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.j_max()).map(move |i| self.get(i, n))
    }

    /// `sum_j Y_{j,m} Y_{j,n}` over the first `j_max` rows.
    pub fn inner_product(&self, m: usize, n: usize, j_max: usize) -> Result<f64> {
        if m > self.n_max || n > self.n_max {
            return Err(Error::IndexOutOfRange {
                index: m.max(n),
                max: self.n_max,
            });
        }
        if j_max == 0 || j_max > self.j_max() {
            return Err(Error::IndexOutOfRange {
                index: j_max,
                max: self.j_max(),
            });
        }
        Ok((0..j_max)
            .map(|i| self.get(i, m) * self.get(i, n))
            .collect::<NeumaierSum>()
            .value())
    }

    /// `max_{m,n <= k} |sum_{j <= j_max} Y_{j,m} Y_{j,n} - delta_{mn}|`.
    pub fn orthogonality_residual(&self, k: usize, j_max: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for m in 0..=k {
            for n in m..=k {
                let delta = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((self.inner_product(m, n, j_max)? - delta).abs());
            }
        }
        Ok(worst)
    }

    fn kappa(&self, i: usize) -> f64 {
        2.0 * self.eigen.roots()[i] / self.config.circumference()
    }

    /// IN even eigenfunction `u_j(x)` for `|x| <= L/2`.
    pub fn u_even(&self, j: usize, x: f64) -> Result<f64> {
        self.eigen.check_index(j)?;
        self.check_x(x)?;
        Ok(self.u_even_unchecked(j - 1, x))
    }

    fn u_even_unchecked(&self, i: usize, x: f64) -> f64 {
        let l = self.config.circumference();
        let z = self.eigen.roots()[i];
        let a = self.eigen.norm_squares()[i].sqrt();
        let phase = self.kappa(i) * x.abs();
        (2.0 / l).sqrt() * a * (phase.cos() + self.config.chi() / z * phase.sin())
    }

    fn check_x(&self, x: f64) -> Result<()> {
        let half = 0.5 * self.config.circumference();
        if !(x.abs() <= half) {
            return domain(format!("x = {x} lies outside [-L/2, L/2] with L/2 = {half}"));
        }
        Ok(())
    }

    /// IN even mode `(2 kappa_j)^{-1/2} u_j(x) e^{-i kappa_j t}`.
    ///
    /// Valid for `t <= 0`, and also on the bow-tie region `|t| < |x|`, which
    /// the switch-off cannot influence.
    pub fn eval_in_even(&self, j: usize, x: f64, t: f64) -> Result<ModeValue> {
        let u = self.u_even(j, x)?;
        let kappa = self.kappa(j - 1);
        let amp = u / (2.0 * kappa).sqrt();
        Ok(ModeValue {
            re: amp * (kappa * t).cos(),
            im: -amp * (kappa * t).sin(),
        })
    }

    /// Time derivative of [`eval_in_even`](Self::eval_in_even).
    pub fn eval_in_even_dt(&self, j: usize, x: f64, t: f64) -> Result<ModeValue> {
        let v = self.eval_in_even(j, x, t)?;
        let kappa = self.kappa(j - 1);
        Ok(ModeValue {
            re: kappa * v.im,
            im: -kappa * v.re,
        })
    }

    /// IN even mode evolved freely after `t = 0`, summed over `n <= n_max`.
    ///
    /// Each OUT term is
    /// `(2 kappa)^{-1/2} sqrt(2/L) cos(k_n x) Y_{j,n} [cos k_n t - i (kappa/k_n) sin k_n t]`
    /// and the topological term is `Y_{j,0} (1 - i kappa t) / sqrt(2 kappa L)`.
    pub fn eval_out_even(&self, j: usize, x: f64, t: f64, n_max: usize) -> Result<OutModeValue> {
        self.eigen.check_index(j)?;
        self.check_x(x)?;
        if n_max > self.n_max {
            return Err(Error::IndexOutOfRange {
                index: n_max,
                max: self.n_max,
            });
        }
        let i = j - 1;
        let l = self.config.circumference();
        let kappa = self.kappa(i);
        let pre = 1.0 / (2.0 * kappa).sqrt();
        let y0 = self.get(i, 0);
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        re.add(y0 / l.sqrt());
        im.add(-y0 * kappa * t / l.sqrt());
        let c = (2.0 / l).sqrt();
        for n in 1..=n_max {
            let k = self.config.k(n);
            let w = c * (k * x).cos() * self.get(i, n);
            re.add(w * (k * t).cos());
            im.add(-w * kappa / k * (k * t).sin());
        }
        Ok(OutModeValue {
            value: ModeValue {
                re: pre * re.value(),
                im: pre * im.value(),
            },
            near_light_cone: near_light_cone(x, t, l),
        })
    }

    /// Pseudo-norm `i int (conj(phi) d_t phi - phi d_t conj(phi)) dx` of the
    /// IN even mode at time `t`, by composite Simpson on each half interval.
    pub fn qft_norm_in_even(&self, j: usize, t: f64, panels: usize) -> Result<f64> {
        self.eigen.check_index(j)?;
        let density = |x: f64| {
            let v = self.eval_in_even(j, x, t).expect("x within the circle");
            let d = self.eval_in_even_dt(j, x, t).expect("x within the circle");
            // i (conj(v) d - v conj(d)) = -2 Im(conj(v) d)
            2.0 * (v.im * d.re - v.re * d.im)
        };
        let half = 0.5 * self.config.circumference();
        Ok(simpson(density, -half, 0.0, panels) + simpson(density, 0.0, half, panels))
    }
}

/// Distance test against the lines `t +- x = m L` carrying the kink of the
/// IN data at `x = 0`.
pub fn near_light_cone(x: f64, t: f64, l: f64) -> bool {
    let margin = LIGHT_CONE_MARGIN * l;
    [t - x, t + x].iter().any(|&s| {
        let r = s.rem_euclid(l);
        r < margin || l - r < margin
    })
}

/// Odd OUT mode `(2 k_n)^{-1/2} sqrt(2/L) sin(k_n x) e^{-i k_n t}`; the
/// potential does not couple to it.
pub fn eval_odd(config: &ModelConfig, n: usize, x: f64, t: f64) -> Result<ModeValue> {
    if n == 0 {
        return domain("odd modes start at n = 1");
    }
    let l = config.circumference();
    let k = config.k(n);
    let amp = (2.0 / l).sqrt() * (k * x).sin() / (2.0 * k).sqrt();
    Ok(ModeValue {
        re: amp * (k * t).cos(),
        im: -amp * (k * t).sin(),
    })
}

/// Maximum of `|IN - OUT_{n_max}|` over points of the bow-tie region
/// `-|x| < t < |x|`, `|x| <= L/2`.
pub fn check_bowtie_equivalence(
    table: &OverlapTable,
    j: usize,
    sample_points: &[(f64, f64)],
    n_max: usize,
) -> Result<f64> {
    let half = 0.5 * table.config().circumference();
    let mut worst: f64 = 0.0;
    for &(x, t) in sample_points {
        if !(t.abs() < x.abs() && x.abs() <= half) {
            return domain(format!("({x}, {t}) is outside the bow-tie region"));
        }
        let inside = table.eval_in_even(j, x, t)?;
        let outside = table.eval_out_even(j, x, t, n_max)?.value;
        worst = worst.max(inside.distance(&outside));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::{solve_roots, DEFAULT_TOL_ROOT};

    fn table(xi: f64, j_max: usize, n_max: usize) -> OverlapTable {
        let cfg = ModelConfig::unit_circle(xi).unwrap();
        let eig = solve_roots(cfg.chi(), j_max, DEFAULT_TOL_ROOT).unwrap();
        build_overlaps(Arc::new(eig), cfg, n_max).unwrap()
    }

    #[test]
    fn topological_overlap_matches_quadrature() {
        let ov = table(2.0, 1, 2);
        let l: f64 = 1.0;
        let integrand = |x: f64| ov.u_even(1, x).unwrap() / l.sqrt();
        let q = simpson(integrand, -0.5, 0.0, 10_000) + simpson(integrand, 0.0, 0.5, 10_000);
        assert!((q - ov.y(1, 0).unwrap()).abs() < 1e-8, "{q}");
    }

    #[test]
    fn fourier_overlap_matches_quadrature() {
        let ov = table(3.0, 4, 3);
        for (j, n) in [(1, 1), (2, 1), (3, 2), (4, 3)] {
            let k = ov.config().k(n);
            let integrand = |x: f64| ov.u_even(j, x).unwrap() * SQRT_2 * (k * x).cos();
            let q = simpson(integrand, -0.5, 0.0, 10_000) + simpson(integrand, 0.0, 0.5, 10_000);
            assert!((q - ov.y(j, n).unwrap()).abs() < 1e-8, "j {j} n {n}");
        }
    }

    #[test]
    fn eigenfunction_is_normalized_and_pseudo_norm_is_one() {
        let ov = table(1.0, 3, 1);
        for j in 1..=3 {
            assert!((ov.qft_norm_in_even(j, 0.0, 10_000).unwrap() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn in_mode_at_origin_and_parity() {
        let ov = table(1.0, 2, 1);
        let v = ov.eval_in_even(2, 0.0, 0.0).unwrap();
        let z = ov.eigen().roots()[1];
        let expect = SQRT_2 * ov.eigen().amplitude(2).unwrap() / (4.0 * z).sqrt();
        assert!((v.re - expect).abs() < 1e-15 && v.im == 0.0);
        let a = ov.eval_in_even(2, 0.3, -0.7).unwrap();
        let b = ov.eval_in_even(2, -0.3, -0.7).unwrap();
        assert_eq!(a, b);
        let o = eval_odd(ov.config(), 3, 0.2, 0.1).unwrap();
        let p = eval_odd(ov.config(), 3, -0.2, 0.1).unwrap();
        assert_eq!(o.re, -p.re);
    }

    #[test]
    fn bowtie_rejects_outside_points() {
        let ov = table(1.0, 1, 8);
        assert!(check_bowtie_equivalence(&ov, 1, &[(0.125, 0.25)], 8).is_err());
        assert!(check_bowtie_equivalence(&ov, 1, &[(0.25, 0.0)], 8).is_ok());
    }

    #[test]
    fn small_denominator_is_exact() {
        // Z_{n+1} is just above pi n for small chi: the denominator is eps (2 pi n + eps)
        let ov = table(1e-6, 6, 6);
        let r = ov.eigen().root(6).unwrap();
        let a = r.a2.sqrt();
        let expect = 2.0 * ov.config().chi() * a / (r.eps * (10.0 * PI + r.eps));
        assert!((ov.y(6, 5).unwrap() / expect - 1.0).abs() < 1e-14);
    }

    #[test]
    fn light_cone_flag() {
        assert!(near_light_cone(0.25, 0.2500001, 1.0));
        assert!(near_light_cone(0.25, 0.7499999, 1.0));
        assert!(!near_light_cone(0.25, 0.1, 1.0));
    }
}
