//! Bogolubov coefficients between the IN modes evolved past `t = 0` and the
//! standard OUT modes, and the number of quanta created in each OUT mode.
//!
//! All coefficients are real. With `kappa_j = 2 Z_j / L`, `k_n = 2 pi n / L`:
//!
//! ```text
//! alpha_{0j} =  (1 + kappa_j ell) Y_{j,0} / (2 sqrt(kappa_j ell))
//! beta_{0j}  = -(1 - kappa_j ell) Y_{j,0} / (2 sqrt(kappa_j ell))
//! alpha_{nj} =  (1 + kappa_j/k_n) sqrt(k_n/kappa_j) Y_{j,n} / 2
//! beta_{nj}  = -(1 - kappa_j/k_n) sqrt(k_n/kappa_j) Y_{j,n} / 2
//! ```

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ModelConfig;
use crate::eigensolve::{solve_roots, DEFAULT_TOL_ROOT};
use crate::error::{domain, Error, Result};
use crate::overlap::{build_overlaps, OverlapTable};
use crate::sum::NeumaierSum;

/// Number of IN modes summed for the occupation-number table.
pub const TABLE1_J_MAX: usize = 500;
pub const TABLE1_N_MAX: usize = 10;
pub const TABLE1_XI: [f64; 4] = [1.0, 5.0, 10.0, 100.0];

/// `alpha_{nj}` and `beta_{nj}` for `n = 0..=n_max`, `j = 1..=j_max`.
#[derive(Debug, Clone, Serialize)]
pub struct BogolubovTable {
    ell: f64,
    j_max: usize,
    n_max: usize,
    // row-major by n
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

pub fn build_bogolubov(overlaps: &OverlapTable, config: &ModelConfig) -> Result<BogolubovTable> {
    check_same_model(overlaps, config)?;
    let j_max = overlaps.j_max();
    let n_max = overlaps.n_max();
    let l = config.circumference();
    let ell = config.ell();
    let roots = overlaps.eigen().roots();

    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut a = Vec::with_capacity(j_max);
            let mut b = Vec::with_capacity(j_max);
            for (i, &z) in roots.iter().enumerate() {
                let kappa = 2.0 * z / l;
                let y = overlaps.get(i, n);
                if n == 0 {
                    let s = kappa * ell;
                    let d = 2.0 * s.sqrt();
                    a.push((1.0 + s) * y / d);
                    b.push(-(1.0 - s) * y / d);
                } else {
                    let k = config.k(n);
                    let r = kappa / k;
                    let c = 0.5 * (k / kappa).sqrt() * y;
                    a.push((1.0 + r) * c);
                    b.push(-(1.0 - r) * c);
                }
            }
            (a, b)
        })
        .collect();

    let mut alpha = Vec::with_capacity((n_max + 1) * j_max);
    let mut beta = Vec::with_capacity((n_max + 1) * j_max);
    for (a, b) in rows {
        alpha.extend(a);
        beta.extend(b);
    }
    Ok(BogolubovTable {
        ell,
        j_max,
        n_max,
        alpha,
        beta,
    })
}

fn check_same_model(overlaps: &OverlapTable, config: &ModelConfig) -> Result<()> {
    let own = overlaps.config();
    if own.xi() != config.xi() || own.circumference() != config.circumference() {
        return domain("overlap table was built for a different xi or L");
    }
    Ok(())
}

impl BogolubovTable {
    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn check(&self, n: usize, j: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::IndexOutOfRange {
                index: n,
                max: self.n_max,
            });
        }
        if j == 0 || j > self.j_max {
            return Err(Error::IndexOutOfRange {
                index: j,
                max: self.j_max,
            });
        }
        Ok(())
    }

    /// `alpha_{nj}`, `j` 1-based.
    pub fn alpha(&self, n: usize, j: usize) -> Result<f64> {
        self.check(n, j)?;
        Ok(self.alpha[n * self.j_max + j - 1])
    }

    pub fn beta(&self, n: usize, j: usize) -> Result<f64> {
        self.check(n, j)?;
        Ok(self.beta[n * self.j_max + j - 1])
    }

    pub fn alpha_row(&self, n: usize) -> &[f64] {
        &self.alpha[n * self.j_max..(n + 1) * self.j_max]
    }

    pub fn beta_row(&self, n: usize) -> &[f64] {
        &self.beta[n * self.j_max..(n + 1) * self.j_max]
    }

    fn check_rows(&self, m: usize, n: usize, j_max: usize) -> Result<()> {
        self.check(m.max(n), 1)?;
        if j_max == 0 || j_max > self.j_max {
            return Err(Error::IndexOutOfRange {
                index: j_max,
                max: self.j_max,
            });
        }
        Ok(())
    }

    /// `sum_{j <= j_max} (alpha_{mj} alpha_{nj} - beta_{mj} beta_{nj}) - delta_{mn}`.
    pub fn first_identity_defect(&self, m: usize, n: usize, j_max: usize) -> Result<f64> {
        self.check_rows(m, n, j_max)?;
        let (am, an) = (self.alpha_row(m), self.alpha_row(n));
        let (bm, bn) = (self.beta_row(m), self.beta_row(n));
        let s: NeumaierSum = (0..j_max).map(|i| am[i] * an[i] - bm[i] * bn[i]).collect();
        Ok(s.value() - if m == n { 1.0 } else { 0.0 })
    }

    /// `sum_{j <= j_max} (alpha_{mj} beta_{nj} - beta_{mj} alpha_{nj})`.
    pub fn second_identity_defect(&self, m: usize, n: usize, j_max: usize) -> Result<f64> {
        self.check_rows(m, n, j_max)?;
        let (am, an) = (self.alpha_row(m), self.alpha_row(n));
        let (bm, bn) = (self.beta_row(m), self.beta_row(n));
        let s: NeumaierSum = (0..j_max).map(|i| am[i] * bn[i] - bm[i] * an[i]).collect();
        Ok(s.value())
    }

    /// Largest `|first_identity_defect|` over `m, n <= k`.
    pub fn identity_residual(&self, k: usize, j_max: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for m in 0..=k {
            for n in m..=k {
                worst = worst.max(self.first_identity_defect(m, n, j_max)?.abs());
            }
        }
        Ok(worst)
    }
}

/// Created quanta per OUT mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CreationSpectrum {
    /// Topological-mode occupation `N_0(ell)`.
    pub n0: f64,
    /// `N_n` for `n = 1..=n_max`.
    pub n: Vec<f64>,
    /// `N_0 + sum_n N_n` over the computed modes.
    pub total: f64,
    /// The same occupations computed as `sum_j beta_{nj}^2`, index 0 first.
    pub beta_squared: Vec<f64>,
    /// `sum_j Y_{j,n}^2`, index 0 first.
    pub overlap_norms: Vec<f64>,
    pub j_max: usize,
}

impl CreationSpectrum {
    /// `N_n` with `n = 0` the topological mode.
    pub fn get(&self, n: usize) -> Option<f64> {
        if n == 0 {
            Some(self.n0)
        } else {
            self.n.get(n - 1).copied()
        }
    }

    pub fn n_max(&self) -> usize {
        self.n.len()
    }

    /// Difference of the two routes minus its exact truncation value
    /// `-(1 - sum_j Y_{j,n}^2)/2`. Zero up to rounding at any `j_max`.
    pub fn route_defect(&self, n: usize) -> Option<f64> {
        let direct = self.get(n)?;
        let b = self.beta_squared[n];
        let y = self.overlap_norms[n];
        Some(direct - b + 0.5 * (1.0 - y))
    }
}

/// Occupation numbers from the direct formulas
///
/// ```text
/// N_0 = -1/2 + (1/4) sum_j (1/(kappa_j ell) + kappa_j ell) Y_{j,0}^2
/// N_n = -1/2 + (1/4) sum_j (k_n/kappa_j + kappa_j/k_n) Y_{j,n}^2
/// ```
///
/// and, alongside, from `sum_j beta_{nj}^2`. The routes differ by
/// `(1 - sum_j Y_{j,n}^2)/2`, which vanishes only as `j_max` grows; the
/// direct formula is the one reported in `n0` and `n`.
pub fn creation_spectrum(
    bog: &BogolubovTable,
    overlaps: &OverlapTable,
    config: &ModelConfig,
) -> Result<CreationSpectrum> {
    check_same_model(overlaps, config)?;
    if bog.j_max() != overlaps.j_max() || bog.n_max() != overlaps.n_max() || bog.ell() != config.ell() {
        return domain("Bogolubov table does not match the overlap table or ell");
    }
    let l = config.circumference();
    let ell = config.ell();
    let roots = overlaps.eigen().roots();

    let rows: Vec<(f64, f64, f64)> = (0..=bog.n_max())
        .into_par_iter()
        .map(|n| {
            let mut direct = NeumaierSum::new();
            let mut norm = NeumaierSum::new();
            for (i, &z) in roots.iter().enumerate() {
                let kappa = 2.0 * z / l;
                let y2 = overlaps.get(i, n).powi(2);
                let w = if n == 0 {
                    let s = kappa * ell;
                    1.0 / s + s
                } else {
                    let r = kappa / config.k(n);
                    1.0 / r + r
                };
                direct.add(0.25 * w * y2);
                norm.add(y2);
            }
            let beta2: NeumaierSum = bog.beta_row(n).iter().map(|b| b * b).collect();
            (direct.value() - 0.5, beta2.value(), norm.value())
        })
        .collect();

    let n0 = rows[0].0;
    let n: Vec<f64> = rows[1..].iter().map(|r| r.0).collect();
    let total = std::iter::once(n0).chain(n.iter().copied()).collect::<NeumaierSum>().value();
    Ok(CreationSpectrum {
        n0,
        n,
        total,
        beta_squared: rows.iter().map(|r| r.1).collect(),
        overlap_norms: rows.iter().map(|r| r.2).collect(),
        j_max: bog.j_max(),
    })
}

/// Solves, builds and sums in one call.
pub fn spectrum_for(config: &ModelConfig, j_max: usize, n_max: usize) -> Result<CreationSpectrum> {
    let eigen = Arc::new(solve_roots(config.chi(), j_max, DEFAULT_TOL_ROOT)?);
    let ov = build_overlaps(eigen, *config, n_max)?;
    let bog = build_bogolubov(&ov, config)?;
    creation_spectrum(&bog, &ov, config)
}

/// The occupation table: one spectrum per `xi` on the unit circle, `ell = L`.
pub fn table1(xis: &[f64], circumference: f64, ell: f64, j_max: usize, n_max: usize) -> Result<Vec<CreationSpectrum>> {
    xis.par_iter()
        .map(|&xi| spectrum_for(&ModelConfig::new(xi, circumference, ell)?, j_max, n_max))
        .collect()
}

/// Tail treatment for [`total_created`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailEstimate {
    /// Partial sum only.
    None,
    /// Least-squares fit `N_n ~ c n^{-p}` over the last decade of computed
    /// `n`, continued to infinity by the integral bound.
    PowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TotalCreated {
    /// `N_0 + sum_{n <= n_max} N_n`.
    pub partial: f64,
    /// Estimated `sum_{n > n_max} N_n`, kept separate from `partial`.
    pub tail: Option<f64>,
    /// Fitted exponent `p`.
    pub exponent: Option<f64>,
}

pub fn total_created(spectrum: &CreationSpectrum, method: TailEstimate) -> Result<TotalCreated> {
    let partial = spectrum.total;
    match method {
        TailEstimate::None => Ok(TotalCreated {
            partial,
            tail: None,
            exponent: None,
        }),
        TailEstimate::PowerLaw => {
            let n_max = spectrum.n_max();
            if n_max < 10 {
                return domain("power-law tail needs at least 10 computed modes");
            }
            let first = (n_max / 10).max(1);
            let pts: Vec<(f64, f64)> = (first..=n_max)
                .map(|n| (n as f64, spectrum.n[n - 1]))
                .collect();
            if pts.iter().any(|&(_, v)| !(v > 0.0)) {
                return domain("power-law tail needs positive occupations");
            }
            let (c, p) = fit_power_law(&pts);
            if !(p > 1.0) {
                return domain(format!("fitted exponent {p} does not give a summable tail"));
            }
            let nm = n_max as f64;
            Ok(TotalCreated {
                partial,
                tail: Some(c * nm.powf(1.0 - p) / (p - 1.0)),
                exponent: Some(p),
            })
        }
    }
}

/// Least squares on `ln y = ln c - p ln n`; returns `(c, p)`.
fn fit_power_law(pts: &[(f64, f64)]) -> (f64, f64) {
    let m = pts.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(n, v) in pts {
        let (x, y) = (n.ln(), v.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m;
    (intercept.exp(), -slope)
}

/// Richardson extrapolation of each occupation in `j_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RichardsonSpectrum {
    /// Occupations at `j_max`, `2 j_max`, `4 j_max`, index 0 the topological mode.
    pub levels: [Vec<f64>; 3],
    /// Estimated convergence order in `1/j_max` per mode.
    pub order: Vec<f64>,
    /// Extrapolated occupations.
    pub extrapolated: Vec<f64>,
}

/// Convergence mode: occupations at three dyadic truncations and their
/// extrapolation assuming an error `~ c j_max^{-q}`.
pub fn richardson_spectrum(config: &ModelConfig, j_max: usize, n_max: usize) -> Result<RichardsonSpectrum> {
    let levels: Vec<Vec<f64>> = [j_max, 2 * j_max, 4 * j_max]
        .par_iter()
        .map(|&j| {
            let s = spectrum_for(config, j, n_max)?;
            Ok(std::iter::once(s.n0).chain(s.n).collect())
        })
        .collect::<Result<_>>()?;
    let mut order = Vec::with_capacity(n_max + 1);
    let mut extrapolated = Vec::with_capacity(n_max + 1);
    for ((&a, &b), &c) in levels[0].iter().zip(&levels[1]).zip(&levels[2]) {
        let d1 = b - a;
        let d2 = c - b;
        if d2 == 0.0 || d1 == 0.0 || d1.signum() != d2.signum() {
            order.push(f64::NAN);
            extrapolated.push(c);
            continue;
        }
        let q = (d1 / d2).log2();
        order.push(q);
        extrapolated.push(c + d2 / (2f64.powf(q) - 1.0));
    }
    let mut it = levels.into_iter();
    Ok(RichardsonSpectrum {
        levels: [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()],
        order,
        extrapolated,
    })
}
