//! Positive roots of `Z = chi cot Z`.
//!
//! The j-th root lies in `((j-1) pi, (j-1/2) pi)`. Roots are found through
//! their offsets `eps_j = Z_j - (j-1) pi`, which solve
//!
//! ```text
//! h(eps) = ((j-1) pi + eps) sin(eps) - chi cos(eps) = 0,   0 < eps < pi/2,
//! ```
//!
//! a smooth, strictly increasing function with `h(0) = -chi < 0` and
//! `h(pi/2) > 0`. Working with `eps` keeps full relative precision even when
//! `Z_j` is large and sits just above a pole of the cotangent.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};

pub const DEFAULT_TOL_ROOT: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;

/// Bracket width at which bisection hands over to safeguarded Newton.
const NEWTON_HANDOVER: f64 = 1e-3;
/// Below this many roots the solve stays on the calling thread.
const PARALLEL_THRESHOLD: usize = 4096;

/// Roots, offsets and normalization squares for `j = 1..=j_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenTable {
    chi: f64,
    tol_root: f64,
    z: Vec<f64>,
    eps: Vec<f64>,
    a2: Vec<f64>,
    residual: Vec<f64>,
}

/// One row of an [`EigenTable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub j: usize,
    pub z: f64,
    pub eps: f64,
    pub a2: f64,
    pub residual: f64,
}

impl EigenTable {
    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn j_max(&self) -> usize {
        self.z.len()
    }

    pub fn tol_root(&self) -> f64 {
        self.tol_root
    }

    /// Roots `Z_1 .. Z_jmax`, ascending.
    pub fn roots(&self) -> &[f64] {
        &self.z
    }

    pub fn offsets(&self) -> &[f64] {
        &self.eps
    }

    /// Normalization squares `A_j^2 = Z_j^2 / (Z_j^2 + chi^2 + chi)`.
    pub fn norm_squares(&self) -> &[f64] {
        &self.a2
    }

    /// Relative residuals `|Z - chi cot Z| / max(1, Z)`.
    pub fn residuals(&self) -> &[f64] {
        &self.residual
    }

    /// Row `j` (1-based).
    pub fn root(&self, j: usize) -> Result<Root> {
        self.check_index(j)?;
        let i = j - 1;
        Ok(Root {
            j,
            z: self.z[i],
            eps: self.eps[i],
            a2: self.a2[i],
            residual: self.residual[i],
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Root> + '_ {
        (0..self.j_max()).map(move |i| Root {
            j: i + 1,
            z: self.z[i],
            eps: self.eps[i],
            a2: self.a2[i],
            residual: self.residual[i],
        })
    }

    /// Mode amplitude `A_j = +sqrt(A_j^2)`.
    ///
    /// The sign is fixed positive for every `j`; the textbook form
    /// `cos(Z_j) [...]^{-1/2}` alternates in sign, which only changes the
    /// unobservable phase of each even mode.
    pub fn amplitude(&self, j: usize) -> Result<f64> {
        self.check_index(j)?;
        Ok(self.a2[j - 1].sqrt())
    }

    /// Table restricted to the first `j_max` roots.
    pub fn truncated(&self, j_max: usize) -> Result<EigenTable> {
        if j_max == 0 || j_max > self.j_max() {
            return Err(Error::IndexOutOfRange {
                index: j_max,
                max: self.j_max(),
            });
        }
        Ok(EigenTable {
            chi: self.chi,
            tol_root: self.tol_root,
            z: self.z[..j_max].to_vec(),
            eps: self.eps[..j_max].to_vec(),
            a2: self.a2[..j_max].to_vec(),
            residual: self.residual[..j_max].to_vec(),
        })
    }

    pub(crate) fn check_index(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.j_max() {
            Err(Error::IndexOutOfRange {
                index: j,
                max: self.j_max(),
            })
        } else {
            Ok(())
        }
    }
}

/// Solves for the first `j_max` positive roots of `Z = chi cot Z`.
pub fn solve_roots(chi: f64, j_max: usize, tol_root: f64) -> Result<EigenTable> {
    if !(chi > 0.0) || !chi.is_finite() {
        return domain(format!("chi must be positive and finite, got {chi}"));
    }
    if j_max == 0 {
        return domain("j_max must be at least 1");
    }
    if !(tol_root > 0.0 && tol_root <= 1e-6) {
        return domain(format!("tol_root must lie in (0, 1e-6], got {tol_root}"));
    }

    let solve = |j: usize| solve_one(chi, j, tol_root);
    let rows: Vec<Root> = if j_max >= PARALLEL_THRESHOLD {
        (1..=j_max).into_par_iter().map(solve).collect::<Result<_>>()?
    } else {
        (1..=j_max).map(solve).collect::<Result<_>>()?
    };

    let mut table = EigenTable {
        chi,
        tol_root,
        z: Vec::with_capacity(j_max),
        eps: Vec::with_capacity(j_max),
        a2: Vec::with_capacity(j_max),
        residual: Vec::with_capacity(j_max),
    };
    for r in rows {
        table.z.push(r.z);
        table.eps.push(r.eps);
        table.a2.push(r.a2);
        table.residual.push(r.residual);
    }
    Ok(table)
}

fn solve_one(chi: f64, j: usize, tol_root: f64) -> Result<Root> {
    let base = (j - 1) as f64 * PI;
    let h = |e: f64| (base + e) * e.sin() - chi * e.cos();
    let dh = |e: f64| (1.0 + chi) * e.sin() + (base + e) * e.cos();

    let (mut lo, mut hi) = (0.0_f64, FRAC_PI_2);
    let mut iterations = 0;
    while hi - lo > NEWTON_HANDOVER {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let mut e = 0.5 * (lo + hi);
    loop {
        if iterations >= MAX_ITERATIONS {
            return Err(Error::Convergence {
                j,
                lo: base + lo,
                hi: base + hi,
                iterations,
            });
        }
        iterations += 1;
        let value = h(e);
        if value == 0.0 {
            break;
        }
        if value < 0.0 {
            lo = e;
        } else {
            hi = e;
        }
        let mut next = e - value / dh(e);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - e).abs();
        e = next;
        if step <= 4.0 * f64::EPSILON * e {
            break;
        }
    }

    let z = base + e;
    let residual = relative_residual(chi, base, e);
    if !(residual < tol_root) {
        return Err(Error::Convergence {
            j,
            lo: base + lo,
            hi: base + hi,
            iterations,
        });
    }
    Ok(Root {
        j,
        z,
        eps: e,
        a2: z * z / (z * z + chi * chi + chi),
        residual,
    })
}

/// `|Z - chi cot Z| / max(1, Z)` evaluated through the offset, using
/// `cot Z = cot eps`.
fn relative_residual(chi: f64, base: f64, eps: f64) -> f64 {
    let z = base + eps;
    (z - chi / eps.tan()).abs() / z.max(1.0)
}

/// Two-term Taylor approximation of `Z_j`, never below the true root.
///
/// `chi = 0` is accepted and returns `(j-1) pi`.
pub fn approx_root(chi: f64, j: usize) -> Result<f64> {
    Ok((j.max(1) - 1) as f64 * PI + approx_offset(chi, j)?)
}

/// Offset part `approx_root(chi, j) - (j-1) pi`, computed without cancellation.
pub fn approx_offset(chi: f64, j: usize) -> Result<f64> {
    if !(chi >= 0.0) || !chi.is_finite() {
        return domain(format!("chi must be nonnegative and finite, got {chi}"));
    }
    if j == 0 {
        return domain("root index starts at 1");
    }
    let base = (j - 1) as f64 * PI;
    let disc = (base * base + 4.0 * chi * (1.0 + chi / 3.0)).sqrt();
    let denom = base + disc;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * chi / denom)
}

/// `dZ_j / dchi = A_j^2 / Z_j`.
pub fn root_derivative(table: &EigenTable, j: usize) -> Result<f64> {
    let r = table.root(j)?;
    Ok(r.a2 / r.z)
}
