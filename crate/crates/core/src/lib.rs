//! Particle creation and stress-energy of a massless scalar field on the
//! cylinder `R x S^1` when a delta potential `2 xi delta(x)` is switched off
//! at `t = 0`.
//!
//! The pipeline runs bottom-up:
//!
//! - [`eigensolve`]: roots `Z_j` of `Z = chi cot Z`, with `chi = xi L / 2`.
//! - [`overlap`]: IN and OUT mode functions and the overlaps `Y_{j,n}`.
//! - [`bogoliubov`]: Bogolubov coefficients and created quanta per mode.
//! - [`zeta_series`]: the series `F_p` and the constants `A`, `B`, `C`.
//! - [`stress`]: the renormalized stress tensor, geodesic contractions and
//!   energy conditions.
//! - [`greens`]: the advanced-minus-retarded kernel and Cauchy evolution.
//! - [`quantum_inequality`]: the quantum weak energy inequality, Flanagan's
//!   bound and the `eta(xi, a)` integral.
//!
//! ```
//! use casimir_pulse::eigensolve::{solve_roots, DEFAULT_TOL_ROOT};
//!
//! let table = solve_roots(1.0, 3, DEFAULT_TOL_ROOT)?;
//! assert!((table.roots()[0] - 0.860_333_589).abs() < 1e-9);
//! # Ok::<(), casimir_pulse::Error>(())
//! ```

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bogoliubov;
pub mod cli;
pub mod config;
pub mod eigensolve;
pub mod error;
pub mod greens;
pub mod overlap;
pub mod quad;
pub mod quantum_inequality;
pub mod special;
pub mod stress;
pub mod sum;
pub mod zeta_series;

pub use config::ModelConfig;
pub use eigensolve::{solve_roots, EigenTable};
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/roots.md")]
    mod roots {}
    #[doc = include_str!("../../../book/src/overlaps.md")]
    mod overlaps {}
    #[doc = include_str!("../../../book/src/particle_creation.md")]
    mod particle_creation {}
    #[doc = include_str!("../../../book/src/spectral_constants.md")]
    mod spectral_constants {}
    #[doc = include_str!("../../../book/src/stress_tensor.md")]
    mod stress_tensor {}
    #[doc = include_str!("../../../book/src/greens_kernel.md")]
    mod greens_kernel {}
    #[doc = include_str!("../../../book/src/quantum_inequalities.md")]
    mod quantum_inequalities {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
