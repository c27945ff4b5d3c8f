//! Advanced-minus-retarded kernel of the massless wave equation on the
//! circle of circumference `L`, and the Cauchy problem it solves.
//!
//! With `dt = t - t'`, `dx = x - x'` and `k_n = 2 pi n / L`,
//!
//! ```text
//! E = -dt/L - (1/L) sum_{n >= 1} (1/k_n) [sin k_n (dt - dx) + sin k_n (dt + dx)]
//!   = -dt/L - 1/2 + ((dt - dx) mod L + (dt + dx) mod L) / (2L).
//! ```
//!
//! The linear term is the topological (zero-mode) part. At exact wrap points,
//! where an argument is a multiple of `L`, the closed form takes the midpoint
//! `L/2` of the jump, which is where the Fourier series converges.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::sum::NeumaierSum;

/// Fewest grid samples accepted by [`cauchy_evolve`].
pub const MIN_SAMPLES: usize = 16;

/// Kernel value at a pair of spacetime points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
}

fn check_circumference(l: f64) -> Result<()> {
    if !(l > 0.0) || !l.is_finite() {
        return domain(format!("circumference must be positive and finite, got {l}"));
    }
    Ok(())
}

/// Fourier series of the kernel truncated at `n_max`.
pub fn kernel_series(x: f64, t: f64, xp: f64, tp: f64, n_max: usize, l: f64) -> Result<KernelValue> {
    check_circumference(l)?;
    if n_max == 0 {
        return domain("n_max must be at least 1");
    }
    Ok(KernelValue {
        value: series(t - tp, x - xp, n_max, l, Part::Value),
    })
}

/// `d/dt E(x, t; x', t')` from the truncated series.
pub fn kernel_series_dt(x: f64, t: f64, xp: f64, tp: f64, n_max: usize, l: f64) -> Result<KernelValue> {
    check_circumference(l)?;
    if n_max == 0 {
        return domain("n_max must be at least 1");
    }
    Ok(KernelValue {
        value: series(t - tp, x - xp, n_max, l, Part::TimeDerivative),
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Part {
    Value,
    TimeDerivative,
}

fn series(dt: f64, dx: f64, n_max: usize, l: f64, part: Part) -> f64 {
    let mut acc = NeumaierSum::new();
    let (a, b) = (dt - dx, dt + dx);
    for n in 1..=n_max {
        let k = 2.0 * std::f64::consts::PI * n as f64 / l;
        acc.add(match part {
            Part::Value => ((k * a).sin() + (k * b).sin()) / k,
            Part::TimeDerivative => (k * a).cos() + (k * b).cos(),
        });
    }
    match part {
        Part::Value => -dt / l - acc.value() / l,
        Part::TimeDerivative => -1.0 / l - acc.value() / l,
    }
}

/// `s mod L` in `[0, L)`, with exact multiples of `L` mapped to `L/2`.
fn wrapped(s: f64, l: f64) -> f64 {
    let r = s.rem_euclid(l);
    if r == 0.0 || r >= l {
        0.5 * l
    } else {
        r
    }
}

/// Closed (modulo) form of the kernel.
pub fn kernel_closed(x: f64, t: f64, xp: f64, tp: f64, l: f64) -> Result<KernelValue> {
    check_circumference(l)?;
    let (dt, dx) = (t - tp, x - xp);
    Ok(KernelValue {
        value: -dt / l - 0.5 + (wrapped(dt - dx, l) + wrapped(dt + dx, l)) / (2.0 * l),
    })
}

/// Solution at `(x, t)` of the wave equation with `phi(., 0) = f` and
/// `d_t phi(., 0) = g`, both sampled at `x_i = i L / N`:
///
/// ```text
/// phi(x, t) = -sum_i (L/N) [d_t E(x, t; x_i, 0) f_i + E(x, t; x_i, 0) g_i]
/// ```
///
/// The kernel is the Fourier series truncated at `n_max < N/2`, for which the
/// periodic trapezoid rule is exact on the retained modes.
pub fn cauchy_evolve(f: &[f64], g: &[f64], x: f64, t: f64, l: f64, n_max: usize) -> Result<f64> {
    check_circumference(l)?;
    let n = f.len();
    if n < MIN_SAMPLES {
        return domain(format!("grid too coarse: {n} samples, need at least {MIN_SAMPLES}"));
    }
    if g.len() != n {
        return domain("f and g must share one grid");
    }
    if n_max == 0 || 2 * n_max >= n {
        return domain(format!("n_max must lie in [1, N/2) for N = {n}, got {n_max}"));
    }
    let h = l / n as f64;
    let mut acc = NeumaierSum::new();
    for (i, (&fi, &gi)) in f.iter().zip(g).enumerate() {
        let xi = i as f64 * h;
        let dx = x - xi;
        if fi != 0.0 {
            acc.add(series(t, dx, n_max, l, Part::TimeDerivative) * fi);
        }
        if gi != 0.0 {
            acc.add(series(t, dx, n_max, l, Part::Value) * gi);
        }
    }
    Ok(-h * acc.value())
}

/// Uniform periodic grid `x_i = i L / N` for sampling initial data.
pub fn grid(l: f64, samples: usize) -> Vec<f64> {
    (0..samples).map(|i| i as f64 * l / samples as f64).collect()
}
