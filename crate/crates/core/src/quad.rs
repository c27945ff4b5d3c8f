//! Numerical quadrature.
//!
//! Two families with independent error behaviour: adaptive Gauss–Kronrod
//! (7/15 point) and double-exponential rules (tanh-sinh on finite intervals,
//! exp-sinh on half lines). Quantities that need a quadrature cross-check are
//! evaluated with one rule from each family.

use crate::sum::NeumaierSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive rule: the estimate and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Single 15-point Kronrod panel with its embedded 7-point Gauss error estimate.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> QuadResult {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    QuadResult {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// error falls below `max(abs_tol, rel_tol * |value|)` or `max_intervals` is
/// reached.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult {
    let mut pieces = vec![(a, b, gk15(&f, a, b))];
    loop {
        let value: f64 = pieces.iter().map(|p| p.2.value).sum();
        let error: f64 = pieces.iter().map(|p| p.2.error).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) || pieces.len() >= max_intervals {
            let value = pieces
                .iter()
                .map(|p| p.2.value)
                .collect::<NeumaierSum>()
                .value();
            return QuadResult { value, error };
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        pieces.push((lo, mid, gk15(&f, lo, mid)));
        pieces.push((mid, hi, gk15(&f, mid, hi)));
    }
}

/// Adaptive Gauss–Kronrod over `[a, inf)` using `x = a + s / (1 - s)`.
pub fn gauss_kronrod_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult {
    let g = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - s;
        let x = a + s / d;
        let v = f(x) / (d * d);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    gauss_kronrod(g, 0.0, 1.0, abs_tol, rel_tol, 4000)
}

/// Tanh-sinh quadrature over `[a, b]`, refined by step halving until two
/// successive levels agree to `tol` (relative to the estimate).
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> QuadResult {
    let d = 0.5 * (b - a);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let node = |t: f64| -> f64 {
        let s = half_pi * t.sinh();
        let ch = s.cosh();
        let w = d * half_pi * t.cosh() / (ch * ch);
        // distance from the nearer endpoint, computed without cancellation
        let edge = d * (-s.abs()).exp() / ch;
        let x = if s >= 0.0 { b - edge } else { a + edge };
        if w == 0.0 || !w.is_finite() || !(x > a) || !(x < b) {
            return 0.0;
        }
        let v = w * f(x);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    double_exponential(node, 4.0, tol)
}

/// Exp-sinh quadrature over `[a, inf)` for integrands decaying at infinity.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> QuadResult {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let node = |t: f64| -> f64 {
        let e = (half_pi * t.sinh()).exp();
        let w = half_pi * t.cosh() * e;
        let x = a + e;
        if !x.is_finite() || !w.is_finite() || x == a {
            return 0.0;
        }
        let v = w * f(x);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    double_exponential(node, 4.5, tol)
}

fn double_exponential<N: Fn(f64) -> f64>(node: N, t_max: f64, tol: f64) -> QuadResult {
    let mut h = 0.5;
    let mut acc = NeumaierSum::new();
    acc.add(node(0.0));
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        acc.add(node(t));
        acc.add(node(-t));
        k += 1;
    }
    let mut estimate = h * acc.value();
    let mut error = f64::INFINITY;
    for _level in 0..12 {
        h *= 0.5;
        // new points are the odd multiples of the halved step
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            acc.add(node(t));
            acc.add(node(-t));
            k += 2;
        }
        let refined = h * acc.value();
        error = (refined - estimate).abs();
        estimate = refined;
        if error <= tol * estimate.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    QuadResult {
        value: estimate,
        error,
    }
}

/// Composite Simpson rule with `panels` subintervals (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2) + panels % 2;
    let h = (b - a) / n as f64;
    let mut acc = NeumaierSum::new();
    acc.add(f(a));
    acc.add(f(b));
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(a + i as f64 * h));
    }
    acc.value() * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_kronrod_polynomial_is_exact() {
        let r = gauss_kronrod(|x| x.powi(9) - 3.0 * x * x, -1.0, 2.0, 1e-14, 0.0, 10);
        let exact = (2f64.powi(10) - 1.0) / 10.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn rules_agree_on_gaussian_half_line() {
        let exact = PI.sqrt() / 2.0;
        let a = gauss_kronrod_semi_infinite(|x| (-x * x).exp(), 0.0, 1e-14, 1e-14);
        let b = exp_sinh(|x| (-x * x).exp(), 0.0, 1e-14);
        assert!((a.value - exact).abs() < 1e-12, "{}", a.value - exact);
        assert!((b.value - exact).abs() < 1e-12, "{}", b.value - exact);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let r = tanh_sinh(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn simpson_integrates_cubic_exactly() {
        let v = simpson(|x| x * x * x + x, 0.0, 2.0, 2);
        assert!((v - 6.0).abs() < 1e-14);
    }
}
