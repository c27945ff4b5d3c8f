//! Quantum weak energy inequality on the OUT region, Flanagan's bound and
//! the `eta(xi, a)` integral.
//!
//! For a timelike observer with speed `v` and a real test function `g`, the
//! absolute bound reads
//!
//! ```text
//! int rho g^2 >= -(1+v^2)/(1-v^2) (pi / 6L^2) int g^2
//!                - (1/2L) sum_n k_n [ s_+^2 I(k_n s_+) + s_-^2 I(k_n s_-) ] / pi,
//! s_+- = sqrt((1 +- v)/(1 -+ v)),   I(w) = int_w^inf |g^(a)|^2 da,
//! ```
//!
//! with `g^(a) = int g(tau) e^{-i a tau} dtau`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use crate::config::ModelConfig;
use crate::error::{domain, Result};
use crate::quad::{exp_sinh, gauss_kronrod_semi_infinite, gk15, tanh_sinh};
use crate::stress::{energy_density_along, Direction, GeodesicKind, GeodesicSpec, StressTensorField};
use crate::sum::NeumaierSum;

/// Largest mode index summed when no explicit cutoff is given.
pub const N_CUT_MAX: usize = 10_000;
/// Automatic cutoff: stop once a mode adds less than this fraction of the sum.
pub const N_CUT_REL_TOL: f64 = 1e-12;

/// Trapezoid nodes on `[0, 1]` for the bump transform. Aliasing enters at
/// `kappa ~ 2 pi N`, where the transform is below 1e-40.
const TRANSFORM_NODES: usize = 1024;
/// Beyond this dimensionless frequency the squared transform is below 1e-40
/// of its peak and is dropped.
const KAPPA_MAX: f64 = 1200.0;
const SEGMENT: f64 = PI / 4.0;
/// Samples of `g` and `g'` kept on the test function.
const SAMPLE_COUNT: usize = 513;

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// `B(kappa) = int_{-1}^{1} exp(-1/(1-u^2)) cos(kappa u) du` and the tail
/// integrals of `B^2`.
#[derive(Debug, Clone)]
struct BumpTransform {
    profile: Vec<f64>,
    /// `tails[i] = int_{i SEGMENT}^{KAPPA_MAX} B^2`.
    tails: Vec<f64>,
    /// `int_{-1}^{1} exp(-2/(1-u^2)) du`.
    square_integral: f64,
}

impl BumpTransform {
    fn shared() -> &'static Self {
        static SHARED: OnceLock<BumpTransform> = OnceLock::new();
        SHARED.get_or_init(Self::new)
    }

    fn new() -> Self {
        let h = 1.0 / TRANSFORM_NODES as f64;
        let profile: Vec<f64> = (0..=TRANSFORM_NODES).map(|i| bump(i as f64 * h)).collect();
        let mut t = BumpTransform {
            profile,
            tails: Vec::new(),
            square_integral: 0.0,
        };
        let sq: NeumaierSum = t
            .profile
            .iter()
            .enumerate()
            .map(|(i, b)| if i == 0 { b * b } else { 2.0 * b * b })
            .collect();
        t.square_integral = sq.value() * h;

        let segments = (KAPPA_MAX / SEGMENT).ceil() as usize;
        let mut pieces = Vec::with_capacity(segments);
        for i in 0..segments {
            let a = i as f64 * SEGMENT;
            pieces.push(gk15(&|k| t.b(k).powi(2), a, a + SEGMENT).value);
        }
        let mut tails = vec![0.0; segments + 1];
        let mut acc = NeumaierSum::new();
        for i in (0..segments).rev() {
            acc.add(pieces[i]);
            tails[i] = acc.value();
        }
        t.tails = tails;
        t
    }

    /// Half-interval trapezoid, doubled by symmetry. The cosines come from a
    /// rotation recurrence reseeded every `RESEED` nodes.
    fn b(&self, kappa: f64) -> f64 {
        const RESEED: usize = 32;
        let h = 1.0 / TRANSFORM_NODES as f64;
        let (s1, c1) = (kappa * h).sin_cos();
        let mut acc = NeumaierSum::new();
        acc.add(self.profile[0]);
        let mut block = NeumaierSum::new();
        let (mut c, mut s) = (1.0, 0.0);
        for (i, &p) in self.profile.iter().enumerate().skip(1) {
            if i % RESEED == 0 {
                (s, c) = (kappa * i as f64 * h).sin_cos();
            } else {
                (c, s) = (c * c1 - s * s1, s * c1 + c * s1);
            }
            block.add(2.0 * p * c);
        }
        acc.add(block.value());
        acc.value() * h
    }

    /// `int_{kappa0}^inf B(kappa)^2 dkappa`.
    fn tail(&self, kappa0: f64) -> f64 {
        let kappa0 = kappa0.max(0.0);
        if kappa0 >= KAPPA_MAX {
            return 0.0;
        }
        let i = (kappa0 / SEGMENT).floor() as usize;
        let top = ((i + 1) as f64 * SEGMENT).min(KAPPA_MAX);
        let partial = gk15(&|k| self.b(k).powi(2), kappa0, top).value;
        partial + self.tails.get(i + 1).copied().unwrap_or(0.0)
    }
}

/// Smooth bump `g(tau) = amplitude exp(-1/(1-u^2))`, `u = (tau - center)/width`,
/// supported on `[center - width, center + width]`.
#[derive(Debug, Clone)]
pub struct TestFunction {
    center: f64,
    width: f64,
    amplitude: f64,
    /// Proper times of the samples.
    pub grid: Vec<f64>,
    pub samples: Vec<f64>,
    pub derivative_samples: Vec<f64>,
    /// `(alpha, |g^(alpha)|)` with spacing `pi / (8 width)` up to the cutoff.
    pub fourier: Vec<(f64, f64)>,
    transform: &'static BumpTransform,
}

impl TestFunction {
    pub fn bump(center: f64, width: f64, amplitude: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return domain(format!("width must be positive and finite, got {width}"));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) || !center.is_finite() {
            return domain("amplitude must be positive and center finite");
        }
        let transform = BumpTransform::shared();
        let mut t = TestFunction {
            center,
            width,
            amplitude,
            grid: Vec::new(),
            samples: Vec::new(),
            derivative_samples: Vec::new(),
            fourier: Vec::new(),
            transform,
        };
        let step = 2.0 * width / (SAMPLE_COUNT - 1) as f64;
        for i in 0..SAMPLE_COUNT {
            let tau = center - width + i as f64 * step;
            t.grid.push(tau);
            t.samples.push(t.value(tau));
            t.derivative_samples.push(t.derivative(tau));
        }
        let d_alpha = PI / (8.0 * width);
        let count = (KAPPA_MAX / width / d_alpha).ceil() as usize;
        t.fourier = (0..=count)
            .map(|i| {
                let a = i as f64 * d_alpha;
                (a, t.fourier_abs(a))
            })
            .collect();
        Ok(t)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Support `[center - width, center + width]`.
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    pub fn value(&self, tau: f64) -> f64 {
        self.amplitude * bump((tau - self.center) / self.width)
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        let u = (tau - self.center) / self.width;
        if u.abs() >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - u * u;
        self.value(tau) * (-2.0 * u / (d * d)) / self.width
    }

    /// `int g^2 dtau`.
    pub fn square_integral(&self) -> f64 {
        self.amplitude * self.amplitude * self.width * self.transform.square_integral
    }

    /// `|g^(alpha)| = amplitude width |B(alpha width)|`.
    pub fn fourier_abs(&self, alpha: f64) -> f64 {
        self.amplitude * self.width * self.transform.b(alpha * self.width).abs()
    }

    /// `int_{omega0}^inf |g^(alpha)|^2 dalpha`.
    pub fn fourier_tail(&self, omega0: f64) -> f64 {
        self.amplitude * self.amplitude * self.width * self.transform.tail(omega0 * self.width)
    }
}

/// Right-hand side pieces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhsTerms {
    /// `-(1+v^2)/(1-v^2) (pi/6L^2) int g^2`.
    pub casimir_term: f64,
    /// Mode sum with `s_+ = sqrt((1+v)/(1-v))`, sign included.
    pub mode_sum_plus: f64,
    /// Mode sum with `s_- = sqrt((1-v)/(1+v))`, sign included.
    pub mode_sum_minus: f64,
    /// Number of modes summed.
    pub n_cut: usize,
    /// Last mode's contribution relative to the accumulated mode sum.
    pub last_relative_increment: f64,
}

impl RhsTerms {
    pub fn total(&self) -> f64 {
        self.casimir_term + self.mode_sum_plus + self.mode_sum_minus
    }
}

/// Left-hand side pieces for the IN vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LhsTerms {
    pub casimir_term: f64,
    pub b_minus_c_term: f64,
    /// Contribution of the left-moving pulse family.
    pub pulse_left: f64,
    /// Contribution of the right-moving pulse family.
    pub pulse_right: f64,
    pub crossings: usize,
}

impl LhsTerms {
    pub fn total(&self) -> f64 {
        self.casimir_term + self.b_minus_c_term + self.pulse_left + self.pulse_right
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QweiReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`; nonnegative when the inequality holds.
    pub margin: f64,
    pub lhs_terms: LhsTerms,
    pub rhs_terms: RhsTerms,
    pub warnings: Vec<String>,
}

fn lorentz(v: f64) -> Result<f64> {
    if !(v.abs() < 1.0) {
        return domain(format!("timelike observers need |v| < 1, got {v}"));
    }
    Ok((1.0 + v * v) / (1.0 - v * v))
}

/// Absolute right-hand side. `n_cut = None` sums until a mode adds less
/// than `N_CUT_REL_TOL` of the total or `N_CUT_MAX` modes are used.
pub fn qwei_rhs(g: &TestFunction, v: f64, config: &ModelConfig, n_cut: Option<usize>) -> Result<RhsTerms> {
    let boost = lorentz(v)?;
    let l = config.circumference();
    let casimir_term = -boost * PI / (6.0 * l * l) * g.square_integral();
    let sp2 = (1.0 + v) / (1.0 - v);
    let sm2 = (1.0 - v) / (1.0 + v);
    let (sp, sm) = (sp2.sqrt(), sm2.sqrt());
    let pre = -1.0 / (2.0 * l * PI);

    let limit = n_cut.unwrap_or(N_CUT_MAX);
    let mut plus = NeumaierSum::new();
    let mut minus = NeumaierSum::new();
    let mut last_rel = 0.0;
    let mut used = 0;
    for n in 1..=limit {
        let k = config.k(n);
        let tp = pre * k * sp2 * g.fourier_tail(k * sp);
        let tm = pre * k * sm2 * g.fourier_tail(k * sm);
        plus.add(tp);
        minus.add(tm);
        used = n;
        let acc = (plus.value() + minus.value()).abs();
        let inc = (tp + tm).abs();
        last_rel = if acc > 0.0 { inc / acc } else { 0.0 };
        if n_cut.is_none() && (inc < N_CUT_REL_TOL * acc || inc == 0.0) {
            break;
        }
    }
    Ok(RhsTerms {
        casimir_term,
        mode_sum_plus: plus.value(),
        mode_sum_minus: minus.value(),
        n_cut: used,
        last_relative_increment: last_rel,
    })
}

/// Requires the test function to sit strictly after the observer crosses `t = 0`.
fn check_support(g: &TestFunction, geo: &GeodesicSpec) -> Result<()> {
    if geo.kind != GeodesicKind::Timelike {
        return domain("the QWEI is stated for timelike observers");
    }
    let entry = geo.tau_entry();
    if !(g.support().0 > entry) {
        return domain(format!(
            "test function support starts at {} but the observer enters the OUT region at {entry}",
            g.support().0
        ));
    }
    Ok(())
}

/// `int rho g^2` along the worldline for the IN vacuum on the OUT region.
pub fn qwei_lhs_in_vacuum(
    g: &TestFunction,
    geo: &GeodesicSpec,
    field: &StressTensorField,
    b_minus_c: f64,
) -> Result<LhsTerms> {
    check_support(g, geo)?;
    let boost = lorentz(geo.v)?;
    let l = field.circumference;
    let g2 = g.square_integral();
    let (lo, hi) = g.support();
    let c = energy_density_along(geo, field, lo, hi)?;
    let mut left = NeumaierSum::new();
    let mut right = NeumaierSum::new();
    for x in &c.crossings {
        let term = x.weight * x.measure * g.value(x.tau).powi(2);
        match x.direction {
            Direction::Left => left.add(term),
            Direction::Right => right.add(term),
        }
    }
    Ok(LhsTerms {
        casimir_term: -boost * PI / (6.0 * l * l) * g2,
        b_minus_c_term: boost * b_minus_c / (l * l) * g2,
        pulse_left: left.value(),
        pulse_right: right.value(),
        crossings: c.crossings.len(),
    })
}

/// Both sides of the absolute inequality and their margin.
pub fn qwei_verdict(
    g: &TestFunction,
    geo: &GeodesicSpec,
    field: &StressTensorField,
    config: &ModelConfig,
    b_minus_c: f64,
    n_cut: Option<usize>,
) -> Result<QweiReport> {
    let lhs_terms = qwei_lhs_in_vacuum(g, geo, field, b_minus_c)?;
    let rhs_terms = qwei_rhs(g, geo.v, config, n_cut)?;
    let mut warnings = Vec::new();
    if rhs_terms.last_relative_increment >= N_CUT_REL_TOL {
        warnings.push(format!(
            "mode sum stopped at n = {} with relative increment {:.3e}",
            rhs_terms.n_cut, rhs_terms.last_relative_increment
        ));
    }
    let (lhs, rhs) = (lhs_terms.total(), rhs_terms.total());
    Ok(QweiReport {
        lhs,
        rhs,
        margin: lhs - rhs,
        lhs_terms,
        rhs_terms,
        warnings,
    })
}

/// Difference form, normal ordered against the OUT vacuum with zero-mode
/// scale `ell`: both sides shift by `(1+v^2)/(1-v^2) (1/(4 ell L) - pi/(6L^2)) int g^2`,
/// so the margin equals the absolute one.
pub fn qwei_difference_verdict(
    g: &TestFunction,
    geo: &GeodesicSpec,
    field: &StressTensorField,
    config: &ModelConfig,
    b_minus_c: f64,
    n_cut: Option<usize>,
) -> Result<QweiReport> {
    let mut r = qwei_verdict(g, geo, field, config, b_minus_c, n_cut)?;
    let l = config.circumference();
    let shift = lorentz(geo.v)? * (1.0 / (4.0 * config.ell() * l) - PI / (6.0 * l * l)) * g.square_integral();
    r.lhs -= shift;
    r.rhs -= shift;
    r.margin = r.lhs - r.rhs;
    Ok(r)
}

/// Flanagan's bound `-(1/24 pi) int f'^2 / f` for the bump.
///
/// In `u`, the integrand is `(amplitude/width) 4 u^2 exp(-1/(1-u^2)) / (1-u^2)^4`,
/// which vanishes to all orders at `u = +-1`.
pub fn flanagan_bound(f: &TestFunction) -> f64 {
    let q = tanh_sinh(
        |u| {
            let d = 1.0 - u * u;
            4.0 * u * u * bump(u) / (d * d * d * d)
        },
        -1.0,
        1.0,
        1e-14,
    );
    -f.amplitude() / f.width() * q.value / (24.0 * PI)
}

/// Flanagan's bound for a general positive function on `(a, b)` with
/// derivative `df`. Interior zeros, detected on a 4096-point scan, are a
/// domain error.
pub fn flanagan_bound_fn<F, D>(f: F, df: D, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if !(b > a) {
        return domain("empty support interval");
    }
    // Values that underflow to zero next to the endpoints are fine; a zero
    // with positive values on both sides is not.
    let scan = 4096;
    let xs: Vec<f64> = (1..scan).map(|i| a + (b - a) * i as f64 / scan as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    if let Some(i) = vals.iter().position(|v| !(*v >= 0.0)) {
        return domain(format!("function is negative or undefined at {}", xs[i]));
    }
    if let (Some(first), Some(last)) = (
        vals.iter().position(|&v| v > 0.0),
        vals.iter().rposition(|&v| v > 0.0),
    ) {
        if let Some(i) = (first..=last).find(|&i| vals[i] == 0.0) {
            return domain(format!("function vanishes at interior point {}", xs[i]));
        }
    } else {
        return domain("function vanishes identically");
    }
    let q = tanh_sinh(
        |x| {
            let v = f(x);
            if v > 0.0 {
                df(x).powi(2) / v
            } else {
                0.0
            }
        },
        a,
        b,
        1e-12,
    );
    Ok(-q.value / (24.0 * PI))
}

/// `eta(xi, a)` by two independent rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaValue {
    /// Adaptive Gauss-Kronrod on the mapped half line.
    pub gauss_kronrod: f64,
    /// Exp-sinh double-exponential rule.
    pub exp_sinh: f64,
}

impl EtaValue {
    pub fn value(&self) -> f64 {
        self.gauss_kronrod
    }

    pub fn discrepancy(&self) -> f64 {
        (self.gauss_kronrod - self.exp_sinh).abs()
    }
}

/// ```text
/// eta = (xi / 2 pi a) [ int_0^inf y e^{-y} / (y e^y + c sinh y) dy
///                     - int_0^inf y e^{-y} / (y e^y + c cosh y) dy ],   c = xi a / 2.
/// ```
pub fn mamev_trunov_eta(xi: f64, a: f64) -> Result<EtaValue> {
    if !(xi > 0.0 && xi.is_finite() && a > 0.0 && a.is_finite()) {
        return domain(format!("xi and a must be positive and finite, got ({xi}, {a})"));
    }
    let c = 0.5 * xi * a;
    // divided through by e^y: sinh y e^{-y} = -expm1(-2y)/2, cosh y e^{-y} = (1 + e^{-2y})/2
    let sinh_part = move |y: f64| {
        if y == 0.0 {
            return 1.0 / (1.0 + c);
        }
        let e = (-2.0 * y).exp();
        y * e / (y - c * 0.5 * (-2.0 * y).exp_m1())
    };
    let cosh_part = move |y: f64| {
        let e = (-2.0 * y).exp();
        y * e / (y + c * 0.5 * (1.0 + e))
    };
    let pre = xi / (2.0 * PI * a);
    let gk = gauss_kronrod_semi_infinite(sinh_part, 0.0, 1e-15, 1e-13).value
        - gauss_kronrod_semi_infinite(cosh_part, 0.0, 1e-15, 1e-13).value;
    let es = exp_sinh(sinh_part, 0.0, 1e-13).value - exp_sinh(cosh_part, 0.0, 1e-13).value;
    Ok(EtaValue {
        gauss_kronrod: pre * gk,
        exp_sinh: pre * es,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_kronrod;

    #[test]
    fn transform_matches_direct_quadrature() {
        let t = BumpTransform::new();
        for &k in &[0.0, 1.0, 7.5, 40.0] {
            let q = tanh_sinh(|u| bump(u) * (k * u).cos(), -1.0, 1.0, 1e-14).value;
            assert!((t.b(k) - q).abs() < 1e-13, "kappa {k}: {} vs {q}", t.b(k));
        }
    }

    #[test]
    fn parseval_fixes_the_tail_at_zero() {
        // int_0^inf |g^|^2 = pi int g^2
        let g = TestFunction::bump(2.0, 0.3, 1.7).unwrap();
        let lhs = g.fourier_tail(0.0);
        assert!((lhs / (PI * g.square_integral()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tail_lookup_matches_adaptive_integral() {
        let t = BumpTransform::new();
        for &k0 in &[0.3, 5.0, 22.2] {
            let q = gauss_kronrod(|k| t.b(k).powi(2), k0, KAPPA_MAX, 1e-22, 1e-13, 2000).value;
            assert!((t.tail(k0) / q - 1.0).abs() < 1e-9, "{k0}");
        }
    }

    #[test]
    fn rhs_mode_terms_negative_and_shrink_for_wider_g() {
        let cfg = ModelConfig::new(1.0, 1.0, 1.0).unwrap();
        let narrow = TestFunction::bump(1.0, 0.05, 1.0).unwrap();
        let wide = TestFunction::bump(1.0, 0.4, 1.0).unwrap();
        let a = qwei_rhs(&narrow, 0.0, &cfg, None).unwrap();
        let b = qwei_rhs(&wide, 0.0, &cfg, None).unwrap();
        assert!(a.mode_sum_plus < 0.0 && a.mode_sum_minus < 0.0);
        let ra = (a.mode_sum_plus + a.mode_sum_minus) / narrow.square_integral();
        let rb = (b.mode_sum_plus + b.mode_sum_minus) / wide.square_integral();
        assert!(rb.abs() < ra.abs());
        let none = qwei_rhs(&narrow, 0.0, &cfg, Some(0)).unwrap();
        assert_eq!(none.total(), none.casimir_term);
    }

    #[test]
    fn flanagan_scaling_and_translation() {
        let f1 = TestFunction::bump(0.0, 1.0, 1.0).unwrap();
        let f2 = TestFunction::bump(0.0, 2.0, 0.5).unwrap();
        let f3 = TestFunction::bump(5.0, 1.0, 1.0).unwrap();
        assert!((flanagan_bound(&f2) / flanagan_bound(&f1) - 0.25).abs() < 1e-12);
        assert_eq!(flanagan_bound(&f3), flanagan_bound(&f1));
        let generic = flanagan_bound_fn(|t| f1.value(t), |t| f1.derivative(t), -1.0, 1.0).unwrap();
        assert!((generic / flanagan_bound(&f1) - 1.0).abs() < 1e-8);
        assert!(flanagan_bound_fn(|t: f64| t * t, |t| 2.0 * t, -1.0, 1.0).is_err());
    }

    #[test]
    fn eta_rules_agree_and_positive() {
        for &(xi, a) in &[(1.0, 1.0), (5.0, 0.5), (0.01, 2.0)] {
            let e = mamev_trunov_eta(xi, a).unwrap();
            assert!(e.value() > 0.0);
            assert!(e.discrepancy() < 1e-10, "{e:?}");
        }
        assert!(mamev_trunov_eta(1e-9, 1.0).unwrap().value() < 1e-9);
    }
}
