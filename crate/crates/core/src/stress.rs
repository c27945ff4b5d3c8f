//! Renormalized stress tensor of the IN vacuum.
//!
//! On the OUT region the tensor is a smooth isotropic part plus two families
//! of delta pulses created at the switch-off:
//!
//! ```text
//! T_tt = T_xx = rho + (C / 2L^2) sum_n [d((t+x)/L - n) + d((t-x)/L - n)]
//! T_tx        =       (C / 2L^2) sum_n [d((t+x)/L - n) - d((t-x)/L - n)]
//! rho         = -pi/(6 L^2) + (B - C)/L^2
//! ```
//!
//! The `(t+x)` family moves left, the `(t-x)` family moves right. Deltas are
//! never sampled: contractions along geodesics return the smooth part and a
//! list of crossings with their exact weights and Jacobians.

use std::f64::consts::PI;

use serde::Serialize;

use crate::config::ModelConfig;
use crate::eigensolve::{solve_roots, EigenTable, DEFAULT_TOL_ROOT};
use crate::error::{domain, Error, Result};
use crate::zeta_series::{constant_b, constant_b_minus_c, constant_c};

/// Points this close (relative to `L`) to a pulse or the potential count as on it.
const SUPPORT_TOL: f64 = 1e-12;

/// The constants entering the tensor, for one `chi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StressConstants {
    pub chi: f64,
    /// `B` from its direct series.
    pub b: f64,
    /// `C = chi / pi`.
    pub c: f64,
    /// `B - C` from the rapidly converging kernel series.
    pub b_minus_c: f64,
    pub j_max: usize,
}

impl StressConstants {
    pub fn from_eigen(eigen: &EigenTable) -> Result<Self> {
        Ok(Self {
            chi: eigen.chi(),
            b: constant_b(eigen).value,
            c: constant_c(eigen.chi())?.value,
            b_minus_c: constant_b_minus_c(eigen).value,
            j_max: eigen.j_max(),
        })
    }

    pub fn compute(chi: f64, j_max: usize) -> Result<Self> {
        Self::from_eigen(&solve_roots(chi, j_max, DEFAULT_TOL_ROOT)?)
    }

    fn check(&self, config: &ModelConfig) -> Result<()> {
        let chi = config.chi();
        if (self.chi - chi).abs() > 1e-12 * chi {
            return domain(format!("constants were computed for chi = {}, configuration has {chi}", self.chi));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// Supported on `t + x = (n + phase) L`.
    Left,
    /// Supported on `t - x = (n + phase) L`.
    Right,
}

/// One periodic family of delta pulses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaPulse {
    pub direction: Direction,
    /// Coefficient of `delta(arg - n)` in `T_tt`.
    pub amplitude: f64,
    /// Offset of the argument, in units of the period 1.
    pub phase: f64,
    /// Sign of the family's contribution to `T_tx`.
    pub flux_sign: f64,
}

impl DeltaPulse {
    /// Dimensionless argument `(t +- x)/L - phase`, whose integer values are the support.
    pub fn argument(&self, x: f64, t: f64, l: f64) -> f64 {
        match self.direction {
            Direction::Left => (t + x) / l - self.phase,
            Direction::Right => (t - x) / l - self.phase,
        }
    }
}

/// Structured stress tensor: isotropic smooth part plus pulse families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StressTensorField {
    pub region: Region,
    /// `rho`: coefficient of the identity in `T_{mu nu}`.
    pub background_density: f64,
    pub pulses: Vec<DeltaPulse>,
    pub circumference: f64,
}

/// Tensor components at a point off every delta support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Components {
    pub tt: f64,
    pub tx: f64,
    pub xx: f64,
}

impl Components {
    /// `eta^{mu nu} T_{mu nu}` with signature `(-, +)`.
    pub fn trace(&self) -> f64 {
        -self.tt + self.xx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PointValue {
    Regular(Components),
    /// The point lies on the support of the listed pulse families; the tensor
    /// has no pointwise value there.
    OnPulse(Vec<Direction>),
}

pub fn build_out_tensor(config: &ModelConfig, constants: &StressConstants) -> Result<StressTensorField> {
    constants.check(config)?;
    let l = config.circumference();
    let amplitude = constants.c / (2.0 * l * l);
    Ok(StressTensorField {
        region: Region::Out,
        background_density: background(l, constants),
        pulses: vec![
            DeltaPulse {
                direction: Direction::Left,
                amplitude,
                phase: 0.0,
                flux_sign: 1.0,
            },
            DeltaPulse {
                direction: Direction::Right,
                amplitude,
                phase: 0.0,
                flux_sign: -1.0,
            },
        ],
        circumference: l,
    })
}

/// The IN-region tensor: the same constant isotropic value, undefined on the
/// potential's support `x = 0 (mod L)`.
pub fn build_in_tensor(config: &ModelConfig, constants: &StressConstants) -> Result<StressTensorField> {
    constants.check(config)?;
    let l = config.circumference();
    Ok(StressTensorField {
        region: Region::In,
        background_density: background(l, constants),
        pulses: Vec::new(),
        circumference: l,
    })
}

fn background(l: f64, constants: &StressConstants) -> f64 {
    (-PI / 6.0 + constants.b_minus_c) / (l * l)
}

fn near_integer(s: f64) -> bool {
    (s - s.round()).abs() < SUPPORT_TOL
}

impl StressTensorField {
    pub fn evaluate(&self, x: f64, t: f64) -> Result<PointValue> {
        let l = self.circumference;
        if self.region == Region::In && near_integer(x / l) {
            return Err(Error::OnPotentialSupport { x });
        }
        let on: Vec<Direction> = self
            .pulses
            .iter()
            .filter(|p| near_integer(p.argument(x, t, l)))
            .map(|p| p.direction)
            .collect();
        if !on.is_empty() {
            return Ok(PointValue::OnPulse(on));
        }
        let rho = self.background_density;
        Ok(PointValue::Regular(Components { tt: rho, tx: 0.0, xx: rho }))
    }

    fn pulse(&self, direction: Direction) -> Option<&DeltaPulse> {
        self.pulses.iter().find(|p| p.direction == direction)
    }

    fn require_out(&self) -> Result<()> {
        if self.region != Region::Out {
            return domain("geodesic contractions are defined on the OUT region tensor");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeodesicKind {
    Timelike,
    /// Moving toward `+x`, `x = x0 + lambda`.
    NullRight,
    /// Moving toward `-x`, `x = x0 - lambda`.
    NullLeft,
}

/// `gamma(tau) = (t0, x0) + gamma_v (tau, v tau)` for timelike observers, or
/// `(t0, x0) + (lambda, +-lambda)` for null ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicSpec {
    pub v: f64,
    pub t0: f64,
    pub x0: f64,
    pub kind: GeodesicKind,
}

impl GeodesicSpec {
    pub fn timelike(v: f64, t0: f64, x0: f64) -> Result<Self> {
        if !(v.abs() < 1.0) {
            return domain(format!("timelike observers need |v| < 1, got {v}"));
        }
        Self::check_offsets(t0, x0)?;
        Ok(Self {
            v,
            t0,
            x0,
            kind: GeodesicKind::Timelike,
        })
    }

    pub fn null(kind: GeodesicKind, t0: f64, x0: f64) -> Result<Self> {
        if kind == GeodesicKind::Timelike {
            return domain("use GeodesicSpec::timelike for timelike observers");
        }
        Self::check_offsets(t0, x0)?;
        Ok(Self { v: 0.0, t0, x0, kind })
    }

    fn check_offsets(t0: f64, x0: f64) -> Result<()> {
        if !(t0.is_finite() && x0.is_finite()) {
            return domain("geodesic offsets must be finite");
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        match self.kind {
            GeodesicKind::Timelike => 1.0 / (1.0 - self.v * self.v).sqrt(),
            _ => 1.0,
        }
    }

    /// Affine parameter at which the worldline crosses `t = 0`.
    pub fn tau_entry(&self) -> f64 {
        -self.t0 / self.gamma()
    }

    /// Spacetime point `(t, x)` at parameter `tau`.
    pub fn point(&self, tau: f64) -> (f64, f64) {
        match self.kind {
            GeodesicKind::Timelike => {
                let g = self.gamma();
                (self.t0 + g * tau, self.x0 + g * self.v * tau)
            }
            GeodesicKind::NullRight => (self.t0 + tau, self.x0 + tau),
            GeodesicKind::NullLeft => (self.t0 + tau, self.x0 - tau),
        }
    }

    /// `(t0 +- x0, d/dtau (t +- x))` for the left (`+`) or right (`-`) family.
    fn family_line(&self, direction: Direction) -> (f64, f64) {
        let g = self.gamma();
        match (self.kind, direction) {
            (GeodesicKind::Timelike, Direction::Left) => (self.t0 + self.x0, (1.0 + self.v) * g),
            (GeodesicKind::Timelike, Direction::Right) => (self.t0 - self.x0, (1.0 - self.v) * g),
            (GeodesicKind::NullRight, Direction::Left) => (self.t0 + self.x0, 2.0),
            (GeodesicKind::NullRight, Direction::Right) => (self.t0 - self.x0, 0.0),
            (GeodesicKind::NullLeft, Direction::Left) => (self.t0 + self.x0, 0.0),
            (GeodesicKind::NullLeft, Direction::Right) => (self.t0 - self.x0, 2.0),
        }
    }
}

/// A delta pulse met along a worldline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub tau: f64,
    pub direction: Direction,
    /// Coefficient of `delta(arg - n)` in the contracted density.
    pub weight: f64,
    /// Jacobian `L / (d arg/d tau)`: the pulse contributes
    /// `weight * measure * g(tau)` to the integral of the density against `g`.
    pub measure: f64,
}

/// A contracted density along a worldline over a parameter window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contraction {
    pub smooth: f64,
    /// Crossings in ascending `tau`.
    pub crossings: Vec<Crossing>,
}

impl Contraction {
    /// `int rho(tau) g(tau) dtau` given `int g dtau`.
    pub fn smear<G: Fn(f64) -> f64>(&self, g: G, g_integral: f64) -> f64 {
        let mut acc = crate::sum::NeumaierSum::new();
        acc.add(self.smooth * g_integral);
        for c in &self.crossings {
            acc.add(c.weight * c.measure * g(c.tau));
        }
        acc.value()
    }
}

/// Which contraction to form along the worldline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Density {
    Energy,
    Momentum,
}

/// Energy density `T_{mu nu} u^mu u^nu` (or `K^mu K^nu` for null observers)
/// on `[tau_min, tau_max]`, clipped to the OUT region.
///
/// Timelike: smooth part `(1+v^2)/(1-v^2) rho`; the left family weighs
/// `(1+v)/(1-v)` and recurs every `sqrt((1-v)/(1+v)) L`, the right family
/// weighs `(1-v)/(1+v)` and recurs every `sqrt((1+v)/(1-v)) L`. Null: smooth
/// part `2 rho` and only the counter-moving family, weight `4 x amplitude`.
pub fn energy_density_along(
    geo: &GeodesicSpec,
    field: &StressTensorField,
    tau_min: f64,
    tau_max: f64,
) -> Result<Contraction> {
    contract(geo, field, tau_min, tau_max, Density::Energy)
}

/// Momentum density `-T_{mu nu} u^mu r^nu` along a timelike worldline:
/// smooth part `-2v/(1-v^2) rho`, left family weight `-(1+v)/(1-v)`, right
/// family weight `+(1-v)/(1+v)`.
pub fn momentum_density_along(
    geo: &GeodesicSpec,
    field: &StressTensorField,
    tau_min: f64,
    tau_max: f64,
) -> Result<Contraction> {
    if geo.kind != GeodesicKind::Timelike {
        return domain("momentum density needs a timelike observer");
    }
    contract(geo, field, tau_min, tau_max, Density::Momentum)
}

fn contract(
    geo: &GeodesicSpec,
    field: &StressTensorField,
    tau_min: f64,
    tau_max: f64,
    density: Density,
) -> Result<Contraction> {
    field.require_out()?;
    if !(tau_min.is_finite() && tau_max.is_finite()) {
        return domain("parameter window must be finite");
    }
    let v = geo.v;
    let rho = field.background_density;
    let smooth = match (geo.kind, density) {
        (GeodesicKind::Timelike, Density::Energy) => (1.0 + v * v) / (1.0 - v * v) * rho,
        (GeodesicKind::Timelike, Density::Momentum) => -2.0 * v / (1.0 - v * v) * rho,
        (_, Density::Energy) => 2.0 * rho,
        (_, Density::Momentum) => unreachable!("rejected above"),
    };

    let l = field.circumference;
    let lo = tau_min.max(geo.tau_entry());
    let mut crossings = Vec::new();
    if lo <= tau_max {
        for direction in [Direction::Left, Direction::Right] {
            let Some(pulse) = field.pulse(direction) else {
                continue;
            };
            let (offset, rate) = geo.family_line(direction);
            if rate == 0.0 {
                // co-moving null family never crosses
                continue;
            }
            let factor = match (geo.kind, density, direction) {
                (GeodesicKind::Timelike, Density::Energy, Direction::Left) => (1.0 + v) / (1.0 - v),
                (GeodesicKind::Timelike, Density::Energy, Direction::Right) => (1.0 - v) / (1.0 + v),
                (GeodesicKind::Timelike, Density::Momentum, Direction::Left) => -(1.0 + v) / (1.0 - v),
                (GeodesicKind::Timelike, Density::Momentum, Direction::Right) => (1.0 - v) / (1.0 + v),
                _ => 4.0,
            };
            let arg = |tau: f64| (offset + rate * tau) / l - pulse.phase;
            let first = arg(lo).ceil() as i64;
            let last = arg(tau_max).floor() as i64;
            for n in first..=last {
                let tau = ((n as f64 + pulse.phase) * l - offset) / rate;
                crossings.push(Crossing {
                    tau,
                    direction,
                    weight: factor * pulse.amplitude,
                    measure: l / rate,
                });
            }
        }
    }
    crossings.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    Ok(Contraction { smooth, crossings })
}

/// Crossing periods `(T_left, T_right)` in proper time for a timelike observer.
pub fn crossing_periods(v: f64, circumference: f64) -> Result<(f64, f64)> {
    if !(v.abs() < 1.0) {
        return domain(format!("timelike observers need |v| < 1, got {v}"));
    }
    let r = ((1.0 + v) / (1.0 - v)).sqrt();
    Ok((circumference / r, circumference * r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    Null,
    Weak,
    Strong,
    Dominant,
}

/// Where and how a condition fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub t: f64,
    pub x: f64,
    /// Contracting vector `(Y^t, Y^x)`.
    pub vector: (f64, f64),
    /// Contraction value at the point; negative for a violation.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub condition: Condition,
    pub violated: bool,
    pub witness: Witness,
}

/// NEC, WEC, SEC and DEC checked at a point between the pulses.
///
/// The witness sits at `(t, x) = (L/4, L/8)`, where `t +- x` is not a
/// multiple of `L`. The SEC reduces to the WEC because the tensor is
/// traceless; the DEC future-pointing test uses the null vectors `K_+-`.
pub fn energy_conditions(
    field: &StressTensorField,
    config: &ModelConfig,
    constants: &StressConstants,
) -> Result<Vec<Verdict>> {
    field.require_out()?;
    constants.check(config)?;
    let l = config.circumference();
    let (t, x) = (0.25 * l, 0.125 * l);
    let comp = match field.evaluate(x, t)? {
        PointValue::Regular(c) => c,
        PointValue::OnPulse(_) => unreachable!("witness point is off the pulses"),
    };
    let contract = |y: (f64, f64)| comp.tt * y.0 * y.0 + 2.0 * comp.tx * y.0 * y.1 + comp.xx * y.1 * y.1;
    let k_plus = (1.0, 1.0);
    let u_rest = (1.0, 0.0);
    let mut out = Vec::with_capacity(4);
    for (condition, vector, value) in [
        (Condition::Null, k_plus, contract(k_plus)),
        (Condition::Weak, u_rest, contract(u_rest)),
        // (T - T g / 2) u u with g(u, u) = -1
        (Condition::Strong, u_rest, contract(u_rest) + 0.5 * comp.trace()),
        (Condition::Dominant, k_plus, comp.tt * k_plus.0 + comp.tx * k_plus.1),
    ] {
        out.push(Verdict {
            condition,
            violated: value < 0.0,
            witness: Witness { t, x, vector, value },
        });
    }
    Ok(out)
}

/// Energy on a constant-time slice of the OUT region, `(-pi/6 + B)/L`.
pub fn total_energy(config: &ModelConfig, constants: &StressConstants) -> Result<f64> {
    constants.check(config)?;
    Ok((-PI / 6.0 + constants.b) / config.circumference())
}

/// Zero of `-pi/6 + B(chi)` in `[lo, hi]` by bisection, with `B` summed over
/// `j_max` roots. Stops when the bracket is narrower than `tol`.
pub fn energy_zero(lo: f64, hi: f64, j_max: usize, tol: f64) -> Result<f64> {
    let energy = |chi: f64| -> Result<f64> {
        let eigen = solve_roots(chi, j_max, DEFAULT_TOL_ROOT)?;
        Ok(-PI / 6.0 + constant_b(&eigen).value)
    };
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (energy(a)?, energy(b)?);
    if fa.signum() == fb.signum() {
        return domain(format!("energy has the same sign at chi = {lo} and chi = {hi}"));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = energy(m)?;
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
