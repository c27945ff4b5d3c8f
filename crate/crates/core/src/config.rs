use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Physical inputs of the model.
///
/// `xi` is the strength of the potential `2 xi delta(x)` (inverse length),
/// `circumference` is the spatial period `L`, and `ell` is the length scale
/// used to quantize the zero-frequency mode. The coupling that controls the
/// spectrum is the dimensionless `chi = xi L / 2`, always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    xi: f64,
    circumference: f64,
    ell: f64,
}

impl ModelConfig {
    pub fn new(xi: f64, circumference: f64, ell: f64) -> Result<Self> {
        for (name, v) in [("xi", xi), ("L", circumference), ("ell", ell)] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(Self {
            xi,
            circumference,
            ell,
        })
    }

    /// Configuration with `L = 1` and `ell = L`, the layout used for the
    /// occupation-number table.
    pub fn unit_circle(xi: f64) -> Result<Self> {
        Self::new(xi, 1.0, 1.0)
    }

    /// Configuration with a prescribed `chi` on a circle of circumference `l`.
    pub fn from_chi(chi: f64, circumference: f64, ell: f64) -> Result<Self> {
        if !(circumference.is_finite() && circumference > 0.0) {
            return domain(format!("L must be positive and finite, got {circumference}"));
        }
        Self::new(2.0 * chi / circumference, circumference, ell)
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Circumference `L` of the spatial circle.
    pub fn circumference(&self) -> f64 {
        self.circumference
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn chi(&self) -> f64 {
        self.xi * self.circumference / 2.0
    }

    pub fn with_ell(self, ell: f64) -> Result<Self> {
        Self::new(self.xi, self.circumference, ell)
    }

    /// OUT-region wavenumber `k_n = 2 pi n / L`.
    pub fn k(&self, n: usize) -> f64 {
        2.0 * std::f64::consts::PI * n as f64 / self.circumference
    }
}
