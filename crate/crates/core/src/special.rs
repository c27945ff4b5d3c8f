//! Trigamma function.

use crate::error::{domain, Result};

/// Shift threshold for the asymptotic expansion.
const ASYMPTOTIC_MIN: f64 = 10.0;

/// Bernoulli numbers B_2 .. B_14 for psi'(y) ~ 1/y + 1/(2y^2) + sum B_2k / y^(2k+1).
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Trigamma function `psi'(y)` for `y > 0`.
///
/// Upward recurrence `psi'(y) = psi'(y + 1) + 1/y^2` moves the argument to
/// `y >= 10`, where the Bernoulli asymptotic series is accurate to better
/// than `1e-14` relative.
pub fn trigamma(y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return domain(format!("trigamma requires a positive finite argument, got {y}"));
    }
    Ok(trigamma_unchecked(y))
}

pub(crate) fn trigamma_unchecked(mut y: f64) -> f64 {
    let mut shift = 0.0;
    while y < ASYMPTOTIC_MIN {
        shift += 1.0 / (y * y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    // Horner in 1/y^2 from the highest Bernoulli term down
    let mut series = 0.0;
    for b in BERNOULLI.iter().rev() {
        series = series * inv2 + b;
    }
    let asymptotic = inv + 0.5 * inv2 + series * inv2 * inv;
    // add the small recurrence terms last
    asymptotic + shift
}

/// `f(y) = psi'(1 + y) + 1/(2 y^2) - 1/y`, the nonnegative kernel of the
/// background shift `B - C`.
pub fn background_kernel(y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return domain(format!("background kernel requires y > 0, got {y}"));
    }
    Ok(background_kernel_unchecked(y))
}

pub(crate) fn background_kernel_unchecked(y: f64) -> f64 {
    // For large y the three terms cancel to O(1/y^3); use the asymptotic tail
    // psi'(1+y) = 1/y - 1/(2y^2) + sum B_2k / y^(2k+1) directly.
    if y >= ASYMPTOTIC_MIN {
        let inv = 1.0 / y;
        let inv2 = inv * inv;
        let mut series = 0.0;
        for b in BERNOULLI.iter().rev() {
            series = series * inv2 + b;
        }
        series * inv2 * inv
    } else {
        trigamma_unchecked(1.0 + y) + 0.5 / (y * y) - 1.0 / y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn known_values() {
        let z2 = PI * PI / 6.0;
        assert!((trigamma(1.0).unwrap() - z2).abs() < 1e-14);
        assert!((trigamma(2.0).unwrap() - (z2 - 1.0)).abs() < 1e-14);
        // psi'(1/2) = pi^2 / 2
        assert!((trigamma(0.5).unwrap() - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn domain_errors() {
        assert!(trigamma(0.0).is_err());
        assert!(trigamma(-1.0).is_err());
        assert!(trigamma(f64::NAN).is_err());
        assert!(background_kernel(0.0).is_err());
    }

    #[test]
    fn kernel_branches_agree_at_switch() {
        let y = ASYMPTOTIC_MIN;
        let direct = trigamma_unchecked(1.0 + y) + 0.5 / (y * y) - 1.0 / y;
        let asym = background_kernel_unchecked(y);
        assert!((direct - asym).abs() < 1e-15, "{direct} {asym}");
    }
}
