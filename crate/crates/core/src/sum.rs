//! Compensated summation.
//!
//! Every series in the crate is accumulated in ascending index order through
//! [`NeumaierSum`], so results do not depend on thread count or platform
//! reassociation.

/// Kahan–Babuška (Neumaier) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// Upper bound on `sum_{k >= start} k^{-p}` for `p > 1` and `start >= 1`.
///
/// Integral comparison: the first term plus `int_start^inf x^{-p} dx`.
pub fn zeta_tail_bound(p: f64, start: usize) -> f64 {
    debug_assert!(p > 1.0 && start >= 1);
    let s = start as f64;
    s.powf(-p) + s.powf(1.0 - p) / (p - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(xs), 2.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn zeta_tail_bounds_the_true_tail() {
        // sum_{k>=10} k^-2 = pi^2/6 - H_9^(2)
        let head: f64 = (1..10).map(|k| 1.0 / (k * k) as f64).sum();
        let tail = std::f64::consts::PI.powi(2) / 6.0 - head;
        let bound = zeta_tail_bound(2.0, 10);
        assert!(tail <= bound && bound < 1.2 * tail, "{tail} {bound}");
    }
}
