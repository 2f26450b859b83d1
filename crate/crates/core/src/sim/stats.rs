//! Non-overlapping batch means for ratio estimators.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Point estimate with its 95% batch-means half-width. The half-width is
/// `None` with fewer than two usable batches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: Option<f64>,
}

/// Accumulates per-batch numerators and denominators of a ratio `Σx / Σy`.
#[derive(Debug, Clone)]
pub(crate) struct RatioBatches {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl RatioBatches {
    pub(crate) fn new(batches: usize) -> Self {
        RatioBatches {
            num: vec![0.0; batches],
            den: vec![0.0; batches],
        }
    }

    pub(crate) fn record(&mut self, batch: usize, num: f64, den: f64) {
        self.num[batch] += num;
        self.den[batch] += den;
    }

    /// `None` when the total denominator is zero.
    pub(crate) fn estimate(&self) -> Option<Estimate> {
        let total_den: f64 = self.den.iter().sum();
        if total_den <= 0.0 {
            return None;
        }
        let mean = self.num.iter().sum::<f64>() / total_den;
        let ratios: Vec<f64> = self
            .num
            .iter()
            .zip(&self.den)
            .filter(|(_, d)| **d > 0.0)
            .map(|(n, d)| n / d)
            .collect();
        Some(Estimate {
            mean,
            half_width: half_width_95(&ratios),
        })
    }
}

/// `t_{0.975, b−1} · s / √b` over batch values.
pub fn half_width_95(batch_values: &[f64]) -> Option<f64> {
    let b = batch_values.len();
    if b < 2 {
        return None;
    }
    let mean = batch_values.iter().sum::<f64>() / b as f64;
    let var = batch_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (b - 1) as f64)
        .expect("degrees of freedom are positive")
        .inverse_cdf(0.975);
    Some(t * (var / b as f64).sqrt())
}
