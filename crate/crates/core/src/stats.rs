//! Bernoulli estimates and small fitting helpers.

use crate::runner::Counts;
use alloc::vec::Vec;

/// Point estimate of a probability from independent trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    /// `√(p̂(1−p̂)/N)`.
    pub stderr: f64,
    /// 95% Wilson score interval.
    pub ci95: (f64, f64),
}

const Z95: f64 = 1.959_963_984_540_054;

impl McEstimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        assert!(successes <= trials, "successes exceed trials");
        if trials == 0 {
            return Self {
                trials,
                successes,
                estimate: 0.0,
                stderr: 0.0,
                ci95: (0.0, 1.0),
            };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let stderr = libm::sqrt(p * (1.0 - p) / n);
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
        let ci95 = ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p));
        Self {
            trials,
            successes,
            estimate: p,
            stderr,
            ci95,
        }
    }

    pub fn from_counts(c: Counts) -> Self {
        Self::new(c.successes, c.trials)
    }

    /// Pools two estimates of the same quantity.
    pub fn merge(&self, other: &Self) -> Self {
        Self::new(self.successes + other.successes, self.trials + other.trials)
    }

    /// Standard error of the difference of two independent estimates.
    pub fn combined_stderr(&self, other: &Self) -> f64 {
        libm::hypot(self.stderr, other.stderr)
    }

    /// `true` iff `self ≤ other + k·σ_combined`.
    pub fn at_most(&self, other: &Self, k: f64) -> bool {
        self.estimate <= other.estimate + k * self.combined_stderr(other)
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Slope of `ln p̂_n` against `n`, with the delta-method standard error
/// (each `ln p̂_n` weighted by its own variance, correlations ignored).
pub fn log_decay_fit(ns: &[u32], estimates: &[McEstimate]) -> (f64, f64) {
    let xs: Vec<f64> = ns.iter().map(|&n| f64::from(n)).collect();
    let ys: Vec<f64> = estimates.iter().map(|e| libm::log(e.estimate)).collect();
    let slope = ls_slope(&xs, &ys);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let var: f64 = xs
        .iter()
        .zip(estimates)
        .map(|(x, e)| {
            let rel = e.stderr / e.estimate;
            let c = (x - mx) / sxx;
            c * c * rel * rel
        })
        .sum();
    (slope, libm::sqrt(var))
}

/// Running first and second moments of a scalar sample.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        let n = self.count as f64;
        let m = self.mean();
        libm::sqrt(((self.sum_sq / n - m * m) * n / (n - 1.0)).max(0.0) / n)
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }
}
