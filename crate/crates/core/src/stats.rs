//! Monte-Carlo estimates and block jackknife errors.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    /// Quasi-MC and quadrature results carry no stochastic error bar.
    #[serde(default)]
    pub deterministic: bool,
}

impl MCEstimate {
    pub fn exact(mean: f64, n_samples: u64) -> Self {
        MCEstimate {
            mean,
            stderr: 0.0,
            n_samples,
            deterministic: true,
        }
    }
}

pub const DEFAULT_BLOCKS: usize = 100;

/// Jackknife over blocks of accumulated sums.
///
/// Each block holds the same set of raw sums (weights, weighted observables, ...);
/// `f` maps totals to the estimate. Returns the full-sample estimate and the
/// leave-one-block-out standard error.
pub fn jackknife<F: Fn(&[f64]) -> f64>(blocks: &[Vec<f64>], f: F) -> (f64, f64) {
    let nb = blocks.len();
    let width = blocks.first().map_or(0, Vec::len);
    let mut total = vec![0.0; width];
    for b in blocks {
        for (t, x) in total.iter_mut().zip(b) {
            *t += x;
        }
    }
    let full = f(&total);
    if nb < 2 {
        return (full, 0.0);
    }
    let mut scratch = vec![0.0; width];
    let loo: Vec<f64> = blocks
        .iter()
        .map(|b| {
            for ((s, t), x) in scratch.iter_mut().zip(&total).zip(b) {
                *s = t - x;
            }
            f(&scratch)
        })
        .collect();
    let mean_loo = loo.iter().sum::<f64>() / nb as f64;
    let var = loo.iter().map(|x| (x - mean_loo).powi(2)).sum::<f64>() * (nb as f64 - 1.0) / nb as f64;
    (full, var.sqrt())
}

/// Split `n` samples into `blocks` nearly equal chunks.
pub fn block_sizes(n: u64, blocks: usize) -> Vec<u64> {
    let b = blocks.max(1) as u64;
    (0..b).map(|i| n / b + u64::from(i < n % b)).collect()
}
