use super::AnalysisError;
use crate::rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Percentile-bootstrap settings. Each statistic draws from its own stream
/// keyed by `(seed, statistic key)`, so results do not depend on the order
/// statistics are computed in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { resamples: 10_000, alpha: 0.05, seed: 0 }
    }
}

impl BootstrapConfig {
    pub fn rng_for(&self, key: &str) -> rng::Rng {
        rng::keyed(self.seed, key)
    }
}

/// Interpolated empirical quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Means of `resamples` resamples drawn with replacement, sorted.
pub fn bootstrap_means<R: Rng + ?Sized>(samples: &[f64], resamples: usize, rng: &mut R) -> Vec<f64> {
    let n = samples.len();
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| samples[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    means
}

/// Percentile bootstrap interval for the sample mean: the `alpha/2` and
/// `1 - alpha/2` quantiles of `resamples` resampled means.
pub fn bootstrap_ci<R: Rng + ?Sized>(
    samples: &[f64],
    resamples: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<(f64, f64), AnalysisError> {
    if samples.is_empty() {
        return Err(AnalysisError::EmptySample);
    }
    if resamples == 0 || !(alpha > 0.0 && alpha < 1.0) {
        return Err(AnalysisError::InvalidBootstrap { resamples, alpha });
    }
    let means = bootstrap_means(samples, resamples, rng);
    Ok((quantile(&means, alpha / 2.0), quantile(&means, 1.0 - alpha / 2.0)))
}
