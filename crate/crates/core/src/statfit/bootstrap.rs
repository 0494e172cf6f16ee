//! Bootstrap estimates of the characteristic times.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub const DEFAULT_RESAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapStat {
    /// Mean of the statistic over resamples.
    pub mean: f64,
    /// Sample standard deviation over resamples (1σ).
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapTimes {
    pub median: BootstrapStat,
    pub mean: BootstrapStat,
    pub min: BootstrapStat,
    pub resamples: usize,
    pub seed: u64,
}

fn median_of_sorted(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn summarize(values: &[f64]) -> BootstrapStat {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    BootstrapStat {
        mean,
        sigma: var.max(0.0).sqrt(),
    }
}

/// Resample `samples` with replacement `resamples` times; resample `b` draws
/// from stream `b` of `seed`.
pub fn bootstrap_times(samples: &[f64], resamples: usize, seed: u64) -> Result<BootstrapTimes> {
    if resamples < 2 {
        return Err(Error::InvalidInput(format!(
            "bootstrap needs at least 2 resamples, got {resamples}"
        )));
    }
    if samples.is_empty() || samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("bootstrap needs finite, non-empty samples".into()));
    }
    let n = samples.len();
    let one = |b: usize| -> [f64; 3] {
        let mut rng = RngStream::new(seed, b as u64).generator();
        let mut draw: Vec<f64> = (0..n).map(|_| samples[rng.random_range(0..n)]).collect();
        draw.sort_by(f64::total_cmp);
        [
            median_of_sorted(&draw),
            draw.iter().sum::<f64>() / n as f64,
            draw[0],
        ]
    };
    #[cfg(feature = "parallel")]
    let stats: Vec<[f64; 3]> = {
        use rayon::prelude::*;
        (0..resamples).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let stats: Vec<[f64; 3]> = (0..resamples).map(one).collect();

    let column = |i: usize| summarize(&stats.iter().map(|s| s[i]).collect::<Vec<_>>());
    Ok(BootstrapTimes {
        median: column(0),
        mean: column(1),
        min: column(2),
        resamples,
        seed,
    })
}
