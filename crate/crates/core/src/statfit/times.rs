//! Characteristic times over a grid of `k` values.

use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_times, BootstrapTimes};
use super::lm::DataPoint;
use crate::dynamics::PpttSearchConfig;
use crate::ensemble::{sample_pptt_distribution, Mode};
use crate::error::{Error, Result};

pub const DEFAULT_K_GRID: [f64; 16] = [
    0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0, 100.0, 300.0, 600.0, 1000.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeStatistic {
    Median,
    Mean,
    Min,
}

impl std::str::FromStr for TimeStatistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(TimeStatistic::Median),
            "mean" => Ok(TimeStatistic::Mean),
            "min" => Ok(TimeStatistic::Min),
            other => Err(Error::InvalidInput(format!("unknown statistic {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub k: f64,
    pub seed: u64,
    pub n_samples: usize,
    pub censored_count: usize,
    pub times: BootstrapTimes,
}

impl GridPoint {
    pub fn data_point(&self, stat: TimeStatistic) -> DataPoint {
        let s = match stat {
            TimeStatistic::Median => self.times.median,
            TimeStatistic::Mean => self.times.mean,
            TimeStatistic::Min => self.times.min,
        };
        DataPoint {
            x: self.k,
            value: s.mean,
            error: s.sigma,
        }
    }
}

/// Seed of the `index`-th grid point; distinct grid points get independent
/// ensembles.
pub fn grid_seed(master_seed: u64, index: usize) -> u64 {
    master_seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Sample `n_samples` P-mode PPT times at every `k` of `grid` and bootstrap
/// the median, mean and minimum over the finite times.
pub fn bootstrap_over_grid(
    n_dim: usize,
    grid: &[f64],
    n_samples: usize,
    master_seed: u64,
    cfg: &PpttSearchConfig,
    resamples: usize,
) -> Result<Vec<GridPoint>> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("k grid is empty".into()));
    }
    grid.iter()
        .enumerate()
        .map(|(i, &k)| {
            let seed = grid_seed(master_seed, i);
            let dist = sample_pptt_distribution(n_dim, k, Mode::P, n_samples, seed, cfg)?;
            let times = bootstrap_times(dist.samples(), resamples, seed)?;
            Ok(GridPoint {
                k,
                seed,
                n_samples,
                censored_count: dist.censored_count(),
                times,
            })
        })
        .collect()
}

pub fn data_points(series: &[GridPoint], stat: TimeStatistic) -> Vec<DataPoint> {
    series.iter().map(|g| g.data_point(stat)).collect()
}
