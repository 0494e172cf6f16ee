use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pptt_core::PpttSearchConfig;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "pptt", version, about = "PPT-time sampling, fitting and composition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample PPT times of L^(k,1) (mode P) or L^(1,1/k) (mode Q).
    Sample(SampleArgs),
    /// Sample PPT times of the strong-Hamiltonian limit generator.
    LimitSample(LimitSampleArgs),
    /// Fit three-parameter Gamma and/or Lognormal laws to a sample CSV.
    FitDist(FitDistArgs),
    /// Bootstrap characteristic times over a k grid and fit f_theta.
    FitTimes(FitTimesArgs),
    /// Composed n-site CDF table and power-law fit of the n-site median.
    Compose(ComposeArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SearchArgs {
    /// Censoring horizon.
    #[arg(long, default_value_t = 50.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub coarse_step: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub bisect_tol: f64,
    /// Shift added before the positivity test of the partial transpose.
    #[arg(long, default_value_t = 1e-10)]
    pub psd_tol: f64,
}

impl SearchArgs {
    pub fn config(&self) -> PpttSearchConfig {
        PpttSearchConfig {
            t_max: self.t_max,
            coarse_step: self.coarse_step,
            bisect_tol: self.bisect_tol,
            psd_tol: self.psd_tol,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WorkerArgs {
    /// Worker threads; output does not depend on it.
    #[arg(long, env = "PPTT_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ModeArg {
    #[value(name = "P")]
    P,
    #[value(name = "Q")]
    Q,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub n_dim: usize,
    #[arg(long)]
    pub k: f64,
    #[arg(long, value_enum, default_value = "P")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Sample CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional histogram CSV.
    #[arg(long)]
    pub hist: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub workers: WorkerArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LimitSampleArgs {
    #[arg(long)]
    pub n_dim: usize,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub hist: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub workers: WorkerArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Gamma3,
    Lognormal3,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitDistArgs {
    /// Sample CSV written by `sample` or `limit-sample`.
    #[arg(long)]
    pub from: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub family: FamilyArg,
    /// JSON report; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticArg {
    Median,
    Mean,
    Min,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitTimesArgs {
    #[arg(long)]
    pub n_dim: usize,
    /// Comma-separated k values; defaults to a 16-point grid up to 1000.
    #[arg(long, value_delimiter = ',')]
    pub k_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "median")]
    pub statistic: StatisticArg,
    #[arg(long, default_value_t = 100)]
    pub resamples: usize,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Residuals CSV.
    #[arg(long)]
    pub residuals: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub workers: WorkerArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ComposeArgs {
    #[arg(long)]
    pub from: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub n_max: u32,
    /// Number of equally spaced times in the CDF table.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Composed CDF table CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// X_n table CSV.
    #[arg(long)]
    pub xn_out: Option<PathBuf>,
    /// JSON report with the power-law fit.
    #[arg(long)]
    pub report: Option<PathBuf>,
}
