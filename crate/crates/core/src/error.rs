use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: expected N >= 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate generator: alpha and gamma are both zero")]
    DegenerateGenerator,

    #[error("map is not trace preserving (residual {0:.3e})")]
    InvalidChannel(f64),

    #[error("quantile level {level} is not identified by the finite samples")]
    UnattainableQuantile { level: f64 },

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
