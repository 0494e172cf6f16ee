use std::fmt;

use pptt_core::Error as CoreError;
use serde::Serialize;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Validation,
    Io,
    Numerical,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Validation,
            message: message.into(),
        }
    }

    pub fn io(context: &str, err: impl fmt::Display) -> Self {
        Self {
            kind: Kind::Io,
            message: format!("{context}: {err}"),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            Kind::Validation | Kind::Io => EXIT_VALIDATION,
            Kind::Numerical => EXIT_NUMERICAL,
        }
    }

    /// Single-line JSON for stderr.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "error": self.kind,
            "message": self.message,
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let kind = match err {
            CoreError::InvalidDimension(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::InvalidInput(_)
            | CoreError::DegenerateGenerator => Kind::Validation,
            CoreError::InvalidChannel(_)
            | CoreError::UnattainableQuantile { .. }
            | CoreError::FitFailed(_)
            | CoreError::Internal(_) => Kind::Numerical,
        };
        Self {
            kind,
            message: err.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
