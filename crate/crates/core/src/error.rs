use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value encountered: {0}")]
    NonFiniteResult(String),

    #[error("parameter `{name}` = {value} is out of range ({expected})")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("iterative estimator did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("bracketing search exceeded b = {cap:e} without finding a feasible point")]
    SearchBudgetExceeded { cap: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("invariant violated at {path}: {message}")]
    InvariantViolation { path: String, message: String },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn schema(path: &str, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn invariant(path: &str, message: impl Into<String>) -> Self {
        Error::InvariantViolation {
            path: path.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    ///
    /// Configuration and schema problems map to 2, persistence problems to 3,
    /// and everything else (numerical failures) to 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::Schema { .. }
            | Error::InvariantViolation { .. }
            | Error::ParameterOutOfRange { .. }
            | Error::DimensionMismatch { .. } => 2,
            Error::Io { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
