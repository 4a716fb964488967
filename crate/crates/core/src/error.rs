use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {message}")]
    InvalidParameter { field: String, message: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("kernel is not summable: {0}")]
    NonSummable(String),

    #[error("truncation radius exceeds the hard cap {cap} (tail at cap is {tail:e}, tolerance {tol:e})")]
    RangeCap { cap: usize, tail: f64, tol: f64 },

    #[error("window graph was sampled under params {graph}, not {params}")]
    DigestMismatch { graph: String, params: String },

    #[error("vector length {actual} does not match window size {expected}")]
    VectorLength { expected: usize, actual: usize },

    #[error("matrix block of size {size} exceeds the dense threshold {threshold}")]
    TooLarge { size: usize, threshold: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("vertex set is not contained in the window Λ_{n}")]
    OutsideWindow { n: usize },

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("only {usable} usable grid points, need at least {required}")]
    InsufficientPoints { usable: usize, required: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Config and user-input errors map to exit code 2, everything else to 3.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::DimensionMismatch { .. }
                | Error::NonSummable(_)
                | Error::Config(_)
                | Error::OutsideWindow { .. }
        )
    }
}
