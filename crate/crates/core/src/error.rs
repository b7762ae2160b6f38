use thiserror::Error;

/// Errors raised by the measure calculus, the random-matrix layer and the
/// positivity checkers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported measure variant for {op}: {variant}")]
    UnsupportedVariant { op: &'static str, variant: &'static str },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("frame is not an isometry (deviation {0:.3e})")]
    NotIsometry(f64),

    #[error("root bracketing failed: {0}")]
    ConvergenceFailure(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("problem too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
