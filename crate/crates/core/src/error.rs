use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point is outside the proposal support: {0}")]
    OutsideSupport(String),

    #[error("quadrature did not converge: best value {value} with error estimate {abs_error}")]
    NonConvergence { value: f64, abs_error: f64 },

    #[error("width function has unbounded support and no integrable tail certificate")]
    UnboundedSupport,

    #[error("step budget of {0} exceeded")]
    StepBudgetExceeded(usize),

    #[error("{0} is not available for this pair")]
    Unsupported(String),

    #[error("row failed validation: {0}")]
    InvalidRow(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
