use thiserror::Error;

/// Errors raised while building models or running solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {what}: {reason}")]
    InvalidInput { what: &'static str, reason: String },

    #[error("correlation approximation is degenerate (beta2 = 0); use the exact correlation")]
    DegenerateApproximation,

    #[error("numerical failure in {stage}: {reason}")]
    Numerical { stage: &'static str, reason: String, last_iterate: Vec<f64> },

    #[error("scenario {key}: {reason}")]
    Scenario { key: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidInput { what, reason: reason.into() }
}
