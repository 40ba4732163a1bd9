use thiserror::Error;

/// Errors raised across the sieve, atlas, zeta and tracing modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("zeta has a pole at s = 1")]
    Pole,

    #[error("requested tolerance {requested:e} is below the achievable {achievable:e}")]
    Tolerance { requested: f64, achievable: f64 },

    #[error("zero scan incomplete: found {found} sign changes, expected {expected}")]
    IncompleteScan { found: usize, expected: usize, partial: Vec<f64> },

    #[error("resolution error: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
