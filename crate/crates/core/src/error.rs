use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the numeric evaluation layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Im(tau) must be positive (got {0})")]
    NonPositiveImTau(f64),

    #[error("Im part of the period matrix must be positive definite")]
    NotPositiveDefinite,

    #[error("tolerance must lie in (0, 1) (got {0})")]
    InvalidTolerance(f64),

    #[error("truncation needs {needed} terms, above the cap of {cap}")]
    PrecisionUnattainable { needed: usize, cap: usize },

    #[error("theta index {0} is not supported here")]
    InvalidThetaIndex(u8),

    #[error("denominator factor {index} is too close to zero (|value| = {magnitude:e})")]
    NearZeroDenominator { index: usize, magnitude: f64 },

    #[error("invalid nome: {0}")]
    InvalidNome(String),

    #[error("{0}")]
    Domain(String),

    #[error("unknown identity id {0:?}")]
    UnknownIdentity(String),

    #[error("parameter error: {0}")]
    Schema(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
}
