use thiserror::Error;

/// Errors raised by the pricing pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Model parameters outside the admissible set (e.g. a martingale
    /// correction with a non-positive log argument).
    #[error("domain error: {0}")]
    Domain(String),

    /// The imaginary part of a Fourier argument lies outside a strip of
    /// regularity.
    #[error("strip violation: {0}")]
    StripViolation(String),

    #[error("branch error: {0}")]
    Branch(String),

    #[error("overflow: log-magnitude {log_magnitude:.1} exceeds cap {cap:.1}")]
    Overflow { log_magnitude: f64, cap: f64 },

    #[error("pole of the Gamma function at {0}")]
    Pole(f64),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("no strictly feasible damping vector found: {0}")]
    Infeasible(String),

    #[error("evaluation budget exceeded: {needed} > {cap}")]
    Budget { needed: u64, cap: u64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, PricingError>;

pub(crate) fn invalid(msg: impl Into<String>) -> PricingError {
    PricingError::InvalidInput(msg.into())
}
