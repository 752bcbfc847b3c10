use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{what} = {value} is outside the admissible range {range}")]
    Domain {
        what: &'static str,
        value: f64,
        range: &'static str,
    },
    /// Structurally invalid input.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A point lies on (or too close to) the pole of a linear fractional map.
    #[error("point ({x}, {y}) lies within {distance:e} of the pole")]
    Pole { x: f64, y: f64, distance: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    /// A matrix that must be positive definite is not.
    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    /// An iterative method stopped before reaching its tolerance.
    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },
    /// λ₁(ω) sampled during a bracketing run was not non-increasing.
    #[error("λ1 is not monotone in ω: λ1({omega_lo}) = {lambda_lo}, λ1({omega_hi}) = {lambda_hi}")]
    NonMonotone {
        omega_lo: f64,
        lambda_lo: f64,
        omega_hi: f64,
        lambda_hi: f64,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
