//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A point violates the domain (boundary or exterior).
    #[error("domain violation: {0}")]
    Domain(String),

    /// Non-finite value or failed factorization.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The Newton solver did not reach the residual tolerance.
    #[error("argmin did not converge after {iters} iterations (residual {residual:.3e})")]
    Convergence { iters: usize, residual: f64 },

    /// An enumeration budget or dimension cap was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A caller-supplied object breaks a stated precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid algorithm or environment parameter.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Malformed experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    /// An internal invariant failed; indicates a bug rather than bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
