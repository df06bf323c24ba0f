use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at {0}")]
    Pole(Complex64),

    #[error("capacity exceeded: needed {needed}, limit {limit}")]
    Capacity { needed: usize, limit: usize },

    #[error("argument out of range: {0}")]
    Range(String),

    #[error(
        "tolerance not met: best value {value}, error estimate {err_estimate:e} after {evaluations} evaluations"
    )]
    ToleranceNotMet {
        value: Complex64,
        err_estimate: f64,
        evaluations: usize,
    },

    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),

    #[error("guard violated: {0}")]
    Guard(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
