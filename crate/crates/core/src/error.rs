use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("dimension mismatch: expected n={expected}, got n={got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("series did not converge within {max_terms} terms (last |term| = {last_term:.3e})")]
    NonConvergence { max_terms: usize, last_term: f64 },
    #[error("q-Gamma pole at non-positive integer argument {0}")]
    QGammaPole(f64),
    #[error("coincident coordinates (minimum relative separation {0:.3e})")]
    CoincidentCoordinates(f64),
    #[error("Hankel solve ill-conditioned: residual {residual:.3e} exceeds {limit:.3e}")]
    IllConditioned { residual: f64, limit: f64 },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("window overflow: operator support touched the truncation boundary")]
    WindowOverflow,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
