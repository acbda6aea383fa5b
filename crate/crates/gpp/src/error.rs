//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GppError {
    /// Bad caller input: dimension mismatch, non-finite values, out-of-range
    /// hyperparameters, malformed files.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numerical routine failed (Cholesky not positive-definite even at
    /// maximum jitter, non-finite quadrature evaluations, ...).
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A quantity is undefined for a point-mass distribution (e.g. episteme
    /// of a zero-variance latent).
    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    /// A metric is undefined for the given inputs (e.g. Pearson correlation
    /// of a constant sequence).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GppError>;
