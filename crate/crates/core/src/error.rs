//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested combination (domain, connection family, ...) is not
    /// supported by this code path; the message names the alternative.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative scheme failed to meet its tolerance within its budget.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A moment/series evaluation was requested too close to a pole.
    #[error("pole proximity: |2 alpha^-s - 1| = {0:.3e}")]
    PoleProximity(f64),

    /// A ratio with a vanishing denominator (e.g. compressibility at
    /// mean connection probability 0 or 1).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The Cantor residue series disagrees with its Monte-Carlo oracle by
    /// more than the calibration tolerance; indicates a transcription fault
    /// rather than noise.
    #[error("calibration mismatch: series/mc ratio {0:.4} outside tolerance")]
    Calibration(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
