use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by graph construction, ingestion, and model selection.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs whose sizes do not agree (labeling length vs. node count, matrix dimensions).
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A value outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("failed to read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// The symmetric eigensolver did not converge within its iteration budget.
    #[error("eigensolver did not converge for n = {n}")]
    NoConvergence { n: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}
