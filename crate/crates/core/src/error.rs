use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time grid: {0}")]
    Grid(String),

    #[error("invalid path: {0}")]
    Path(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid boundary: {0}")]
    Boundary(String),

    #[error("separation violated: inf(R - L) = {alpha:e} must exceed {required:e}")]
    Separation { alpha: f64, required: f64 },

    #[error("envelope order violated at index {index}: Phi - Psi = {gap:e}")]
    EnvelopeOrder { index: usize, gap: f64 },

    #[error("schedule inconsistent with envelopes: {0}")]
    Consistency(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    RootNotConverged { iterations: usize, residual: f64 },

    #[error("coupled fixed point did not converge after {sweeps} sweeps (residual {residual:e})")]
    FixpointNotConverged { sweeps: usize, residual: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numeric failures (as opposed to rejected inputs).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::RootNotConverged { .. }
                | Error::FixpointNotConverged { .. }
                | Error::EnvelopeOrder { .. }
                | Error::Consistency(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
