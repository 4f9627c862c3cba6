use std::path::PathBuf;

use thiserror::Error;

use crate::angular::ConstraintReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: non-positive price {price}")]
    NonPositivePrice {
        path: PathBuf,
        line: usize,
        price: f64,
    },

    #[error("{path}:{line}: duplicate date {date}")]
    DuplicateDate {
        path: PathBuf,
        line: usize,
        date: chrono::NaiveDate,
    },

    #[error("{0}: file contains no data rows")]
    EmptyFile(PathBuf),

    #[error("series too short: need at least {required} observations, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("no common dates between the two series")]
    EmptyIntersection,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid Bernstein weights: {0}")]
    InvalidWeights(ConstraintReport),

    #[error("angular density is not positive at w = {angle}")]
    DensityUnderflow { angle: f64 },

    #[error("optimizer did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    Quadrature { tolerance: f64, estimate: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DensityUnderflow { .. }
                | Error::NonConvergence { .. }
                | Error::Quadrature { .. }
                | Error::Numerical(_)
        )
    }
}
