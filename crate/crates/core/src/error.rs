use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch for {what}: expected {expected}, found {found}")]
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("covariance error: {0}")]
    Covariance(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("numerical failure after {iterations} iterations: {message}")]
    Numerical { message: String, iterations: usize },

    #[error("importance ratios underflowed: {0}")]
    Underflow(String),

    #[error("invalid sampler state: {0}")]
    InvalidState(String),

    #[error(
        "population control failed at generation {generation} after {attempts} attempts \
         (sizes tried: {sizes:?})"
    )]
    ControlFailure {
        generation: usize,
        attempts: usize,
        sizes: Vec<usize>,
    },

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn shape(what: &'static str, expected: usize, found: usize) -> Self {
        Error::Shape {
            what,
            expected,
            found,
        }
    }
}
