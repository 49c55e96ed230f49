use std::path::PathBuf;

use dperf_core::{EstimateError, EventError, ExactError, FamilyError, HeuristicError, NetworkError, RegionError};
use thiserror::Error;

/// Parse failure in one of the text or JSON input formats.
#[derive(Debug, Error)]
#[error("{source_name}:{line}: {message}")]
pub struct ParseError {
    pub source_name: String,
    /// 1-based; 0 when the whole document is at fault.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid network: {0}")]
    Network(#[from] NetworkError),
    #[error("invalid regions: {0}")]
    Region(#[from] RegionError),
    #[error("invalid families: {0}")]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Event(#[from] EventError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit status: 2 for bad input, 3 for IO, 4 for failures
    /// during computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::Network(_)
            | Error::Region(_)
            | Error::Family(_)
            | Error::Heuristic(_)
            | Error::Invalid(_)
            | Error::Estimate(EstimateError::NoSamples)
            | Error::Event(EventError::OmegaTooLarge { .. }) => 2,
            Error::Io { .. } => 3,
            Error::Event(_) | Error::Estimate(_) | Error::Exact(_) => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
