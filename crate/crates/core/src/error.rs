use std::path::PathBuf;

use thiserror::Error;

use crate::solution::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("instance truncated: declared {declared} nodes, found {found}")]
    Truncated { declared: usize, found: usize },

    #[error("instance too small: {0} node(s), at least 2 required")]
    InstanceTooSmall(usize),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("node index {index} out of range for {len} nodes")]
    OutOfBounds { index: usize, len: usize },

    #[error("infeasible chromosome: {0}")]
    Infeasible(Violation),

    #[error("invalid chromosome: {0}")]
    InvalidChromosome(String),

    #[error("{n} nodes exceeds the limit of {limit} for {what}")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("roulette wheel is empty: no positive scores")]
    EmptyWheel,

    #[error("population is empty")]
    EmptyPopulation,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("optimal makespan is zero; gap undefined")]
    ZeroOptimum,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
