use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("requested {requested} clusters but only {distinct} distinct points are available")]
    InsufficientPoints { requested: usize, distinct: usize },

    #[error("elbow curve needs at least 3 entries, got {0}")]
    TooFewEntries(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("manifest {}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },

    #[error("duplicate prediction key ({sequence}, {stamp})")]
    DuplicateKey { sequence: String, stamp: i64 },

    #[error("prediction/truth keys do not align: {0}")]
    KeyMismatch(String),

    #[error("invalid scene spec: {0}")]
    Spec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn manifest(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Manifest {
            path: path.into(),
            message: message.into(),
        }
    }
}
