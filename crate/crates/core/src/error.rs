use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("width mismatch: expected {expected}, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },

    #[error("width {0} is outside the supported range 1..=64")]
    UnsupportedWidth(usize),

    #[error("invalid symbol {0:?} in condition or situation")]
    InvalidSymbol(char),

    #[error("invalid action index {action} (action count {count})")]
    InvalidAction { action: usize, count: usize },

    #[error("no classifier in the match set advocates action {0}")]
    MissingAction(usize),

    #[error("match set is empty")]
    EmptyMatchSet,

    #[error("step called on a finished game; call reset first")]
    GameOver,

    #[error("value {value} does not fit in {bits} bits")]
    EncodingOverflow { value: usize, bits: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("ragged input: {0}")]
    Ragged(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
