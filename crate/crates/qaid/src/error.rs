//! Error type shared across the pipeline.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{path}: line {line}: {msg}")]
    MalformedLine {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("unknown intent {name:?} on line {line}")]
    UnknownIntent { name: String, line: usize },

    #[error("dataset is empty: {path}")]
    EmptyDataset { path: String },

    #[error("intent {intent:?} has {have} examples, need {want}")]
    NotEnoughExamples {
        intent: String,
        have: usize,
        want: usize,
    },

    #[error("corpus produced no tokens")]
    EmptyCorpus,

    #[error("token id {id} out of range (vocab size {vocab_size})")]
    TokenOutOfRange { id: usize, vocab_size: usize },

    #[error("position {pos} out of range (max {max})")]
    PositionOutOfRange { pos: usize, max: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("corrupt file {path}: {msg}")]
    CorruptFile { path: String, msg: String },

    #[error("unsupported format version {found} (expected {expected}) in {path}")]
    UnsupportedVersion {
        path: String,
        found: u32,
        expected: u32,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bad config: {0}")]
    BadConfig(String),

    #[error("non-finite value in {0}; aborting")]
    NonFinite(String),
}

impl Error {
    /// Process exit code classification: 2 = data/input error, 3 = numeric
    /// failure. Usage errors (exit 1) are produced by argument parsing before
    /// an `Error` ever exists.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFinite(_) => 3,
            _ => 2,
        }
    }
}
