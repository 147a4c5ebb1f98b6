use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid game: {}", .0.join("; "))]
    InvalidGame(Vec<String>),

    #[error("choice {choice} out of range for {available} presented actions")]
    ChoiceOutOfRange { choice: usize, available: usize },

    #[error("episode already finished")]
    EpisodeFinished,

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("no tokens to measure")]
    NoTokens,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{available} actions exceed the model's {max_actions} output slots")]
    TooManyActions { available: usize, max_actions: usize },

    #[error("no feasible next actions for a non-terminal transition")]
    EmptyNextActions,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Analysis(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("{path}: {source}")]
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

    /// Whether the error reports bad input content rather than a usage or I/O problem.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::InvalidGame(_) | Error::Config(_) | Error::Checkpoint(_)
        )
    }
}
