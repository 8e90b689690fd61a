use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("duplicate inscription id {0:?}")]
    DuplicateId(String),
    #[error("{}:{line}: expected 54 feature columns, found {found}", path.display())]
    FeatureCount { path: PathBuf, line: u64, found: usize },
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("hypotheses and references differ in length ({hypotheses} vs {references})")]
    LengthMismatch { hypotheses: usize, references: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot detokenize: sequence starts with suffix token {0:?}")]
    DanglingSuffix(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{stage} failed in run {run}: {source}")]
    Stage {
        stage: &'static str,
        run: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    /// Wrap an error with the benchmark stage and run index it happened in.
    pub fn in_stage(self, stage: &'static str, run: usize) -> Self {
        Error::Stage {
            stage,
            run,
            source: Box::new(self),
        }
    }
}
