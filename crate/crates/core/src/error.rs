use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the crossing-intention toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown {field} code {code}")]
    UnknownCode { field: &'static str, code: i64 },

    #[error("unsupported frame rate {0} fps (expected 30 or 60)")]
    UnsupportedFrameRate(u32),

    #[error("invalid bounding box: {0}")]
    InvalidBox(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing input variable `{0}`")]
    MissingVariable(&'static str),

    #[error("code {code} out of range for embedding with {cardinality} categories")]
    CodeOutOfRange { code: usize, cardinality: usize },

    #[error("{count} feature rows missing, first: {}", .first.join(", "))]
    MissingFeatures { count: usize, first: Vec<String> },

    #[error("non-finite gradient in parameter `{0}`")]
    NonFiniteGradient(String),

    #[error("feature store: {0}")]
    Store(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(
        "t = {t} outside the window bounds [{lo}, {hi}] (need N past frames and M future frames)"
    )]
    WindowBounds { t: usize, lo: usize, hi: i64 },

    #[error("training diverged at epoch {epoch} (non-finite loss or gradient)")]
    Diverged {
        epoch: usize,
        history: Box<crate::optim::TrainHistory>,
    },

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the filesystem rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
