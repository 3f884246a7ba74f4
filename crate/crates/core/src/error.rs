use std::path::PathBuf;

use thiserror::Error;

use crate::Pos;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One bad line in a line-delimited input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for RecordError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed line {file}:{line}: {reason}")]
    MalformedLine { file: String, line: usize, reason: String },

    #[error("{} invalid record(s); first: {}", .0.len(), .0[0])]
    Records(Vec<RecordError>),

    #[error("caption `{caption_id}` has no {pos} token")]
    NoSuchPos { caption_id: String, pos: Pos },

    #[error("caption `{caption_id}` has no adjacent pair of perturbable tokens")]
    NoAdjacentPair { caption_id: String },

    #[error("row {row}: unknown caption `{caption_id}` ({pos})")]
    UnknownCaption {
        row: usize,
        caption_id: String,
        pos: String,
    },

    #[error("row {row}: caption `{caption_id}` expects {expected} scores, found {found}")]
    LengthMismatch {
        row: usize,
        caption_id: String,
        expected: usize,
        found: usize,
    },

    #[error("row {row}: caption `{caption_id}` has non-finite score in column {column}")]
    NonFiniteScore {
        row: usize,
        caption_id: String,
        column: usize,
    },

    #[error("no candidate sets to evaluate")]
    EmptyInput,

    #[error("query `{query}` has no ground-truth match")]
    MissingGroundTruth { query: String },

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    DivergenceDetected { epoch: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("I/O error: {0}")]
    Stream(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the environment rather than of the input.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } | Error::Stream(_) => true,
            Error::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }

    /// Short machine-readable tag, used as the CLI error prefix.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedLine { .. } => "malformed-line",
            Error::Records(_) => "record",
            Error::NoSuchPos { .. } => "no-such-pos",
            Error::NoAdjacentPair { .. } => "no-adjacent-pair",
            Error::UnknownCaption { .. } => "unknown-caption",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::NonFiniteScore { .. } => "non-finite-score",
            Error::EmptyInput => "empty-input",
            Error::MissingGroundTruth { .. } => "missing-ground-truth",
            Error::DivergenceDetected { .. } => "divergence",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Io { .. } | Error::Stream(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
