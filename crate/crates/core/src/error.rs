//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} columns, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("score vector is empty")]
    EmptyScores,

    #[error("batch size mismatch between score statistics: current {curr} vs last {last}")]
    UnequalBatchSizes { curr: usize, last: usize },

    #[error("model pool is empty")]
    EmptyPool,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("representation similarity needs at least 2 rows, got {0}")]
    TooFewRows(usize),

    #[error("latent representation is zero after centering; similarity undefined")]
    DegenerateRepresentation,

    #[error("cannot merge models with different architectures: {0:?} vs {1:?}")]
    ArchitectureMismatch(Vec<usize>, Vec<usize>),

    #[error("training diverged: non-finite loss at epoch {epoch}, mini-batch {minibatch}")]
    NumericDivergence { epoch: usize, minibatch: usize },

    #[error("labels contain a single class; AUC is undefined")]
    DegenerateLabels,

    #[error("stream must yield at least 2 batches")]
    StreamTooShort,

    #[error("parse error at data row {row}, column {column}: {message}")]
    CsvParse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("label column {0:?} not found in header")]
    MissingLabelColumn(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
