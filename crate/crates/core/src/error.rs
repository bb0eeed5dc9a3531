use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("attribute dimension mismatch for label `{label}`: expected {expected}, got {got}")]
    DimensionMismatch {
        label: String,
        expected: usize,
        got: usize,
    },

    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("node id {id} out of range (graph has {len} nodes)")]
    NodeOutOfRange { id: usize, len: usize },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("node {0} has no attribute vector")]
    MissingAttributes(usize),

    #[error("missing mandatory column `{0}`")]
    MissingColumn(String),

    #[error("line {line}: {message}")]
    Row { line: u64, message: String },

    #[error("line {line}: value {value} for `{column}` outside [0, 1]")]
    OutOfRange {
        line: u64,
        column: String,
        value: f64,
    },

    #[error("invalid metapath: {0}")]
    MetaPath(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("matrix is not symmetric within tolerance (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semi-definite: min eigenvalue {min_eigenvalue:e} (normalize the kernel)")]
    NotPsd { min_eigenvalue: f64 },

    #[error("kernel evaluation failed for pair ({row}, {col}): {source}")]
    KernelPair {
        row: String,
        col: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by a bad configuration rather than bad data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
