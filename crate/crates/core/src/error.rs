use thiserror::Error;

/// Errors produced while building complexes, parsing files or reducing matrices.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("column {column} has row {row} which is not above the diagonal")]
    NotUpperTriangular { column: usize, row: usize },
    #[error("column {column} rows are not strictly ascending")]
    UnsortedColumn { column: usize },
    #[error("column {column} of dimension {dim} has row {row} of dimension {row_dim}")]
    GradingMismatch {
        column: usize,
        dim: usize,
        row: usize,
        row_dim: usize,
    },
    #[error("cannot add column {src} into column {dst}: additions must go left to right")]
    IllegalAddition { src: usize, dst: usize },
    #[error("column index {index} out of range 1..={m}")]
    ColumnOutOfRange { index: usize, m: usize },
    #[error("low vector is not injective: columns {first} and {second} share low {row}")]
    NotInjective {
        row: usize,
        first: usize,
        second: usize,
    },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("estimate misses essential index {0}")]
    EstimateMissesTruth(usize),
    #[error("unknown ensemble `{0}`")]
    UnknownEnsemble(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
