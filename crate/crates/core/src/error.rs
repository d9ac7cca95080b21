use std::io;

use thiserror::Error;

/// Errors raised by the linear-algebra layer, the smoothing transforms and the
/// experiment harness.
///
/// Solver breakdowns are *not* errors: they are recorded in the
/// [`ConvergenceRecord`](crate::solvers::ConvergenceRecord) of the run.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("entry ({row}, {col}) out of range for a {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },

    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("matrix must have at least one row")]
    EmptyMatrix,

    #[error("malformed Matrix Market input (line {line}): {reason}")]
    MatrixMarket { line: usize, reason: String },

    #[error("unsupported Matrix Market field `{0}` (only `real` is supported)")]
    UnsupportedField(String),

    #[error("smoothing parameter breakdown at history index {index}")]
    EtaBreakdown { index: usize },

    #[error("history is empty")]
    EmptyHistory,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
