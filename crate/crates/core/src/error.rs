use std::io;

use thiserror::Error;

use crate::dims::Dims;

/// Errors produced by matrix construction, kernels, I/O and benchmarks.
#[derive(Debug, Error)]
pub enum SparseError {
    #[error("coordinate ({row}, {col}) out of range for {dims} matrix")]
    CoordinateRange { row: usize, col: usize, dims: Dims },

    #[error("linear index {index} out of range for {dims} matrix")]
    IndexRange { index: u64, dims: Dims },

    #[error("shape mismatch in {op}: {lhs} vs {rhs}")]
    Shape {
        op: &'static str,
        lhs: Dims,
        rhs: Dims,
    },

    #[error("invalid shape for {op}: {reason}")]
    InvalidShape { op: &'static str, reason: String },

    #[error("dimensions {n_rows}x{n_cols} overflow the index type")]
    DimensionOverflow { n_rows: usize, n_cols: usize },

    #[error("density is undefined for a {0} matrix")]
    UndefinedDimension(Dims),

    #[error("corrupt storage: {0}")]
    Corruption(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported norm {0} for matrix argument")]
    UnsupportedNorm(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("line {line}: duplicate entry at ({row}, {col})")]
    Duplicate { line: usize, row: usize, col: usize },

    #[error("benchmark outputs disagree: {0}")]
    Correctness(String),

    #[error("infeasible benchmark configuration: {0}")]
    Resource(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = SparseError> = std::result::Result<T, E>;
