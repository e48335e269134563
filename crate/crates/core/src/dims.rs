use std::fmt;

use crate::error::{Result, SparseError};

/// Matrix shape.
///
/// Either dimension may be zero. The product `n_rows * n_cols` must fit in a
/// `u64`, since it bounds the linearised element index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dims {
    pub n_rows: usize,
    pub n_cols: usize,
}

impl Dims {
    pub fn new(n_rows: usize, n_cols: usize) -> Result<Self> {
        let dims = Dims { n_rows, n_cols };
        dims.n_elem()?;
        Ok(dims)
    }

    /// Total number of logical cells.
    pub fn n_elem(&self) -> Result<u64> {
        (self.n_rows as u64)
            .checked_mul(self.n_cols as u64)
            .ok_or(SparseError::DimensionOverflow {
                n_rows: self.n_rows,
                n_cols: self.n_cols,
            })
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0 || self.n_cols == 0
    }

    pub fn transposed(&self) -> Dims {
        Dims {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
        }
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row < self.n_rows && col < self.n_cols
    }

    pub(crate) fn check(&self, row: usize, col: usize) -> Result<()> {
        if self.contains(row, col) {
            Ok(())
        } else {
            Err(SparseError::CoordinateRange {
                row,
                col,
                dims: *self,
            })
        }
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_rows, self.n_cols)
    }
}

/// A single `(row, col, value)` record, the interchange unit between formats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triplet {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl Triplet {
    pub fn new(row: usize, col: usize, value: f64) -> Self {
        Triplet { row, col, value }
    }
}

impl From<(usize, usize, f64)> for Triplet {
    fn from((row, col, value): (usize, usize, f64)) -> Self {
        Triplet { row, col, value }
    }
}
