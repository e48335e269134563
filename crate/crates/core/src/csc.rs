//! Compressed Sparse Column storage.
//!
//! A matrix with `N` stored elements is held in three contiguous arrays:
//! `values` (length `N`), `row_indices` (length `N`) and `col_offsets`
//! (length `n_cols + 1`). The elements of column `i` occupy the half-open
//! range `col_offsets[i] .. col_offsets[i + 1]` of the first two arrays.
//!
//! Every `CscData` handed out by this module is canonical: row indices are
//! strictly increasing within each column and no stored value is `0.0`.

use crate::dims::{Dims, Triplet};
use crate::error::{Result, SparseError};

/// How repeated coordinates are combined during a batch build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DupPolicy {
    #[default]
    Sum,
    /// The last occurrence in input order wins.
    LastWins,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CscData {
    dims: Dims,
    values: Vec<f64>,
    row_indices: Vec<usize>,
    col_offsets: Vec<usize>,
}

impl CscData {
    /// An empty matrix with no stored elements.
    pub fn empty(dims: Dims) -> Self {
        CscData {
            dims,
            values: Vec::new(),
            row_indices: Vec::new(),
            col_offsets: vec![0; dims.n_cols + 1],
        }
    }

    /// Batch construction: sorts the triplets into column-major order and
    /// combines duplicates according to `policy`. Entries whose final value
    /// is exactly zero are dropped.
    pub fn from_triplets(dims: Dims, triplets: &[Triplet], policy: DupPolicy) -> Result<Self> {
        dims.n_elem()?;
        for t in triplets {
            dims.check(t.row, t.col)?;
        }

        // stable counting sort on column
        let mut offsets = vec![0usize; dims.n_cols + 1];
        for t in triplets {
            offsets[t.col + 1] += 1;
        }
        for c in 0..dims.n_cols {
            offsets[c + 1] += offsets[c];
        }
        let mut next = offsets.clone();
        let mut buf = vec![(0usize, 0.0f64); triplets.len()];
        for t in triplets {
            let slot = &mut next[t.col];
            buf[*slot] = (t.row, t.value);
            *slot += 1;
        }

        let mut values = Vec::with_capacity(triplets.len());
        let mut row_indices = Vec::with_capacity(triplets.len());
        let mut col_offsets = Vec::with_capacity(dims.n_cols + 1);
        col_offsets.push(0);
        for c in 0..dims.n_cols {
            let column = &mut buf[offsets[c]..offsets[c + 1]];
            column.sort_by_key(|&(r, _)| r);
            let mut k = 0;
            while k < column.len() {
                let row = column[k].0;
                let mut acc = column[k].1;
                k += 1;
                while k < column.len() && column[k].0 == row {
                    match policy {
                        DupPolicy::Sum => acc += column[k].1,
                        DupPolicy::LastWins => acc = column[k].1,
                    }
                    k += 1;
                }
                if acc != 0.0 {
                    row_indices.push(row);
                    values.push(acc);
                }
            }
            col_offsets.push(values.len());
        }

        Ok(CscData {
            dims,
            values,
            row_indices,
            col_offsets,
        })
    }

    /// Wraps raw arrays after checking every canonical-form invariant.
    pub fn from_parts(
        dims: Dims,
        col_offsets: Vec<usize>,
        row_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let m = CscData {
            dims,
            values,
            row_indices,
            col_offsets,
        };
        m.validate()?;
        Ok(m)
    }

    /// Kernels that build their output in canonical order use this directly.
    pub(crate) fn from_parts_unchecked(
        dims: Dims,
        col_offsets: Vec<usize>,
        row_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        let m = CscData {
            dims,
            values,
            row_indices,
            col_offsets,
        };
        debug_assert!(m.validate().is_ok(), "{:?}", m.validate());
        m
    }

    /// Checks the canonical-form invariants.
    pub fn validate(&self) -> Result<()> {
        let corrupt = |msg: String| Err(SparseError::Corruption(msg));
        self.dims.n_elem()?;
        let n = self.values.len();
        if self.row_indices.len() != n {
            return corrupt(format!(
                "row_indices has {} entries, values has {n}",
                self.row_indices.len()
            ));
        }
        if self.col_offsets.len() != self.dims.n_cols + 1 {
            return corrupt(format!(
                "col_offsets has {} entries, expected {}",
                self.col_offsets.len(),
                self.dims.n_cols + 1
            ));
        }
        if self.col_offsets[0] != 0 || self.col_offsets[self.dims.n_cols] != n {
            return corrupt("col_offsets must start at 0 and end at N".into());
        }
        for c in 0..self.dims.n_cols {
            let (lo, hi) = (self.col_offsets[c], self.col_offsets[c + 1]);
            if lo > hi {
                return corrupt(format!("col_offsets decreases at column {c}"));
            }
            let rows = &self.row_indices[lo..hi];
            if let Some(&r) = rows.iter().find(|&&r| r >= self.dims.n_rows) {
                return corrupt(format!("row index {r} in column {c} out of range"));
            }
            if rows.windows(2).any(|w| w[0] >= w[1]) {
                return corrupt(format!("rows of column {c} not strictly increasing"));
            }
        }
        if let Some(k) = self.values.iter().position(|&v| v == 0.0) {
            return corrupt(format!("explicit zero stored at position {k}"));
        }
        Ok(())
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row_indices(&self) -> &[usize] {
        &self.row_indices
    }

    pub fn col_offsets(&self) -> &[usize] {
        &self.col_offsets
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Row indices and values of one column. `col` must be in range.
    #[inline]
    pub fn column(&self, col: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.col_offsets[col], self.col_offsets[col + 1]);
        (&self.row_indices[lo..hi], &self.values[lo..hi])
    }

    /// Position of `(row, col)` in the value array, if stored.
    #[inline]
    pub(crate) fn position(&self, row: usize, col: usize) -> Option<usize> {
        let lo = self.col_offsets[col];
        let hi = self.col_offsets[col + 1];
        self.row_indices[lo..hi]
            .binary_search(&row)
            .ok()
            .map(|k| lo + k)
    }

    /// Element lookup: jump to the column, then binary search its rows.
    pub fn get(&self, row: usize, col: usize) -> Result<f64> {
        self.dims.check(row, col)?;
        Ok(self.position(row, col).map_or(0.0, |k| self.values[k]))
    }

    pub fn col_count(&self, col: usize) -> Result<usize> {
        if col >= self.dims.n_cols {
            return Err(SparseError::CoordinateRange {
                row: 0,
                col,
                dims: self.dims,
            });
        }
        Ok(self.col_offsets[col + 1] - self.col_offsets[col])
    }

    /// All stored elements in column-major order.
    pub fn iter(&self) -> impl Iterator<Item = Triplet> + '_ {
        (0..self.dims.n_cols).flat_map(move |c| {
            let (rows, vals) = self.column(c);
            rows.iter()
                .zip(vals)
                .map(move |(&r, &v)| Triplet::new(r, c, v))
        })
    }

    pub fn to_triplets(&self) -> Vec<Triplet> {
        self.iter().collect()
    }

    /// Single-element insertion the expensive way: three fresh arrays are
    /// allocated, the old data is copied around the new slot and the old
    /// arrays are released. Overwriting a stored element happens in place.
    /// Inserting `0.0` removes the element if present.
    pub fn insert_naive(&mut self, t: Triplet) -> Result<()> {
        self.dims.check(t.row, t.col)?;
        let lo = self.col_offsets[t.col];
        let hi = self.col_offsets[t.col + 1];
        let found = self.row_indices[lo..hi].binary_search(&t.row);
        let n = self.values.len();
        match found {
            Ok(k) if t.value != 0.0 => {
                self.values[lo + k] = t.value;
            }
            Ok(k) => {
                let pos = lo + k;
                let mut values = Vec::with_capacity(n - 1);
                values.extend_from_slice(&self.values[..pos]);
                values.extend_from_slice(&self.values[pos + 1..]);
                let mut rows = Vec::with_capacity(n - 1);
                rows.extend_from_slice(&self.row_indices[..pos]);
                rows.extend_from_slice(&self.row_indices[pos + 1..]);
                let mut offsets = Vec::with_capacity(self.col_offsets.len());
                offsets.extend_from_slice(&self.col_offsets[..=t.col]);
                offsets.extend(self.col_offsets[t.col + 1..].iter().map(|o| o - 1));
                self.values = values;
                self.row_indices = rows;
                self.col_offsets = offsets;
            }
            Err(_) if t.value == 0.0 => {}
            Err(k) => {
                let pos = lo + k;
                let mut values = Vec::with_capacity(n + 1);
                values.extend_from_slice(&self.values[..pos]);
                values.push(t.value);
                values.extend_from_slice(&self.values[pos..]);
                let mut rows = Vec::with_capacity(n + 1);
                rows.extend_from_slice(&self.row_indices[..pos]);
                rows.push(t.row);
                rows.extend_from_slice(&self.row_indices[pos..]);
                let mut offsets = Vec::with_capacity(self.col_offsets.len());
                offsets.extend_from_slice(&self.col_offsets[..=t.col]);
                offsets.extend(self.col_offsets[t.col + 1..].iter().map(|o| o + 1));
                self.values = values;
                self.row_indices = rows;
                self.col_offsets = offsets;
            }
        }
        Ok(())
    }
}

/// CSC arrays with reserved headroom.
///
/// The value and row arrays grow by doubling when full, so appending an
/// element past every existing one costs no reallocation and no shifting.
/// Out-of-order inserts still shift the tail of the arrays.
#[derive(Debug, Clone)]
pub struct OversizedCsc {
    inner: CscData,
}

impl OversizedCsc {
    pub const MIN_RESERVE: usize = 16;

    pub fn with_capacity(dims: Dims, reserve: usize) -> Self {
        let cap = reserve.max(Self::MIN_RESERVE);
        let mut inner = CscData::empty(dims);
        inner.values.reserve_exact(cap);
        inner.row_indices.reserve_exact(cap);
        OversizedCsc { inner }
    }

    pub fn capacity(&self) -> usize {
        self.inner
            .values
            .capacity()
            .min(self.inner.row_indices.capacity())
    }

    fn grow(&mut self) {
        let cap = self.capacity().max(Self::MIN_RESERVE);
        let len = self.inner.values.len();
        if len == cap {
            self.inner.values.reserve_exact(cap);
            self.inner.row_indices.reserve_exact(cap);
        }
    }

    pub fn insert(&mut self, t: Triplet) -> Result<()> {
        let m = &mut self.inner;
        m.dims.check(t.row, t.col)?;
        let lo = m.col_offsets[t.col];
        let hi = m.col_offsets[t.col + 1];
        // fast check for the append case: past every stored row in the column
        let found = if hi > lo && m.row_indices[hi - 1] < t.row {
            Err(hi - lo)
        } else {
            m.row_indices[lo..hi].binary_search(&t.row)
        };
        match found {
            Ok(k) if t.value != 0.0 => m.values[lo + k] = t.value,
            Ok(k) => {
                m.values.remove(lo + k);
                m.row_indices.remove(lo + k);
                m.col_offsets[t.col + 1..].iter_mut().for_each(|o| *o -= 1);
            }
            Err(_) if t.value == 0.0 => {}
            Err(k) => {
                self.grow();
                let m = &mut self.inner;
                let pos = lo + k;
                if pos == m.values.len() {
                    m.values.push(t.value);
                    m.row_indices.push(t.row);
                } else {
                    m.values.insert(pos, t.value);
                    m.row_indices.insert(pos, t.row);
                }
                m.col_offsets[t.col + 1..].iter_mut().for_each(|o| *o += 1);
            }
        }
        Ok(())
    }

    pub fn as_csc(&self) -> &CscData {
        &self.inner
    }

    /// Releases the headroom.
    pub fn into_csc(mut self) -> CscData {
        self.inner.values.shrink_to_fit();
        self.inner.row_indices.shrink_to_fit();
        self.inner
    }
}
