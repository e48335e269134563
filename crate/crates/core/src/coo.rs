//! Coordinate list storage as three parallel arrays.
//!
//! Coordinates are stored explicitly for every element, which makes bulk
//! rewrites of positions (circular shifts and similar) a plain pass over the
//! `rows` and `cols` arrays.

use crate::csc::{CscData, DupPolicy};
use crate::dims::{Dims, Triplet};
use crate::error::{Result, SparseError};

#[derive(Debug, Clone, PartialEq)]
pub struct CooData {
    dims: Dims,
    rows: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl CooData {
    pub fn empty(dims: Dims) -> Self {
        CooData {
            dims,
            rows: Vec::new(),
            cols: Vec::new(),
            values: Vec::new(),
        }
    }

    /// An empty list whose arrays reserve room for `reserve` elements.
    pub fn with_capacity(dims: Dims, reserve: usize) -> Self {
        let cap = reserve.max(16);
        CooData {
            dims,
            rows: Vec::with_capacity(cap),
            cols: Vec::with_capacity(cap),
            values: Vec::with_capacity(cap),
        }
    }

    /// Raw arrays in any order. Range is not checked until [`to_csc`](Self::to_csc).
    pub fn from_parts(
        dims: Dims,
        rows: Vec<usize>,
        cols: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if rows.len() != cols.len() || rows.len() != values.len() {
            return Err(SparseError::Corruption(format!(
                "array lengths differ: rows {}, cols {}, values {}",
                rows.len(),
                cols.len(),
                values.len()
            )));
        }
        Ok(CooData {
            dims,
            rows,
            cols,
            values,
        })
    }

    pub fn from_csc(m: &CscData) -> Self {
        let n = m.nnz();
        let mut cols = Vec::with_capacity(n);
        for c in 0..m.dims().n_cols {
            let count = m.col_offsets()[c + 1] - m.col_offsets()[c];
            cols.extend(std::iter::repeat_n(c, count));
        }
        CooData {
            dims: m.dims(),
            rows: m.row_indices().to_vec(),
            cols,
            values: m.values().to_vec(),
        }
    }

    /// Canonical CSC from any ordering; duplicates are summed and zeros pruned.
    pub fn to_csc(&self) -> Result<CscData> {
        if let Some(k) = (0..self.nnz()).find(|&k| !self.dims.contains(self.rows[k], self.cols[k]))
        {
            return Err(SparseError::Corruption(format!(
                "stored coordinate ({}, {}) outside {} matrix",
                self.rows[k], self.cols[k], self.dims
            )));
        }
        CscData::from_triplets(self.dims, &self.to_triplets(), DupPolicy::Sum)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = Triplet> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .zip(&self.values)
            .map(|((&r, &c), &v)| Triplet::new(r, c, v))
    }

    pub fn to_triplets(&self) -> Vec<Triplet> {
        self.iter().collect()
    }

    /// Circular shift of every coordinate. Shifts of any sign and magnitude
    /// are reduced modulo the matrix dimensions. The result is generally not
    /// in column-major order; call [`canonicalise`](Self::canonicalise) after.
    pub fn shift(&mut self, row_shift: i64, col_shift: i64) {
        fn wrap(shift: i64, n: usize) -> usize {
            if n == 0 {
                0
            } else {
                shift.rem_euclid(n as i64) as usize
            }
        }
        let dr = wrap(row_shift, self.dims.n_rows);
        let dc = wrap(col_shift, self.dims.n_cols);
        let (nr, nc) = (self.dims.n_rows, self.dims.n_cols);
        if dr != 0 {
            self.rows.iter_mut().for_each(|r| *r = (*r + dr) % nr);
        }
        if dc != 0 {
            self.cols.iter_mut().for_each(|c| *c = (*c + dc) % nc);
        }
    }

    /// Restores column-major order. Duplicates are summed and zeros dropped.
    pub fn canonicalise(&mut self) {
        let already = (1..self.nnz())
            .all(|k| (self.cols[k - 1], self.rows[k - 1]) < (self.cols[k], self.rows[k]))
            && self.values.iter().all(|&v| v != 0.0);
        if already {
            return;
        }
        let mut order: Vec<usize> = (0..self.nnz()).collect();
        order.sort_by_key(|&k| (self.cols[k], self.rows[k]));
        let mut rows = Vec::with_capacity(order.len());
        let mut cols = Vec::with_capacity(order.len());
        let mut values: Vec<f64> = Vec::with_capacity(order.len());
        for k in order {
            let (r, c, v) = (self.rows[k], self.cols[k], self.values[k]);
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                values.push(v);
            }
        }
        let mut k = 0;
        for j in 0..values.len() {
            if values[j] != 0.0 {
                rows[k] = rows[j];
                cols[k] = cols[j];
                values[k] = values[j];
                k += 1;
            }
        }
        rows.truncate(k);
        cols.truncate(k);
        values.truncate(k);
        self.rows = rows;
        self.cols = cols;
        self.values = values;
    }

    /// Element insertion into a canonical list: binary search on the
    /// column-major position, then shift the tail of all three arrays.
    pub fn insert(&mut self, t: Triplet) -> Result<()> {
        self.dims.check(t.row, t.col)?;
        let key = (t.col, t.row);
        let n = self.nnz();
        let found = if n == 0 || (self.cols[n - 1], self.rows[n - 1]) < key {
            Err(n)
        } else {
            let mut lo = 0;
            let mut hi = n;
            while lo < hi {
                let mid = (lo + hi) / 2;
                if (self.cols[mid], self.rows[mid]) < key {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            if lo < n && (self.cols[lo], self.rows[lo]) == key {
                Ok(lo)
            } else {
                Err(lo)
            }
        };
        match found {
            Ok(k) if t.value != 0.0 => self.values[k] = t.value,
            Ok(k) => {
                self.rows.remove(k);
                self.cols.remove(k);
                self.values.remove(k);
            }
            Err(_) if t.value == 0.0 => {}
            Err(k) => {
                self.rows.insert(k, t.row);
                self.cols.insert(k, t.col);
                self.values.insert(k, t.value);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> CscData {
        let t = [(0, 0, 1.0), (2, 1, 3.0), (1, 1, 2.0)].map(Triplet::from);
        CscData::from_triplets(Dims::new(3, 2).unwrap(), &t, DupPolicy::Sum).unwrap()
    }

    #[test]
    fn expand_column_offsets() {
        let coo = CooData::from_csc(&example1());
        assert_eq!(coo.rows(), &[0, 1, 2]);
        assert_eq!(coo.cols(), &[0, 1, 1]);
        assert_eq!(coo.values(), &[1.0, 2.0, 3.0]);

        let e = CooData::from_csc(&CscData::empty(Dims::new(3, 3).unwrap()));
        assert_eq!(e.nnz(), 0);
    }

    #[test]
    fn unsorted_to_csc() {
        let coo = CooData::from_parts(
            Dims::new(2, 1).unwrap(),
            vec![1, 0],
            vec![0, 0],
            vec![2.0, 1.0],
        )
        .unwrap();
        let m = coo.to_csc().unwrap();
        assert_eq!(m.col_offsets(), &[0, 2]);
        assert_eq!(m.row_indices(), &[0, 1]);
        assert_eq!(m.values(), &[1.0, 2.0]);

        let empty = CooData::empty(Dims::new(5, 5).unwrap()).to_csc().unwrap();
        assert_eq!(empty, CscData::empty(Dims::new(5, 5).unwrap()));
    }

    #[test]
    fn corrupt_coordinate_rejected() {
        let coo =
            CooData::from_parts(Dims::new(2, 2).unwrap(), vec![2], vec![0], vec![1.0]).unwrap();
        assert!(matches!(coo.to_csc(), Err(SparseError::Corruption(_))));
        assert!(CooData::from_parts(Dims::new(2, 2).unwrap(), vec![0], vec![], vec![1.0]).is_err());
    }

    #[test]
    fn shift_single_element() {
        let m = CscData::from_triplets(
            Dims::new(3, 3).unwrap(),
            &[Triplet::new(0, 0, 7.0)],
            DupPolicy::Sum,
        )
        .unwrap();
        let mut coo = CooData::from_csc(&m);
        coo.shift(1, 2);
        assert_eq!(coo.to_triplets(), vec![Triplet::new(1, 2, 7.0)]);
    }

    #[test]
    fn shift_wraps_and_identity() {
        let m = example1();
        let base = CooData::from_csc(&m);
        for (dr, dc) in [(0, 0), (3, 2), (-3, -2), (300, 20)] {
            let mut coo = base.clone();
            coo.shift(dr, dc);
            coo.canonicalise();
            assert_eq!(coo, base);
        }
        let mut coo = base.clone();
        coo.shift(-1, 1);
        assert_eq!(coo.rows(), &[2, 0, 1]);
        assert_eq!(coo.cols(), &[1, 0, 0]);
        coo.canonicalise();
        assert_eq!(coo.to_csc().unwrap().get(2, 1).unwrap(), 1.0);
    }

    #[test]
    fn sorted_insert() {
        let mut coo = CooData::with_capacity(Dims::new(3, 3).unwrap(), 4);
        for (r, c) in [(2, 2), (0, 0), (1, 2), (2, 0)] {
            coo.insert(Triplet::new(r, c, 1.0)).unwrap();
        }
        assert_eq!(coo.cols(), &[0, 0, 2, 2]);
        assert_eq!(coo.rows(), &[0, 2, 1, 2]);
        coo.insert(Triplet::new(1, 2, 0.0)).unwrap();
        assert_eq!(coo.nnz(), 3);
    }
}
