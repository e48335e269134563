use crate::csc::CscData;
use crate::dims::Dims;
use crate::error::{Result, SparseError};
use crate::hybrid::SpMat;
use crate::rbt::encode_index;

/// Inclusive index range `first ..= last`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub first: usize,
    pub last: usize,
}

impl Span {
    pub fn new(first: usize, last: usize) -> Result<Self> {
        if first > last {
            return Err(SparseError::InvalidShape {
                op: "span",
                reason: format!("first {first} exceeds last {last}"),
            });
        }
        Ok(Span { first, last })
    }

    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check(&self, n: usize, what: &str) -> Result<()> {
        if self.first <= self.last && self.last < n {
            Ok(())
        } else {
            Err(SparseError::InvalidShape {
                op: "submatrix",
                reason: format!("{what} span {}..={} outside 0..{n}", self.first, self.last),
            })
        }
    }
}

/// Copies the window `rows x cols` into a new matrix anchored at the origin.
pub fn submat_extract(a: &SpMat, rows: Span, cols: Span) -> Result<SpMat> {
    rows.check(a.n_rows(), "row")?;
    cols.check(a.n_cols(), "column")?;
    let m = a.csc();
    let dims = Dims::new(rows.len(), cols.len())?;
    let mut values = Vec::new();
    let mut out_rows = Vec::new();
    let mut offsets = Vec::with_capacity(dims.n_cols + 1);
    offsets.push(0);
    for c in cols.first..=cols.last {
        let (mr, mv) = m.column(c);
        let lo = mr.partition_point(|&r| r < rows.first);
        let hi = mr.partition_point(|&r| r <= rows.last);
        out_rows.extend(mr[lo..hi].iter().map(|r| r - rows.first));
        values.extend_from_slice(&mv[lo..hi]);
        offsets.push(values.len());
    }
    Ok(SpMat::from_csc(CscData::from_parts_unchecked(
        dims, offsets, out_rows, values,
    )))
}

/// Replaces the window's contents with `src`: elements inside the window
/// that `src` does not hold are removed. Runs on the tree representation.
pub fn submat_assign(a: &mut SpMat, rows: Span, cols: Span, src: &SpMat) -> Result<()> {
    rows.check(a.n_rows(), "row")?;
    cols.check(a.n_cols(), "column")?;
    let want = Dims::new(rows.len(), cols.len())?;
    if src.dims() != want {
        return Err(SparseError::Shape {
            op: "submat_assign",
            lhs: want,
            rhs: src.dims(),
        });
    }
    let n_rows = a.n_rows();
    let incoming = src.triplets();
    let tree = a.rbt_mut();
    for c in cols.first..=cols.last {
        let lo = encode_index(rows.first, c, n_rows);
        let hi = encode_index(rows.last, c, n_rows);
        for k in tree.range_keys(lo, hi) {
            tree.erase(k)?;
        }
    }
    for t in incoming {
        tree.insert(
            encode_index(t.row + rows.first, t.col + cols.first, n_rows),
            t.value,
        )?;
    }
    Ok(())
}

fn diag_len(d: Dims, k: i64) -> Result<usize> {
    let off = k.unsigned_abs() as usize;
    let ok = k == 0 || (k > 0 && off < d.n_cols) || (k < 0 && off < d.n_rows);
    if !ok {
        return Err(SparseError::InvalidShape {
            op: "diag",
            reason: format!("diagonal {k} outside a {d} matrix"),
        });
    }
    Ok(if k >= 0 {
        d.n_rows.min(d.n_cols - off)
    } else {
        (d.n_rows - off).min(d.n_cols)
    })
}

fn diag_coord(i: usize, k: i64) -> (usize, usize) {
    let off = k.unsigned_abs() as usize;
    if k >= 0 {
        (i, i + off)
    } else {
        (i + off, i)
    }
}

/// Diagonal `k`: positive above the main diagonal, negative below.
pub fn diag_extract(a: &SpMat, k: i64) -> Result<Vec<f64>> {
    let len = diag_len(a.dims(), k)?;
    let m = a.csc();
    Ok((0..len)
        .map(|i| {
            let (r, c) = diag_coord(i, k);
            m.position(r, c).map_or(0.0, |p| m.values()[p])
        })
        .collect())
}

/// Writes every slot of diagonal `k`; zeros remove stored elements.
pub fn diag_assign(a: &mut SpMat, k: i64, v: &[f64]) -> Result<()> {
    let len = diag_len(a.dims(), k)?;
    if v.len() != len {
        return Err(SparseError::InvalidShape {
            op: "diag_assign",
            reason: format!("diagonal {k} has length {len}, got {} values", v.len()),
        });
    }
    for (i, &x) in v.iter().enumerate() {
        let (r, c) = diag_coord(i, k);
        a.set(r, c, x)?;
    }
    Ok(())
}
