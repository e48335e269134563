use crate::csc::CscData;
use crate::dims::Dims;
use crate::error::{Result, SparseError};
use crate::hybrid::SpMat;

/// Counting-sort transpose: histogram the rows, prefix-sum into column
/// offsets of the result, then scatter. Linear in `N + n_rows + n_cols`.
pub(crate) fn transpose_csc(a: &CscData) -> CscData {
    let dims = a.dims().transposed();
    let mut offsets = vec![0usize; dims.n_cols + 1];
    for &r in a.row_indices() {
        offsets[r + 1] += 1;
    }
    for c in 0..dims.n_cols {
        offsets[c + 1] += offsets[c];
    }
    let mut next = offsets.clone();
    let mut rows = vec![0usize; a.nnz()];
    let mut values = vec![0.0f64; a.nnz()];
    for c in 0..a.dims().n_cols {
        let (ar, av) = a.column(c);
        for (&r, &v) in ar.iter().zip(av) {
            let slot = next[r];
            rows[slot] = c;
            values[slot] = v;
            next[r] += 1;
        }
    }
    CscData::from_parts_unchecked(dims, offsets, rows, values)
}

pub fn transpose(a: &SpMat) -> SpMat {
    SpMat::from_csc(transpose_csc(&a.csc()))
}

fn checked_dims(op: &'static str, n_rows: Option<usize>, n_cols: Option<usize>) -> Result<Dims> {
    match (n_rows, n_cols) {
        (Some(r), Some(c)) => Dims::new(r, c),
        _ => Err(SparseError::InvalidShape {
            op,
            reason: "result dimensions overflow".into(),
        }),
    }
}

/// Kronecker product: block `(ra, ca)` of the result is `a[ra, ca] * b`.
pub fn kron(a: &SpMat, b: &SpMat) -> Result<SpMat> {
    let (da, db) = (a.dims(), b.dims());
    let dims = checked_dims(
        "kron",
        da.n_rows.checked_mul(db.n_rows),
        da.n_cols.checked_mul(db.n_cols),
    )?;
    let (ca, cb) = (a.csc(), b.csc());
    let cap = ca.nnz().saturating_mul(cb.nnz());
    let mut values = Vec::with_capacity(cap);
    let mut rows = Vec::with_capacity(cap);
    let mut offsets = Vec::with_capacity(dims.n_cols + 1);
    offsets.push(0);
    for ja in 0..da.n_cols {
        let (ar, av) = ca.column(ja);
        for jb in 0..db.n_cols {
            let (br, bv) = cb.column(jb);
            for (&ra, &x) in ar.iter().zip(av) {
                for (&rb, &y) in br.iter().zip(bv) {
                    let v = x * y;
                    if v != 0.0 {
                        rows.push(ra * db.n_rows + rb);
                        values.push(v);
                    }
                }
            }
            offsets.push(values.len());
        }
    }
    Ok(SpMat::from_csc(CscData::from_parts_unchecked(
        dims, offsets, rows, values,
    )))
}

/// Tiles `a` into a `reps_r x reps_c` block grid.
pub fn repmat(a: &SpMat, reps_r: usize, reps_c: usize) -> Result<SpMat> {
    if reps_r == 0 || reps_c == 0 {
        return Err(SparseError::InvalidShape {
            op: "repmat",
            reason: format!("replication counts must be positive, got {reps_r}x{reps_c}"),
        });
    }
    let d = a.dims();
    let dims = checked_dims(
        "repmat",
        d.n_rows.checked_mul(reps_r),
        d.n_cols.checked_mul(reps_c),
    )?;
    let m = a.csc();
    let cap = m.nnz().saturating_mul(reps_r).saturating_mul(reps_c);
    let mut values = Vec::with_capacity(cap);
    let mut rows = Vec::with_capacity(cap);
    let mut offsets = Vec::with_capacity(dims.n_cols + 1);
    offsets.push(0);
    for _ in 0..reps_c {
        for c in 0..d.n_cols {
            let (mr, mv) = m.column(c);
            for t in 0..reps_r {
                let base = t * d.n_rows;
                rows.extend(mr.iter().map(|r| base + r));
                values.extend_from_slice(mv);
            }
            offsets.push(values.len());
        }
    }
    Ok(SpMat::from_csc(CscData::from_parts_unchecked(
        dims, offsets, rows, values,
    )))
}
