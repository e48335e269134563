use crate::csc::CscData;
use crate::dims::Dims;
use crate::error::{Result, SparseError};
use crate::hybrid::SpMat;

pub(crate) fn same_dims(op: &'static str, a: Dims, b: Dims) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(SparseError::Shape { op, lhs: a, rhs: b })
    }
}

/// `alpha * a + beta * b` by a merged two-pointer walk over each column.
/// Exact zeros in the result are pruned.
pub(crate) fn add_scaled_csc(a: &CscData, b: &CscData, alpha: f64, beta: f64) -> CscData {
    fn push(rows: &mut Vec<usize>, values: &mut Vec<f64>, r: usize, v: f64) {
        if v != 0.0 {
            rows.push(r);
            values.push(v);
        }
    }
    let dims = a.dims();
    let mut values = Vec::with_capacity(a.nnz() + b.nnz());
    let mut rows = Vec::with_capacity(a.nnz() + b.nnz());
    let mut offsets = Vec::with_capacity(dims.n_cols + 1);
    offsets.push(0);
    for c in 0..dims.n_cols {
        let (ar, av) = a.column(c);
        let (br, bv) = b.column(c);
        let (mut i, mut j) = (0, 0);
        while i < ar.len() && j < br.len() {
            if ar[i] < br[j] {
                push(&mut rows, &mut values, ar[i], alpha * av[i]);
                i += 1;
            } else if br[j] < ar[i] {
                push(&mut rows, &mut values, br[j], beta * bv[j]);
                j += 1;
            } else {
                push(&mut rows, &mut values, ar[i], alpha * av[i] + beta * bv[j]);
                i += 1;
                j += 1;
            }
        }
        for k in i..ar.len() {
            push(&mut rows, &mut values, ar[k], alpha * av[k]);
        }
        for k in j..br.len() {
            push(&mut rows, &mut values, br[k], beta * bv[k]);
        }
        offsets.push(values.len());
    }
    CscData::from_parts_unchecked(dims, offsets, rows, values)
}

pub(crate) fn scale_csc(a: &CscData, k: f64) -> CscData {
    let dims = a.dims();
    if k == 0.0 {
        return CscData::empty(dims);
    }
    let mut values = Vec::with_capacity(a.nnz());
    let mut rows = Vec::with_capacity(a.nnz());
    let mut offsets = Vec::with_capacity(dims.n_cols + 1);
    offsets.push(0);
    // underflow to zero is possible for tiny k, so still prune
    for c in 0..dims.n_cols {
        let (ar, av) = a.column(c);
        for (&r, &v) in ar.iter().zip(av) {
            let s = k * v;
            if s != 0.0 {
                rows.push(r);
                values.push(s);
            }
        }
        offsets.push(values.len());
    }
    CscData::from_parts_unchecked(dims, offsets, rows, values)
}

pub fn add(a: &SpMat, b: &SpMat) -> Result<SpMat> {
    add_scaled(a, b, 1.0, 1.0)
}

pub fn subtract(a: &SpMat, b: &SpMat) -> Result<SpMat> {
    add_scaled(a, b, 1.0, -1.0)
}

/// `alpha * a + beta * b` in one pass.
pub fn add_scaled(a: &SpMat, b: &SpMat, alpha: f64, beta: f64) -> Result<SpMat> {
    same_dims("add", a.dims(), b.dims())?;
    let (ca, cb) = (a.csc(), b.csc());
    Ok(SpMat::from_csc(add_scaled_csc(&ca, &cb, alpha, beta)))
}

pub fn scalar_mul(a: &SpMat, k: f64) -> SpMat {
    SpMat::from_csc(scale_csc(&a.csc(), k))
}

pub(crate) fn vec_mul_csc(v: &[f64], a: &CscData) -> Vec<f64> {
    (0..a.dims().n_cols)
        .map(|c| {
            let (rows, vals) = a.column(c);
            rows.iter().zip(vals).map(|(&r, &x)| v[r] * x).sum()
        })
        .collect()
}

/// Row vector times matrix: `w[j] = sum_r v[r] * a[r, j]`.
pub fn vec_mul(v: &[f64], a: &SpMat) -> Result<Vec<f64>> {
    if v.len() != a.n_rows() {
        return Err(SparseError::Shape {
            op: "vec_mul",
            lhs: Dims {
                n_rows: 1,
                n_cols: v.len(),
            },
            rhs: a.dims(),
        });
    }
    Ok(vec_mul_csc(v, &a.csc()))
}

/// Matrix times column vector, scattering each column into the output.
pub fn mul_vec(a: &SpMat, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != a.n_cols() {
        return Err(SparseError::Shape {
            op: "mul_vec",
            lhs: a.dims(),
            rhs: Dims {
                n_rows: v.len(),
                n_cols: 1,
            },
        });
    }
    let m = a.csc();
    let mut out = vec![0.0; a.n_rows()];
    for (c, &x) in v.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        let (rows, vals) = m.column(c);
        for (&r, &y) in rows.iter().zip(vals) {
            out[r] += y * x;
        }
    }
    Ok(out)
}

/// Column-by-column product with a dense accumulator.
///
/// For output column `j`, every stored `b[k, j]` scales column `k` of `a`
/// into a scratch array of length `n_rows`. A per-row stamp records which
/// output column last touched each slot, so the scratch is never cleared.
pub(crate) fn spgemm_csc(a: &CscData, b: &CscData) -> CscData {
    let n_rows = a.dims().n_rows;
    let n_cols = b.dims().n_cols;
    let dims = Dims { n_rows, n_cols };

    let mut acc = vec![0.0f64; n_rows];
    let mut stamp = vec![usize::MAX; n_rows];
    let mut pattern: Vec<usize> = Vec::new();

    let mut values = Vec::new();
    let mut rows = Vec::new();
    let mut offsets = Vec::with_capacity(n_cols + 1);
    offsets.push(0);

    for j in 0..n_cols {
        pattern.clear();
        let (brows, bvals) = b.column(j);
        for (&k, &bkj) in brows.iter().zip(bvals) {
            let (arows, avals) = a.column(k);
            for (&i, &aik) in arows.iter().zip(avals) {
                if stamp[i] != j {
                    stamp[i] = j;
                    acc[i] = aik * bkj;
                    pattern.push(i);
                } else {
                    acc[i] += aik * bkj;
                }
            }
        }
        pattern.sort_unstable();
        for &i in &pattern {
            let v = acc[i];
            if v != 0.0 {
                rows.push(i);
                values.push(v);
            }
        }
        offsets.push(values.len());
    }
    CscData::from_parts_unchecked(dims, offsets, rows, values)
}

pub fn spgemm(a: &SpMat, b: &SpMat) -> Result<SpMat> {
    if a.n_cols() != b.n_rows() {
        return Err(SparseError::Shape {
            op: "spgemm",
            lhs: a.dims(),
            rhs: b.dims(),
        });
    }
    Dims::new(a.n_rows(), b.n_cols())?;
    let (ca, cb) = (a.csc(), b.csc());
    Ok(SpMat::from_csc(spgemm_csc(&ca, &cb)))
}
