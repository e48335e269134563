use crate::csc::CscData;
use crate::error::{Result, SparseError};
use crate::hybrid::SpMat;
use crate::ops::structural::transpose_csc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Sum,
    Min,
    Max,
}

/// Which slices a reduction or normalisation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    /// One result per column (`dim = 0`).
    Column,
    /// One result per row (`dim = 1`).
    Row,
}

impl TryFrom<usize> for Dim {
    type Error = SparseError;

    fn try_from(d: usize) -> Result<Self> {
        match d {
            0 => Ok(Dim::Column),
            1 => Ok(Dim::Row),
            _ => Err(SparseError::Domain(format!("dim must be 0 or 1, got {d}"))),
        }
    }
}

/// Sum, minimum or maximum of every column or row.
///
/// Min and max range over all logical entries, so a slice with fewer stored
/// elements than its length also competes with an implicit `0.0`.
pub fn reduce_dim(a: &SpMat, kind: Reduction, dim: Dim) -> Result<Vec<f64>> {
    let m = a.csc();
    let d = m.dims();
    let (n_out, slice_len) = match dim {
        Dim::Column => (d.n_cols, d.n_rows),
        Dim::Row => (d.n_rows, d.n_cols),
    };
    if slice_len == 0 {
        return Err(SparseError::InvalidShape {
            op: "reduce_dim",
            reason: format!("cannot reduce over a zero-length dimension of a {d} matrix"),
        });
    }

    let init = match kind {
        Reduction::Sum => 0.0,
        Reduction::Min => f64::INFINITY,
        Reduction::Max => f64::NEG_INFINITY,
    };
    let mut out = vec![init; n_out];
    let mut counts = vec![0usize; n_out];
    for t in m.iter() {
        let slot = match dim {
            Dim::Column => t.col,
            Dim::Row => t.row,
        };
        counts[slot] += 1;
        let acc = &mut out[slot];
        *acc = match kind {
            Reduction::Sum => *acc + t.value,
            Reduction::Min => acc.min(t.value),
            Reduction::Max => acc.max(t.value),
        };
    }
    if kind != Reduction::Sum {
        for (acc, &n) in out.iter_mut().zip(&counts) {
            if n < slice_len {
                *acc = match kind {
                    Reduction::Min => acc.min(0.0),
                    _ => acc.max(0.0),
                };
            }
        }
    }
    Ok(out)
}

pub(crate) fn trace_csc(m: &CscData) -> f64 {
    let d = m.dims();
    (0..d.n_rows.min(d.n_cols))
        .filter_map(|i| m.position(i, i).map(|k| m.values()[k]))
        .sum()
}

/// Sum of the main diagonal; rectangular matrices use `min(n_rows, n_cols)`.
pub fn trace(a: &SpMat) -> f64 {
    trace_csc(&a.csc())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    /// Vector p-norm, `p >= 1`. For matrices only `p = 1` is accepted.
    P(f64),
    Inf,
    Fro,
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Norm::P(p) => write!(f, "p={p}"),
            Norm::Inf => f.write_str("inf"),
            Norm::Fro => f.write_str("fro"),
        }
    }
}

fn vector_norm<'a>(values: impl Iterator<Item = &'a f64>, p: Norm) -> Result<f64> {
    Ok(match p {
        Norm::Inf => values.fold(0.0, |m, v| m.max(v.abs())),
        Norm::P(p) if p == f64::INFINITY => values.fold(0.0, |m, v| m.max(v.abs())),
        Norm::Fro | Norm::P(2.0) => values.map(|v| v * v).sum::<f64>().sqrt(),
        Norm::P(1.0) => values.map(|v| v.abs()).sum(),
        Norm::P(p) if p >= 1.0 => values.map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        Norm::P(p) => {
            return Err(SparseError::Domain(format!(
                "vector norm needs p >= 1, got {p}"
            )))
        }
    })
}

/// Vector p-norm when `x` has a single row or column; otherwise the matrix
/// 1-norm (max column sum), infinity-norm (max row sum) or Frobenius norm.
/// Implicit zeros contribute nothing.
pub fn norm(x: &SpMat, p: Norm) -> Result<f64> {
    let m = x.csc();
    let d = m.dims();
    if d.n_rows == 1 || d.n_cols == 1 {
        return vector_norm(m.values().iter(), p);
    }
    match p {
        Norm::Fro => vector_norm(m.values().iter(), Norm::Fro),
        Norm::P(1.0) => Ok((0..d.n_cols)
            .map(|c| m.column(c).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)),
        Norm::Inf => {
            let mut rows = vec![0.0f64; d.n_rows];
            for t in m.iter() {
                rows[t.row] += t.value.abs();
            }
            Ok(rows.into_iter().fold(0.0, f64::max))
        }
        other => Err(SparseError::UnsupportedNorm(other.to_string())),
    }
}

/// Scales each column (or row) to unit p-norm. All-zero slices are left alone.
pub fn normalise(x: &SpMat, p: Norm, dim: Dim) -> Result<SpMat> {
    let m = x.csc();
    Ok(SpMat::from_csc(match dim {
        Dim::Column => normalise_columns(&m, p)?,
        Dim::Row => transpose_csc(&normalise_columns(&transpose_csc(&m), p)?),
    }))
}

fn normalise_columns(m: &CscData, p: Norm) -> Result<CscData> {
    let d = m.dims();
    let mut values = Vec::with_capacity(m.nnz());
    let mut rows = Vec::with_capacity(m.nnz());
    let mut offsets = Vec::with_capacity(d.n_cols + 1);
    offsets.push(0);
    for c in 0..d.n_cols {
        let (mr, mv) = m.column(c);
        let s = vector_norm(mv.iter(), p)?;
        for (&r, &v) in mr.iter().zip(mv) {
            let out = if s == 0.0 { v } else { v / s };
            if out != 0.0 {
                rows.push(r);
                values.push(out);
            }
        }
        offsets.push(values.len());
    }
    Ok(CscData::from_parts_unchecked(d, offsets, rows, values))
}
