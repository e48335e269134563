//! Dense reference implementation used as the oracle in integration tests.
#![allow(dead_code)]

use hybrid_sparse::ops::{Dim, Norm, Reduction};
use hybrid_sparse::{SpMat, Triplet};
use rand::Rng;

pub const TOL: f64 = 1e-12;

pub fn close(got: f64, want: f64) -> bool {
    (got - want).abs() <= TOL * want.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub data: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn of(m: &SpMat) -> Self {
        let mut d = Dense::zeros(m.n_rows(), m.n_cols());
        for t in m.triplets() {
            d.set(t.row, t.col, t.value);
        }
        d
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    /// Nonzero entries in column-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for c in 0..self.cols {
            for r in 0..self.rows {
                if self.get(r, c) != 0.0 {
                    out.push((r, c));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Dense::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn add_scaled(&self, other: &Dense, alpha: f64, beta: f64) -> Self {
        let mut out = self.clone();
        for (o, (&x, &y)) in out.data.iter_mut().zip(self.data.iter().zip(&other.data)) {
            *o = alpha * x + beta * y;
        }
        out
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= k);
        out
    }

    pub fn matmul(&self, other: &Dense) -> Self {
        let mut out = Dense::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s = 0.0;
                for k in 0..self.cols {
                    s += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn row_vec_mul(v: &[f64], m: &Dense) -> Vec<f64> {
        (0..m.cols)
            .map(|c| (0..m.rows).map(|r| v[r] * m.get(r, c)).sum())
            .collect()
    }

    pub fn mul_col_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn kron(&self, b: &Dense) -> Self {
        let mut out = Dense::zeros(self.rows * b.rows, self.cols * b.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..b.rows {
                    for l in 0..b.cols {
                        out.set(i * b.rows + k, j * b.cols + l, self.get(i, j) * b.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn repmat(&self, rr: usize, rc: usize) -> Self {
        let mut out = Dense::zeros(self.rows * rr, self.cols * rc);
        for r in 0..out.rows {
            for c in 0..out.cols {
                out.set(r, c, self.get(r % self.rows, c % self.cols));
            }
        }
        out
    }

    pub fn circshift(&self, dr: i64, dc: i64) -> Self {
        let mut out = Dense::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let nr = (r as i64 + dr).rem_euclid(self.rows as i64) as usize;
                let nc = (c as i64 + dc).rem_euclid(self.cols as i64) as usize;
                out.set(nr, nc, self.get(r, c));
            }
        }
        out
    }

    fn slices(&self, dim: Dim) -> Vec<Vec<f64>> {
        match dim {
            Dim::Column => (0..self.cols)
                .map(|c| (0..self.rows).map(|r| self.get(r, c)).collect())
                .collect(),
            Dim::Row => (0..self.rows)
                .map(|r| (0..self.cols).map(|c| self.get(r, c)).collect())
                .collect(),
        }
    }

    pub fn reduce(&self, kind: Reduction, dim: Dim) -> Vec<f64> {
        self.slices(dim)
            .into_iter()
            .map(|s| match kind {
                Reduction::Sum => s.iter().sum(),
                Reduction::Min => s.iter().copied().fold(f64::INFINITY, f64::min),
                Reduction::Max => s.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
            .collect()
    }

    pub fn vector_norm(v: &[f64], p: Norm) -> f64 {
        match p {
            Norm::Inf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Norm::Fro => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::P(p) => v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }

    /// `None` where the sparse side must reject the norm.
    pub fn norm(&self, p: Norm) -> Option<f64> {
        if self.rows == 1 || self.cols == 1 {
            return Some(Dense::vector_norm(&self.data, p));
        }
        match p {
            Norm::Fro => Some(Dense::vector_norm(&self.data, Norm::Fro)),
            Norm::P(1.0) => Some(
                self.slices(Dim::Column)
                    .iter()
                    .map(|s| s.iter().map(|x| x.abs()).sum::<f64>())
                    .fold(0.0, f64::max),
            ),
            Norm::Inf => Some(
                self.slices(Dim::Row)
                    .iter()
                    .map(|s| s.iter().map(|x| x.abs()).sum::<f64>())
                    .fold(0.0, f64::max),
            ),
            _ => None,
        }
    }

    pub fn normalise(&self, p: Norm, dim: Dim) -> Self {
        let mut out = self.clone();
        for (k, s) in self.slices(dim).iter().enumerate() {
            let n = Dense::vector_norm(s, p);
            if n == 0.0 {
                continue;
            }
            for (i, &v) in s.iter().enumerate() {
                let (r, c) = match dim {
                    Dim::Column => (i, k),
                    Dim::Row => (k, i),
                };
                out.set(r, c, v / n);
            }
        }
        out
    }

    pub fn submat(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut out = Dense::zeros(r1 - r0 + 1, c1 - c0 + 1);
        for r in r0..=r1 {
            for c in c0..=c1 {
                out.set(r - r0, c - c0, self.get(r, c));
            }
        }
        out
    }

    pub fn assign_submat(&mut self, r0: usize, c0: usize, src: &Dense) {
        for r in 0..src.rows {
            for c in 0..src.cols {
                self.set(r0 + r, c0 + c, src.get(r, c));
            }
        }
    }

    pub fn diag_coords(&self, k: i64) -> Vec<(usize, usize)> {
        let off = k.unsigned_abs() as usize;
        (0..)
            .map(|i| if k >= 0 { (i, i + off) } else { (i + off, i) })
            .take_while(|&(r, c)| r < self.rows && c < self.cols)
            .collect()
    }
}

/// Values within tolerance and identical stored coordinate sets.
pub fn check_matrix(got: &SpMat, want: &Dense) -> Result<(), String> {
    if (got.n_rows(), got.n_cols()) != (want.rows, want.cols) {
        return Err(format!(
            "dims {}x{} vs oracle {}x{}",
            got.n_rows(),
            got.n_cols(),
            want.rows,
            want.cols
        ));
    }
    let stored: Vec<(usize, usize)> = got.triplets().iter().map(|t| (t.row, t.col)).collect();
    if stored != want.nonzeros() {
        return Err(format!(
            "coordinate sets differ: {} stored vs {} oracle nonzeros",
            stored.len(),
            want.nonzeros().len()
        ));
    }
    for t in got.triplets() {
        let w = want.get(t.row, t.col);
        if !close(t.value, w) {
            return Err(format!(
                "({}, {}): {} vs oracle {}",
                t.row, t.col, t.value, w
            ));
        }
    }
    Ok(())
}

pub fn check_vec(got: &[f64], want: &[f64]) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("length {} vs oracle {}", got.len(), want.len()));
    }
    for (k, (&g, &w)) in got.iter().zip(want).enumerate() {
        if !close(g, w) {
            return Err(format!("[{k}]: {g} vs oracle {w}"));
        }
    }
    Ok(())
}

pub fn check_scalar(got: f64, want: f64) -> Result<(), String> {
    if close(got, want) {
        Ok(())
    } else {
        Err(format!("{got} vs oracle {want}"))
    }
}

/// Nonzero value in [-1, -1/16] or [1/16, 1].
pub fn nonzero_value<R: Rng>(rng: &mut R) -> f64 {
    let v = rng.gen_range(0.0625..=1.0);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Matrix with each cell independently nonzero with probability `density`.
pub fn random_matrix<R: Rng>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    density: f64,
) -> (SpMat, Dense) {
    let mut trips = Vec::new();
    let mut dense = Dense::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if rng.gen_bool(density) {
                let v = nonzero_value(rng);
                trips.push(Triplet::new(r, c, v));
                dense.set(r, c, v);
            }
        }
    }
    (SpMat::from_triplets(rows, cols, &trips).unwrap(), dense)
}
