use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::csc::CscData;
use crate::dims::Dims;
use crate::error::{Result, SparseError};
use crate::hybrid::SpMat;
use crate::rbt::decode_index;

/// Ones on the main diagonal.
pub fn speye(n_rows: usize, n_cols: usize) -> Result<SpMat> {
    let dims = Dims::new(n_rows, n_cols)?;
    let n = n_rows.min(n_cols);
    let offsets = (0..=n_cols).map(|c| c.min(n)).collect();
    Ok(SpMat::from_csc(CscData::from_parts_unchecked(
        dims,
        offsets,
        (0..n).collect(),
        vec![1.0; n],
    )))
}

/// Number of elements a density target maps to: `round(density * cells)`.
pub fn target_nnz(dims: Dims, density: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&density) {
        return Err(SparseError::Domain(format!(
            "density {density} outside [0, 1]"
        )));
    }
    let cells = dims.n_elem()?;
    Ok(((density * cells as f64).round() as u64).min(cells) as usize)
}

/// `count` distinct linear indices below `cells`, drawn uniformly without
/// replacement, in ascending order.
pub(crate) fn sample_positions<R: Rng>(rng: &mut R, cells: u64, count: usize) -> Vec<u64> {
    let mut picked: Vec<u64> = index::sample(rng, cells as usize, count)
        .into_iter()
        .map(|k| k as u64)
        .collect();
    picked.sort_unstable();
    picked
}

/// Uniform value on the open interval (0, 1).
pub(crate) fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let v: f64 = rng.gen();
        if v > 0.0 {
            return v;
        }
    }
}

/// Random sparse matrix with exactly `round(density * n_rows * n_cols)`
/// nonzeros at uniformly chosen distinct positions, values uniform on
/// (0, 1). The same seed always gives the same matrix.
pub fn sprandu(n_rows: usize, n_cols: usize, density: f64, seed: u64) -> Result<SpMat> {
    let dims = Dims::new(n_rows, n_cols)?;
    let count = target_nnz(dims, density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = sample_positions(&mut rng, dims.n_elem()?, count);

    let mut offsets = vec![0usize; n_cols + 1];
    let mut rows = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for &k in &positions {
        let (r, c) = decode_index(k, n_rows);
        offsets[c + 1] += 1;
        rows.push(r);
        values.push(open_unit(&mut rng));
    }
    for c in 0..n_cols {
        offsets[c + 1] += offsets[c];
    }
    Ok(SpMat::from_csc(CscData::from_parts_unchecked(
        dims, offsets, rows, values,
    )))
}
