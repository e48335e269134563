//! Matrix Market coordinate files and plain-text display.
//!
//! Only the `matrix coordinate real general` flavour is read or written.
//! Indices in files are 1-based; values are written with 17 significant
//! digits, which round-trips every `f64` exactly.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::csc::{CscData, DupPolicy};
use crate::dims::{Dims, Triplet};
use crate::error::{Result, SparseError};
use crate::hybrid::SpMat;

pub const BANNER: &str = "%%MatrixMarket matrix coordinate real general";

/// Matrices up to this size in both dimensions render as a grid.
pub const DEFAULT_RENDER_DIM: usize = 20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Sum repeated coordinates instead of rejecting the file.
    pub sum_duplicates: bool,
}

/// `%.16e` in C notation: mantissa with 16 decimals, signed two-digit exponent.
fn format_value(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.16e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn save_mm<W: Write>(m: &SpMat, sink: W) -> Result<()> {
    let mut w = BufWriter::new(sink);
    let csc = m.csc();
    let d = csc.dims();
    writeln!(w, "{BANNER}")?;
    writeln!(w, "{} {} {}", d.n_rows, d.n_cols, csc.nnz())?;
    for t in csc.iter() {
        writeln!(w, "{} {} {}", t.row + 1, t.col + 1, format_value(t.value))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_mm_file(m: &SpMat, path: impl AsRef<Path>) -> Result<()> {
    save_mm(m, File::create(path)?)
}

fn format_err(line: usize, msg: impl Into<String>) -> SparseError {
    SparseError::Format {
        line,
        msg: msg.into(),
    }
}

fn check_banner(line: &str) -> Result<()> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let want = ["matrix", "coordinate", "real", "general"];
    let ok = tokens.len() == 5
        && tokens[0] == "%%MatrixMarket"
        && tokens[1..]
            .iter()
            .zip(want)
            .all(|(t, w)| t.eq_ignore_ascii_case(w));
    if ok {
        Ok(())
    } else {
        Err(format_err(
            1,
            format!("expected header `{BANNER}`, found `{}`", line.trim()),
        ))
    }
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| format_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| format_err(line, format!("cannot parse {what} from `{tok}`")))
}

pub fn load_mm<R: BufRead>(source: R, opts: LoadOptions) -> Result<SpMat> {
    let mut lines = source.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (_, header) = lines.next().ok_or_else(|| format_err(1, "empty input"))?;
    check_banner(&header?)?;

    let mut size: Option<(Dims, usize)> = None;
    let mut triplets: Vec<Triplet> = Vec::new();
    let mut line_of: Vec<usize> = Vec::new();
    for (no, line) in lines {
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('%') {
            continue;
        }
        let mut tok = body.split_whitespace();
        match size {
            None => {
                let r: usize = parse_field(tok.next(), no, "row count")?;
                let c: usize = parse_field(tok.next(), no, "column count")?;
                let n: usize = parse_field(tok.next(), no, "entry count")?;
                if tok.next().is_some() {
                    return Err(format_err(no, "size line has extra fields"));
                }
                let dims = Dims::new(r, c)?;
                size = Some((dims, n));
                triplets.reserve(n);
            }
            Some((dims, n)) => {
                if triplets.len() == n {
                    return Err(format_err(
                        no,
                        format!("more than the declared {n} entries"),
                    ));
                }
                let r: usize = parse_field(tok.next(), no, "row index")?;
                let c: usize = parse_field(tok.next(), no, "column index")?;
                let v: f64 = parse_field(tok.next(), no, "value")?;
                if tok.next().is_some() {
                    return Err(format_err(no, "entry line has extra fields"));
                }
                if r == 0 || c == 0 || r > dims.n_rows || c > dims.n_cols {
                    return Err(SparseError::Corruption(format!(
                        "line {no}: entry ({r}, {c}) outside 1-based {dims} matrix"
                    )));
                }
                triplets.push(Triplet::new(r - 1, c - 1, v));
                line_of.push(no);
            }
        }
    }
    let (dims, n) = size.ok_or_else(|| format_err(1, "missing size line"))?;
    if triplets.len() != n {
        return Err(format_err(
            line_of.last().copied().unwrap_or(1),
            format!("declared {n} entries, found {}", triplets.len()),
        ));
    }

    if !opts.sum_duplicates {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&k| (triplets[k].col, triplets[k].row, line_of[k]));
        if let Some(w) = order.windows(2).find(|w| {
            (triplets[w[0]].row, triplets[w[0]].col) == (triplets[w[1]].row, triplets[w[1]].col)
        }) {
            let t = triplets[w[1]];
            return Err(SparseError::Duplicate {
                line: line_of[w[1]],
                row: t.row,
                col: t.col,
            });
        }
    }
    Ok(SpMat::from_csc(CscData::from_triplets(
        dims,
        &triplets,
        DupPolicy::Sum,
    )?))
}

pub fn load_mm_file(path: impl AsRef<Path>, opts: LoadOptions) -> Result<SpMat> {
    load_mm(BufReader::new(File::open(path)?), opts)
}

/// Text rendering: a dense grid when both dimensions are at most
/// `max_dim`, otherwise one `(row, col) value` line per stored element in
/// column-major order.
pub fn render_text(m: &SpMat, max_dim: usize) -> String {
    let csc = m.csc();
    let d = csc.dims();
    let mut out = String::new();
    let density = if d.is_empty() {
        0.0
    } else {
        100.0 * csc.nnz() as f64 / (d.n_rows as f64 * d.n_cols as f64)
    };
    let _ = writeln!(
        out,
        "[matrix size: {}x{}; n_nonzero: {}; density: {density:.2}%]",
        d.n_rows,
        d.n_cols,
        csc.nnz()
    );
    if d.n_rows <= max_dim && d.n_cols <= max_dim {
        let mut dense = vec![0.0; d.n_rows * d.n_cols];
        for t in csc.iter() {
            dense[t.row * d.n_cols + t.col] = t.value;
        }
        for row in dense.chunks(d.n_cols.max(1)).take(d.n_rows) {
            for &v in row {
                if v == 0.0 {
                    let _ = write!(out, "{:>12}", "0");
                } else {
                    let _ = write!(out, "{v:>12.4}");
                }
            }
            out.push('\n');
        }
    } else {
        for t in csc.iter() {
            let _ = writeln!(out, "({}, {}) {:.4}", t.row, t.col, t.value);
        }
    }
    out
}
