//! Delayed evaluation of matrix expressions.
//!
//! Operators on [`Expr`] only build a description of the computation. When
//! [`Expr::evaluate`] runs, the description is first rewritten so that
//! known patterns map onto cheaper kernels, then executed bottom-up:
//!
//! * `trace(A.t() * B)` becomes a single merge over the stored elements of
//!   `A` and `B`; neither the transpose nor the product is formed.
//! * `(X.t()).t()` collapses to `X`.
//! * `k1 * (k2 * X)` collapses to `(k1 * k2) * X`.
//! * `k * (A + B)` and `k * (A - B)` scale while merging, in one pass.
//!
//! ```
//! use hybrid_sparse::{ops, Expr};
//!
//! let a = ops::sprandu(50, 50, 0.1, 1).unwrap();
//! let b = ops::sprandu(50, 50, 0.1, 2).unwrap();
//! let e = (Expr::from(&a).t() * Expr::from(&b)).trace();
//! let (value, stats) = e.evaluate_with_stats().unwrap();
//! assert_eq!(stats.temporaries, 0);
//! assert!(value.as_scalar().is_some());
//! ```
//!
//! Leaves borrow their matrices, so operands cannot be mutated while an
//! expression referring to them is alive.

use std::ops::{Add, Mul, Sub};

use crate::csc::CscData;
use crate::dims::Dims;
use crate::error::{Result, SparseError};
use crate::hybrid::SpMat;
use crate::ops::arith::{add_scaled_csc, same_dims, scale_csc, spgemm_csc};
use crate::ops::reduce::trace_csc;
use crate::ops::structural::transpose_csc;

#[derive(Debug, Clone)]
pub enum Expr<'a> {
    Leaf(&'a SpMat),
    ScalarMul(f64, Box<Expr<'a>>),
    Add(Box<Expr<'a>>, Box<Expr<'a>>),
    Sub(Box<Expr<'a>>, Box<Expr<'a>>),
    Mul(Box<Expr<'a>>, Box<Expr<'a>>),
    Transpose(Box<Expr<'a>>),
    /// Scalar-valued; behaves as a 1x1 matrix when used as an operand.
    Trace(Box<Expr<'a>>),
    /// `trace(a.t() * b)`, produced only by rewriting.
    FusedTraceAtB(Box<Expr<'a>>, Box<Expr<'a>>),
}

/// Result of evaluating an expression.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Value {
    Matrix(SpMat),
    Scalar(f64),
}

impl Value {
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Value::Scalar(x) => Some(*x),
            Value::Matrix(_) => None,
        }
    }

    pub fn into_matrix(self) -> Option<SpMat> {
        match self {
            Value::Matrix(m) => Some(m),
            Value::Scalar(_) => None,
        }
    }
}

/// Matrices produced by kernels during one evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// Every matrix a kernel materialised, including the final result.
    pub materialised: usize,
    /// Materialised matrices that were consumed by another node.
    pub temporaries: usize,
}

impl<'a> Expr<'a> {
    pub fn leaf(m: &'a SpMat) -> Self {
        Expr::Leaf(m)
    }

    /// Transpose.
    pub fn t(self) -> Self {
        Expr::Transpose(Box::new(self))
    }

    pub fn trace(self) -> Self {
        Expr::Trace(Box::new(self))
    }

    pub fn scale(self, k: f64) -> Self {
        Expr::ScalarMul(k, Box::new(self))
    }

    /// Result shape; fails if any node combines incompatible shapes.
    pub fn shape_of(&self) -> Result<Dims> {
        match self {
            Expr::Leaf(m) => Ok(m.dims()),
            Expr::ScalarMul(_, x) => x.shape_of(),
            Expr::Add(l, r) | Expr::Sub(l, r) => {
                let (dl, dr) = (l.shape_of()?, r.shape_of()?);
                same_dims("add", dl, dr)?;
                Ok(dl)
            }
            Expr::Mul(l, r) => {
                let (dl, dr) = (l.shape_of()?, r.shape_of()?);
                if dl.n_cols != dr.n_rows {
                    return Err(SparseError::Shape {
                        op: "mul",
                        lhs: dl,
                        rhs: dr,
                    });
                }
                Dims::new(dl.n_rows, dr.n_cols)
            }
            Expr::Transpose(x) => Ok(x.shape_of()?.transposed()),
            Expr::Trace(x) => {
                x.shape_of()?;
                Ok(Dims {
                    n_rows: 1,
                    n_cols: 1,
                })
            }
            Expr::FusedTraceAtB(a, b) => {
                let (da, db) = (a.shape_of()?, b.shape_of()?);
                if da.n_rows != db.n_rows {
                    return Err(SparseError::Shape {
                        op: "trace_at_b",
                        lhs: da,
                        rhs: db,
                    });
                }
                Ok(Dims {
                    n_rows: 1,
                    n_cols: 1,
                })
            }
        }
    }

    /// Applies the pattern rules until none fires.
    pub fn rewrite(&self) -> Expr<'a> {
        let mut e = self.clone();
        loop {
            let (next, changed) = rewrite_pass(e);
            e = next;
            if !changed {
                return e;
            }
        }
    }

    /// Rewrites, then evaluates.
    pub fn evaluate(&self) -> Result<Value> {
        self.evaluate_with_stats().map(|(v, _)| v)
    }

    pub fn evaluate_with_stats(&self) -> Result<(Value, EvalStats)> {
        self.shape_of()?;
        run(&self.rewrite(), true)
    }

    /// Evaluates node by node exactly as written, with no rewriting and no
    /// fused kernels. Reference path for checking the optimised one.
    pub fn evaluate_naive(&self) -> Result<(Value, EvalStats)> {
        self.shape_of()?;
        run(self, false)
    }

    /// Structural equality; leaves compare by identity.
    pub fn same_structure(&self, other: &Expr<'_>) -> bool {
        use Expr::*;
        match (self, other) {
            (Leaf(a), Leaf(b)) => std::ptr::eq(*a, *b),
            (ScalarMul(k1, x), ScalarMul(k2, y)) => {
                k1.to_bits() == k2.to_bits() && x.same_structure(y)
            }
            (Add(a, b), Add(c, d))
            | (Sub(a, b), Sub(c, d))
            | (Mul(a, b), Mul(c, d))
            | (FusedTraceAtB(a, b), FusedTraceAtB(c, d)) => {
                a.same_structure(c) && b.same_structure(d)
            }
            (Transpose(x), Transpose(y)) | (Trace(x), Trace(y)) => x.same_structure(y),
            _ => false,
        }
    }

    /// Number of nodes of each kind, keyed by kind name.
    pub fn count_nodes(&self, kind: &str) -> usize {
        let own = usize::from(self.kind() == kind);
        own + match self {
            Expr::Leaf(_) => 0,
            Expr::ScalarMul(_, x) | Expr::Transpose(x) | Expr::Trace(x) => x.count_nodes(kind),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::FusedTraceAtB(a, b) => {
                a.count_nodes(kind) + b.count_nodes(kind)
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Expr::Leaf(_) => "leaf",
            Expr::ScalarMul(..) => "scalar_mul",
            Expr::Add(..) => "add",
            Expr::Sub(..) => "sub",
            Expr::Mul(..) => "mul",
            Expr::Transpose(_) => "transpose",
            Expr::Trace(_) => "trace",
            Expr::FusedTraceAtB(..) => "fused_trace_at_b",
        }
    }
}

fn rewrite_pass<'a>(e: Expr<'a>) -> (Expr<'a>, bool) {
    let mut changed = false;
    let mut sub = |x: Box<Expr<'a>>| -> Box<Expr<'a>> {
        let (y, c) = rewrite_pass(*x);
        changed |= c;
        Box::new(y)
    };
    // children first
    let e = match e {
        Expr::Leaf(m) => Expr::Leaf(m),
        Expr::ScalarMul(k, x) => Expr::ScalarMul(k, sub(x)),
        Expr::Add(a, b) => Expr::Add(sub(a), sub(b)),
        Expr::Sub(a, b) => Expr::Sub(sub(a), sub(b)),
        Expr::Mul(a, b) => Expr::Mul(sub(a), sub(b)),
        Expr::Transpose(x) => Expr::Transpose(sub(x)),
        Expr::Trace(x) => Expr::Trace(sub(x)),
        Expr::FusedTraceAtB(a, b) => Expr::FusedTraceAtB(sub(a), sub(b)),
    };
    let e = match e {
        Expr::Transpose(x) => match *x {
            Expr::Transpose(inner) => return (*inner, true),
            x => Expr::Transpose(Box::new(x)),
        },
        Expr::ScalarMul(k1, x) => match *x {
            Expr::ScalarMul(k2, inner) => return (Expr::ScalarMul(k1 * k2, inner), true),
            x => Expr::ScalarMul(k1, Box::new(x)),
        },
        Expr::Trace(x) => match *x {
            Expr::Mul(l, r) => match *l {
                Expr::Transpose(a) => return (Expr::FusedTraceAtB(a, r), true),
                l => Expr::Trace(Box::new(Expr::Mul(Box::new(l), r))),
            },
            x => Expr::Trace(Box::new(x)),
        },
        e => e,
    };
    (e, changed)
}

enum Operand<'a> {
    Borrowed(&'a SpMat),
    Owned(CscData),
}

enum Evaluated<'a> {
    Mat(Operand<'a>),
    Scalar(f64),
}

struct Runner {
    fused: bool,
    stats: EvalStats,
}

impl Runner {
    fn produce(&mut self, m: CscData) -> Operand<'static> {
        self.stats.materialised += 1;
        Operand::Owned(m)
    }

    fn consume(&mut self, op: &Operand<'_>) {
        if matches!(op, Operand::Owned(_)) {
            self.stats.temporaries += 1;
        }
    }

    fn matrix<'a>(&mut self, e: &Expr<'a>) -> Result<Operand<'a>> {
        Ok(match self.eval(e)? {
            Evaluated::Mat(m) => m,
            Evaluated::Scalar(x) => {
                let d = Dims {
                    n_rows: 1,
                    n_cols: 1,
                };
                let m = if x == 0.0 {
                    CscData::empty(d)
                } else {
                    CscData::from_parts_unchecked(d, vec![0, 1], vec![0], vec![x])
                };
                self.produce(m)
            }
        })
    }

    fn eval<'a>(&mut self, e: &Expr<'a>) -> Result<Evaluated<'a>> {
        let out = match e {
            Expr::Leaf(m) => Operand::Borrowed(m),
            Expr::ScalarMul(k, x) => match (self.fused, x.as_ref()) {
                (true, Expr::Add(a, b)) => self.merge(a, b, *k, *k)?,
                (true, Expr::Sub(a, b)) => self.merge(a, b, *k, -*k)?,
                _ => {
                    let x = self.matrix(x)?;
                    let r = with_csc(&x, |m| scale_csc(m, *k));
                    self.consume(&x);
                    self.produce(r)
                }
            },
            Expr::Add(a, b) => self.merge(a, b, 1.0, 1.0)?,
            Expr::Sub(a, b) => self.merge(a, b, 1.0, -1.0)?,
            Expr::Mul(a, b) => {
                let (a, b) = (self.matrix(a)?, self.matrix(b)?);
                let r = with_csc(&a, |ma| with_csc(&b, |mb| spgemm_csc(ma, mb)));
                self.consume(&a);
                self.consume(&b);
                self.produce(r)
            }
            Expr::Transpose(x) => {
                let x = self.matrix(x)?;
                let r = with_csc(&x, transpose_csc);
                self.consume(&x);
                self.produce(r)
            }
            Expr::Trace(x) => {
                let x = self.matrix(x)?;
                let t = with_csc(&x, trace_csc);
                self.consume(&x);
                return Ok(Evaluated::Scalar(t));
            }
            Expr::FusedTraceAtB(a, b) => {
                let (a, b) = (self.matrix(a)?, self.matrix(b)?);
                let t = with_csc(&a, |ma| with_csc(&b, |mb| trace_at_b_csc(ma, mb)));
                self.consume(&a);
                self.consume(&b);
                return Ok(Evaluated::Scalar(t));
            }
        };
        Ok(Evaluated::Mat(out))
    }

    fn merge<'a>(
        &mut self,
        a: &Expr<'a>,
        b: &Expr<'a>,
        alpha: f64,
        beta: f64,
    ) -> Result<Operand<'a>> {
        let (a, b) = (self.matrix(a)?, self.matrix(b)?);
        let r = with_csc(&a, |ma| {
            with_csc(&b, |mb| add_scaled_csc(ma, mb, alpha, beta))
        });
        self.consume(&a);
        self.consume(&b);
        Ok(self.produce(r))
    }
}

fn with_csc<T>(op: &Operand<'_>, f: impl FnOnce(&CscData) -> T) -> T {
    match op {
        Operand::Borrowed(m) => f(&m.csc()),
        Operand::Owned(m) => f(m),
    }
}

fn run(e: &Expr<'_>, fused: bool) -> Result<(Value, EvalStats)> {
    let mut runner = Runner {
        fused,
        stats: EvalStats::default(),
    };
    let value = match runner.eval(e)? {
        Evaluated::Scalar(x) => Value::Scalar(x),
        Evaluated::Mat(Operand::Borrowed(m)) => Value::Matrix(m.clone()),
        Evaluated::Mat(Operand::Owned(m)) => Value::Matrix(SpMat::from_csc(m)),
    };
    Ok((value, runner.stats))
}

/// `sum_ij a[i,j] * b[i,j]` by merging the row lists of matching columns.
/// Requires equal row counts; columns beyond the narrower operand are off
/// the diagonal of `a.t() * b` and are skipped.
pub(crate) fn trace_at_b_csc(a: &CscData, b: &CscData) -> f64 {
    let n = a.dims().n_cols.min(b.dims().n_cols);
    let mut total = 0.0;
    for c in 0..n {
        let (ar, av) = a.column(c);
        let (br, bv) = b.column(c);
        let (mut i, mut j) = (0, 0);
        while i < ar.len() && j < br.len() {
            match ar[i].cmp(&br[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    total += av[i] * bv[j];
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    total
}

/// `trace(a.t() * b)` without forming the transpose or the product.
/// Runs in `O(nnz(a) + nnz(b) + n_cols)`.
pub fn fused_trace_at_b(a: &SpMat, b: &SpMat) -> Result<f64> {
    same_dims("fused_trace_at_b", a.dims(), b.dims())?;
    let (ca, cb) = (a.csc(), b.csc());
    Ok(trace_at_b_csc(&ca, &cb))
}

impl<'a> From<&'a SpMat> for Expr<'a> {
    fn from(m: &'a SpMat) -> Self {
        Expr::Leaf(m)
    }
}

impl<'a> Add for Expr<'a> {
    type Output = Expr<'a>;

    fn add(self, rhs: Expr<'a>) -> Expr<'a> {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl<'a> Sub for Expr<'a> {
    type Output = Expr<'a>;

    fn sub(self, rhs: Expr<'a>) -> Expr<'a> {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl<'a> Mul for Expr<'a> {
    type Output = Expr<'a>;

    fn mul(self, rhs: Expr<'a>) -> Expr<'a> {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl<'a> Mul<Expr<'a>> for f64 {
    type Output = Expr<'a>;

    fn mul(self, rhs: Expr<'a>) -> Expr<'a> {
        Expr::ScalarMul(self, Box::new(rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::Triplet;
    use crate::ops;

    fn diag(vals: &[f64]) -> SpMat {
        let t: Vec<Triplet> = vals
            .iter()
            .enumerate()
            .map(|(i, &v)| Triplet::new(i, i, v))
            .collect();
        SpMat::from_triplets(vals.len(), vals.len(), &t).unwrap()
    }

    #[test]
    fn shapes() {
        let a = SpMat::new(3, 4).unwrap();
        let b = SpMat::new(4, 5).unwrap();
        let c = SpMat::new(4, 3).unwrap();
        assert_eq!(
            (Expr::from(&a) * Expr::from(&b)).shape_of().unwrap(),
            Dims {
                n_rows: 3,
                n_cols: 5
            }
        );
        assert_eq!(
            Expr::from(&a).t().shape_of().unwrap(),
            Dims {
                n_rows: 4,
                n_cols: 3
            }
        );
        assert!((Expr::from(&a) + Expr::from(&c)).shape_of().is_err());
        assert!((Expr::from(&a) + Expr::from(&c)).evaluate().is_err());
    }

    #[test]
    fn trace_pattern_fuses() {
        let a = diag(&[1.0, 2.0]);
        let b = diag(&[3.0, 4.0]);
        let e = (Expr::from(&a).t() * Expr::from(&b)).trace();
        let r = e.rewrite();
        assert_eq!(r.kind(), "fused_trace_at_b");
        assert_eq!(r.count_nodes("mul"), 0);
        assert_eq!(r.count_nodes("transpose"), 0);
        let (v, stats) = e.evaluate_with_stats().unwrap();
        assert_eq!(v.as_scalar(), Some(11.0));
        assert_eq!(stats.materialised, 0);
        let (v, stats) = e.evaluate_naive().unwrap();
        assert_eq!(v.as_scalar(), Some(11.0));
        assert_eq!(stats.temporaries, 2);
    }

    #[test]
    fn double_transpose_and_scalar_collapse() {
        let a = diag(&[1.0]);
        assert!(Expr::from(&a)
            .t()
            .t()
            .rewrite()
            .same_structure(&Expr::Leaf(&a)));
        let e = Expr::from(&a).scale(3.0).scale(2.0).rewrite();
        assert!(e.same_structure(&Expr::ScalarMul(6.0, Box::new(Expr::Leaf(&a)))));
    }

    #[test]
    fn scaled_sum_is_one_pass() {
        let a = ops::sprandu(10, 10, 0.3, 1).unwrap();
        let b = ops::sprandu(10, 10, 0.3, 2).unwrap();
        let e = 0.5 * (Expr::from(&a) + Expr::from(&b));
        let (fast, s1) = e.evaluate_with_stats().unwrap();
        let (slow, s2) = e.evaluate_naive().unwrap();
        assert_eq!(s1.temporaries, 0);
        assert_eq!(s2.temporaries, 1);
        assert_eq!(fast, slow);
    }

    #[test]
    fn leaf_returns_operand() {
        let a = ops::sprandu(6, 4, 0.5, 3).unwrap();
        assert_eq!(Expr::from(&a).evaluate().unwrap(), Value::Matrix(a.clone()));
    }

    #[test]
    fn fused_trace_identities() {
        let a = ops::sprandu(20, 15, 0.2, 5).unwrap();
        let fro = ops::norm(&a, ops::Norm::Fro).unwrap();
        assert!((fused_trace_at_b(&a, &a).unwrap() - fro * fro).abs() < 1e-12 * fro * fro);

        let x = SpMat::from_triplets(2, 2, &[Triplet::new(0, 0, 1.0)]).unwrap();
        let y = SpMat::from_triplets(2, 2, &[Triplet::new(1, 1, 1.0)]).unwrap();
        assert_eq!(fused_trace_at_b(&x, &y).unwrap(), 0.0);
        assert!(fused_trace_at_b(&x, &a).is_err());
    }
}
