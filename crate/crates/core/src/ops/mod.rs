//! Linear algebra on [`SpMat`](crate::SpMat).
//!
//! Every kernel runs on the CSC representation and returns a fresh
//! CSC-only matrix in canonical form. Element-level writes (submatrix and
//! diagonal assignment) go through the tree representation.

pub mod access;
pub mod arith;
pub mod generate;
pub mod reduce;
pub mod structural;

pub use access::{diag_assign, diag_extract, submat_assign, submat_extract, Span};
pub use arith::{add, add_scaled, mul_vec, scalar_mul, spgemm, subtract, vec_mul};
pub use generate::{speye, sprandu, target_nnz};
pub use reduce::{norm, normalise, reduce_dim, trace, Dim, Norm, Reduction};
pub use structural::{kron, repmat, transpose};
