//! Sparse matrices with automatic storage switching.
//!
//! [`SpMat`] is the only matrix type users handle. Internally it keeps its
//! elements in compressed sparse column form by default, moves to a
//! red-black tree for element-by-element construction and to a coordinate
//! list for bulk coordinate rewrites, and syncs back lazily when an
//! operation needs a different layout.
//!
//! ```
//! use hybrid_sparse::{ops, SpMat};
//!
//! let mut x = ops::sprandu(1000, 1000, 0.01, 7).unwrap();
//! x.set(1, 1, 1.23).unwrap();
//! x.accumulate(3, 4, 4.56).unwrap();
//! let v = vec![1.0; 1000];
//! let w = ops::vec_mul(&v, &x).unwrap();
//! assert_eq!(w.len(), 1000);
//! ```
//!
//! Composite expressions can be described first and evaluated later, which
//! lets known patterns such as `trace(A.t() * B)` run without forming any
//! intermediate matrix; see [`expr`].

pub mod bench;
pub mod coo;
pub mod csc;
pub mod dims;
pub mod error;
pub mod expr;
pub mod hybrid;
pub mod io;
pub mod ops;
pub mod rbt;

pub use coo::CooData;
pub use csc::{CscData, DupPolicy, OversizedCsc};
pub use dims::{Dims, Triplet};
pub use error::{Result, SparseError};
pub use expr::{fused_trace_at_b, Expr, Value};
pub use hybrid::{ConversionStats, Format, FormatSet, SpMat};
pub use rbt::{decode_index, encode_index, RbtStats, RbtStore};
