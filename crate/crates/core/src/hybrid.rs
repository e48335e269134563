//! The user-facing sparse matrix and its automatic storage switching.
//!
//! A [`SpMat`] owns up to three representations of the same element set:
//! CSC, COO and red-black tree. A representation is either present and
//! current, or absent. Operations ask for the format they work best on and
//! the matrix converts lazily; conversions add a representation, while
//! mutations drop every representation except the one they wrote to.
//!
//! Element reads may convert, so the format cache sits behind a `RefCell`.
//! `SpMat` is therefore `Send` but not `Sync`: share it between threads only
//! behind a lock, or call [`SpMat::synced_csc`] and share the returned
//! `&CscData`.

use std::cell::{Ref, RefCell};
use std::fmt;

use crate::coo::CooData;
use crate::csc::{CscData, DupPolicy};
use crate::dims::{Dims, Triplet};
use crate::error::{Result, SparseError};
use crate::ops::arith::add_scaled_csc;
use crate::rbt::{encode_index, RbtStats, RbtStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csc,
    Coo,
    Rbt,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Csc, Format::Coo, Format::Rbt];
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csc => "CSC",
            Format::Coo => "COO",
            Format::Rbt => "RBT",
        })
    }
}

/// Set of currently valid representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FormatSet(u8);

impl FormatSet {
    fn bit(f: Format) -> u8 {
        match f {
            Format::Csc => 1,
            Format::Coo => 2,
            Format::Rbt => 4,
        }
    }

    pub fn only(f: Format) -> Self {
        FormatSet(Self::bit(f))
    }

    pub fn contains(&self, f: Format) -> bool {
        self.0 & Self::bit(f) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Format> + '_ {
        Format::ALL.into_iter().filter(|f| self.contains(*f))
    }

    fn insert(&mut self, f: Format) {
        self.0 |= Self::bit(f);
    }
}

impl FromIterator<Format> for FormatSet {
    fn from_iter<I: IntoIterator<Item = Format>>(iter: I) -> Self {
        let mut s = FormatSet::default();
        iter.into_iter().for_each(|f| s.insert(f));
        s
    }
}

/// Counts of each direct conversion performed on one matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConversionStats {
    pub csc_to_coo: u64,
    pub coo_to_csc: u64,
    pub csc_to_rbt: u64,
    pub rbt_to_csc: u64,
}

impl ConversionStats {
    pub fn total(&self) -> u64 {
        self.csc_to_coo + self.coo_to_csc + self.csc_to_rbt + self.rbt_to_csc
    }

    /// Conversions that produced a CSC representation.
    pub fn to_csc(&self) -> u64 {
        self.coo_to_csc + self.rbt_to_csc
    }

    /// Conversions that produced a tree representation.
    pub fn to_rbt(&self) -> u64 {
        self.csc_to_rbt
    }
}

#[derive(Debug, Clone)]
struct Store {
    csc: Option<CscData>,
    coo: Option<CooData>,
    rbt: Option<RbtStore>,
    stats: ConversionStats,
}

impl Store {
    fn csc_only(m: CscData) -> Self {
        Store {
            csc: Some(m),
            coo: None,
            rbt: None,
            stats: ConversionStats::default(),
        }
    }

    fn valid(&self) -> FormatSet {
        let mut s = FormatSet::default();
        if self.csc.is_some() {
            s.insert(Format::Csc);
        }
        if self.coo.is_some() {
            s.insert(Format::Coo);
        }
        if self.rbt.is_some() {
            s.insert(Format::Rbt);
        }
        s
    }

    fn has(&self, f: Format) -> bool {
        match f {
            Format::Csc => self.csc.is_some(),
            Format::Coo => self.coo.is_some(),
            Format::Rbt => self.rbt.is_some(),
        }
    }

    // CSC sits at the hub: COO and RBT each convert only to and from CSC.
    fn require(&mut self, f: Format) {
        match f {
            Format::Csc => {
                if self.csc.is_some() {
                    return;
                }
                let m = if let Some(rbt) = &self.rbt {
                    self.stats.rbt_to_csc += 1;
                    rbt.to_csc()
                } else {
                    let coo = self
                        .coo
                        .as_ref()
                        .expect("a SpMat always holds a valid format");
                    self.stats.coo_to_csc += 1;
                    coo.to_csc()
                        .expect("COO inside SpMat holds in-range coordinates")
                };
                self.csc = Some(m);
            }
            Format::Coo => {
                if self.coo.is_some() {
                    return;
                }
                self.require(Format::Csc);
                self.stats.csc_to_coo += 1;
                self.coo = Some(CooData::from_csc(self.csc.as_ref().unwrap()));
            }
            Format::Rbt => {
                if self.rbt.is_some() {
                    return;
                }
                self.require(Format::Csc);
                self.stats.csc_to_rbt += 1;
                self.rbt = Some(RbtStore::from_csc(self.csc.as_ref().unwrap()));
            }
        }
    }

    fn keep_only(&mut self, f: Format) {
        self.require(f);
        if f != Format::Csc {
            self.csc = None;
        }
        if f != Format::Coo {
            self.coo = None;
        }
        if f != Format::Rbt {
            self.rbt = None;
        }
    }
}

/// Sparse matrix of `f64` with automatic storage switching.
#[derive(Clone)]
pub struct SpMat {
    dims: Dims,
    store: RefCell<Store>,
}

impl SpMat {
    /// An all-zero matrix.
    pub fn new(n_rows: usize, n_cols: usize) -> Result<Self> {
        Ok(SpMat::from_csc(CscData::empty(Dims::new(n_rows, n_cols)?)))
    }

    pub fn from_csc(m: CscData) -> Self {
        SpMat {
            dims: m.dims(),
            store: RefCell::new(Store::csc_only(m)),
        }
    }

    /// Batch build; duplicate coordinates are summed.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[Triplet]) -> Result<Self> {
        let dims = Dims::new(n_rows, n_cols)?;
        Ok(SpMat::from_csc(CscData::from_triplets(
            dims,
            triplets,
            DupPolicy::Sum,
        )?))
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn n_rows(&self) -> usize {
        self.dims.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.dims.n_cols
    }

    pub fn valid_formats(&self) -> FormatSet {
        self.store.borrow().valid()
    }

    pub fn conversion_stats(&self) -> ConversionStats {
        self.store.borrow().stats
    }

    /// Insert-path counters of the tree representation, if one is present.
    pub fn rbt_stats(&self) -> Option<RbtStats> {
        self.store.borrow().rbt.as_ref().map(RbtStore::stats)
    }

    /// Makes `fmt` valid, converting if needed. Other valid formats stay valid.
    pub fn require(&self, fmt: Format) {
        if self.store.borrow().has(fmt) {
            return;
        }
        self.store.borrow_mut().require(fmt);
    }

    /// Drops every representation except `kept`, converting to it first if
    /// it is not already valid.
    pub fn invalidate_others(&mut self, kept: Format) {
        self.store.get_mut().keep_only(kept);
    }

    /// CSC view, syncing first if needed.
    pub fn csc(&self) -> Ref<'_, CscData> {
        self.require(Format::Csc);
        Ref::map(self.store.borrow(), |s| s.csc.as_ref().unwrap())
    }

    /// Syncs to CSC and hands out a plain shared reference, suitable for
    /// read-only phases spread over several threads.
    pub fn synced_csc(&mut self) -> &CscData {
        let store = self.store.get_mut();
        store.require(Format::Csc);
        store.csc.as_ref().unwrap()
    }

    pub fn into_csc(self) -> CscData {
        let mut store = self.store.into_inner();
        store.require(Format::Csc);
        store.csc.unwrap()
    }

    /// Triplets as held by one specific representation, or `None` when that
    /// representation is not currently valid. Never converts.
    pub fn format_triplets(&self, fmt: Format) -> Option<Vec<Triplet>> {
        let s = self.store.borrow();
        match fmt {
            Format::Csc => s.csc.as_ref().map(CscData::to_triplets),
            Format::Coo => s.coo.as_ref().map(CooData::to_triplets),
            Format::Rbt => s.rbt.as_ref().map(|t| t.triplets().collect()),
        }
    }

    /// All stored elements in column-major order.
    pub fn triplets(&self) -> Vec<Triplet> {
        self.csc().to_triplets()
    }

    /// Number of stored elements, read from whichever format is valid.
    pub fn nnz(&self) -> usize {
        let s = self.store.borrow();
        if let Some(m) = &s.csc {
            m.nnz()
        } else if let Some(t) = &s.rbt {
            t.len()
        } else {
            s.coo.as_ref().map_or(0, CooData::nnz)
        }
    }

    pub fn density(&self) -> Result<f64> {
        let cells = self.dims.n_elem()?;
        if cells == 0 {
            return Err(SparseError::UndefinedDimension(self.dims));
        }
        Ok(self.nnz() as f64 / cells as f64)
    }

    /// Element read. Uses CSC or the tree when either is valid; otherwise
    /// syncs to CSC first.
    pub fn get(&self, row: usize, col: usize) -> Result<f64> {
        self.dims.check(row, col)?;
        {
            let s = self.store.borrow();
            if let Some(m) = &s.csc {
                return m.get(row, col);
            }
            if let Some(t) = &s.rbt {
                return t.get(encode_index(row, col, self.dims.n_rows));
            }
        }
        self.csc().get(row, col)
    }

    /// Element write. Overwriting an already stored nonzero in a valid CSC
    /// happens in place; every other write goes through the tree, which then
    /// becomes the only valid format. Writing `0.0` removes the element.
    pub fn set(&mut self, row: usize, col: usize, value: f64) -> Result<()> {
        self.dims.check(row, col)?;
        let n_rows = self.dims.n_rows;
        let store = self.store.get_mut();
        if value != 0.0 {
            if let Some(m) = &mut store.csc {
                if let Some(pos) = m.position(row, col) {
                    m.values_mut()[pos] = value;
                    store.coo = None;
                    store.rbt = None;
                    return Ok(());
                }
            }
        }
        store.keep_only(Format::Rbt);
        let tree = store.rbt.as_mut().unwrap();
        let index = encode_index(row, col, n_rows);
        if value != 0.0 && tree.max_index().is_none_or(|m| index > m) {
            tree.append_max(index, value)
        } else {
            tree.insert(index, value)
        }
    }

    /// Tree representation for element-level edits; the tree becomes the
    /// only valid format.
    pub(crate) fn rbt_mut(&mut self) -> &mut RbtStore {
        let store = self.store.get_mut();
        store.keep_only(Format::Rbt);
        store.rbt.as_mut().unwrap()
    }

    /// `X(row, col) += delta`. An exact-zero result removes the element.
    pub fn accumulate(&mut self, row: usize, col: usize, delta: f64) -> Result<()> {
        self.dims.check(row, col)?;
        let store = self.store.get_mut();
        if let Some(m) = &mut store.csc {
            if let Some(pos) = m.position(row, col) {
                let v = m.values()[pos] + delta;
                if v != 0.0 {
                    m.values_mut()[pos] = v;
                    store.coo = None;
                    store.rbt = None;
                    return Ok(());
                }
            }
        }
        store.keep_only(Format::Rbt);
        let tree = store.rbt.as_mut().unwrap();
        tree.accumulate(encode_index(row, col, self.dims.n_rows), delta)
    }

    /// Sorts the new elements, then merges them into the existing CSC
    /// arrays; coinciding coordinates are summed. CSC becomes the only
    /// valid format.
    pub fn batch_insert(&mut self, triplets: &[Triplet]) -> Result<()> {
        let incoming = CscData::from_triplets(self.dims, triplets, DupPolicy::Sum)?;
        let store = self.store.get_mut();
        store.keep_only(Format::Csc);
        let existing = store.csc.take().unwrap();
        store.csc = Some(if existing.nnz() == 0 {
            incoming
        } else {
            add_scaled_csc(&existing, &incoming, 1.0, 1.0)
        });
        Ok(())
    }

    /// Circular shift of all elements: row `r` moves to
    /// `(r + row_shift) mod n_rows`, likewise for columns. Runs on the COO
    /// representation, which becomes the only valid format.
    pub fn circshift(&mut self, row_shift: i64, col_shift: i64) {
        let store = self.store.get_mut();
        store.keep_only(Format::Coo);
        let coo = store.coo.as_mut().unwrap();
        coo.shift(row_shift, col_shift);
        coo.canonicalise();
    }
}

impl PartialEq for SpMat {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && *self.csc() == *other.csc()
    }
}

impl fmt::Debug for SpMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpMat")
            .field("dims", &self.dims)
            .field("nnz", &self.nnz())
            .field("valid", &self.valid_formats())
            .finish()
    }
}

impl From<CscData> for SpMat {
    fn from(m: CscData) -> Self {
        SpMat::from_csc(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SpMat {
        let t = [(0, 0, 1.0), (2, 1, 3.0), (1, 1, 2.0), (3, 3, -1.0)].map(Triplet::from);
        SpMat::from_triplets(4, 4, &t).unwrap()
    }

    #[test]
    fn fresh_matrix_is_csc_only() {
        let m = sample();
        assert_eq!(m.valid_formats(), FormatSet::only(Format::Csc));
        m.require(Format::Csc);
        assert_eq!(m.conversion_stats().total(), 0);
    }

    #[test]
    fn require_paths() {
        let mut m = sample();
        m.invalidate_others(Format::Rbt);
        assert_eq!(m.valid_formats(), FormatSet::only(Format::Rbt));
        m.require(Format::Csc);
        assert!(m.valid_formats().contains(Format::Rbt));
        assert_eq!(
            m.format_triplets(Format::Csc),
            m.format_triplets(Format::Rbt)
        );

        let mut m = sample();
        m.invalidate_others(Format::Coo);
        let before = m.conversion_stats();
        m.require(Format::Rbt);
        let after = m.conversion_stats();
        assert_eq!(after.coo_to_csc - before.coo_to_csc, 1);
        assert_eq!(after.csc_to_rbt - before.csc_to_rbt, 1);
        assert_eq!(m.valid_formats().len(), 3);
    }

    #[test]
    fn invalidate_keeps_contents() {
        let mut m = sample();
        let want = m.triplets();
        Format::ALL.iter().for_each(|&f| m.require(f));
        m.invalidate_others(Format::Rbt);
        assert_eq!(m.valid_formats(), FormatSet::only(Format::Rbt));
        m.invalidate_others(Format::Rbt);
        assert_eq!(m.valid_formats(), FormatSet::only(Format::Rbt));
        assert_eq!(m.triplets(), want);
    }

    #[test]
    fn reads_route_without_needless_conversion() {
        let mut m = sample();
        assert_eq!(m.get(1, 1).unwrap(), 2.0);
        assert_eq!(m.conversion_stats().total(), 0);

        m.invalidate_others(Format::Coo);
        let before = m.conversion_stats().coo_to_csc;
        assert_eq!(m.get(2, 1).unwrap(), 3.0);
        assert_eq!(m.conversion_stats().coo_to_csc, before + 1);
        assert!(m.get(4, 0).is_err());
    }

    #[test]
    fn writes_and_zero_erase() {
        let mut m = sample();
        m.set(1, 1, 5.0).unwrap();
        assert_eq!(m.valid_formats(), FormatSet::only(Format::Csc));
        m.set(0, 3, 4.0).unwrap();
        assert_eq!(m.valid_formats(), FormatSet::only(Format::Rbt));
        assert_eq!(m.get(0, 3).unwrap(), 4.0);
        assert_eq!(m.nnz(), 5);
        m.set(0, 3, 0.0).unwrap();
        assert_eq!(m.nnz(), 4);
        m.accumulate(2, 2, 4.56).unwrap();
        assert_eq!(m.get(2, 2).unwrap(), 4.56);
        m.accumulate(2, 2, -4.56).unwrap();
        assert_eq!(m.get(2, 2).unwrap(), 0.0);
        assert!(m.set(0, 4, 1.0).is_err());
    }

    #[test]
    fn batch_insert_merges_with_sum() {
        let mut m = sample();
        m.set(3, 0, 7.0).unwrap();
        m.batch_insert(&[Triplet::new(0, 0, 1.0), Triplet::new(0, 2, 2.0)])
            .unwrap();
        assert_eq!(m.valid_formats(), FormatSet::only(Format::Csc));
        assert_eq!(m.get(0, 0).unwrap(), 2.0);
        assert_eq!(m.get(3, 0).unwrap(), 7.0);
        assert_eq!(m.get(0, 2).unwrap(), 2.0);
        assert!(m.batch_insert(&[Triplet::new(9, 0, 1.0)]).is_err());
    }

    #[test]
    fn density_rules() {
        assert!(SpMat::new(0, 5).unwrap().density().is_err());
        assert_eq!(sample().density().unwrap(), 4.0 / 16.0);
    }

    #[test]
    fn circshift_through_coo() {
        let mut m = sample();
        m.circshift(1, -1);
        assert_eq!(m.valid_formats(), FormatSet::only(Format::Coo));
        assert_eq!(m.get(1, 3).unwrap(), 1.0);
        assert_eq!(m.get(0, 2).unwrap(), -1.0);
        assert_eq!(m.nnz(), 4);
    }
}
