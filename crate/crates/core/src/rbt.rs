//! Red-black tree storage keyed by linearised column-major index.
//!
//! Each element is kept as an `(index, value)` pair with
//! `index = row + col * n_rows`, so an in-order walk of the tree visits the
//! elements in column-major order and converts straight to CSC.
//!
//! Nodes live in a flat arena. Slot 0 is the shared black sentinel that
//! stands in for every leaf and for the root's parent.

use crate::csc::CscData;
use crate::dims::{Dims, Triplet};
use crate::error::{Result, SparseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Red,
    Black,
}

const NIL: usize = 0;

#[derive(Debug, Clone)]
struct Node {
    index: u64,
    value: f64,
    color: Color,
    left: usize,
    right: usize,
    parent: usize,
}

impl Node {
    const SENTINEL: Node = Node {
        index: 0,
        value: 0.0,
        color: Color::Black,
        left: NIL,
        right: NIL,
        parent: NIL,
    };
}

/// Linearised column-major position of `(row, col)`.
#[inline]
pub fn encode_index(row: usize, col: usize, n_rows: usize) -> u64 {
    row as u64 + col as u64 * n_rows as u64
}

/// Inverse of [`encode_index`]. `n_rows` must be non-zero.
#[inline]
pub fn decode_index(index: u64, n_rows: usize) -> (usize, usize) {
    let n = n_rows as u64;
    ((index % n) as usize, (index / n) as usize)
}

/// How inserts reached the tree, for checking which path a workload took.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RbtStats {
    /// Inserts that descended from the root to find their slot.
    pub searched: u64,
    /// Inserts placed directly after the current maximum.
    pub appended: u64,
}

#[derive(Debug, Clone)]
pub struct RbtStore {
    dims: Dims,
    n_elem: u64,
    nodes: Vec<Node>,
    free: Vec<usize>,
    root: usize,
    rightmost: usize,
    len: usize,
    stats: RbtStats,
}

impl RbtStore {
    pub fn new(dims: Dims) -> Result<Self> {
        Self::with_capacity(dims, 0)
    }

    pub fn with_capacity(dims: Dims, capacity: usize) -> Result<Self> {
        let n_elem = dims.n_elem()?;
        let mut nodes = Vec::with_capacity(capacity + 1);
        nodes.push(Node::SENTINEL);
        Ok(RbtStore {
            dims,
            n_elem,
            nodes,
            free: Vec::new(),
            root: NIL,
            rightmost: NIL,
            len: 0,
            stats: RbtStats::default(),
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn stats(&self) -> RbtStats {
        self.stats
    }

    /// Largest stored index, if any.
    pub fn max_index(&self) -> Option<u64> {
        (self.rightmost != NIL).then(|| self.nodes[self.rightmost].index)
    }

    pub fn encode(&self, row: usize, col: usize) -> Result<u64> {
        self.dims.check(row, col)?;
        Ok(encode_index(row, col, self.dims.n_rows))
    }

    fn check_index(&self, index: u64) -> Result<()> {
        if index < self.n_elem {
            Ok(())
        } else {
            Err(SparseError::IndexRange {
                index,
                dims: self.dims,
            })
        }
    }

    // --- arena helpers ---

    #[inline]
    fn color(&self, n: usize) -> Color {
        self.nodes[n].color
    }

    #[inline]
    fn left(&self, n: usize) -> usize {
        self.nodes[n].left
    }

    #[inline]
    fn right(&self, n: usize) -> usize {
        self.nodes[n].right
    }

    #[inline]
    fn parent(&self, n: usize) -> usize {
        self.nodes[n].parent
    }

    fn alloc(&mut self, index: u64, value: f64, parent: usize) -> usize {
        let node = Node {
            index,
            value,
            color: Color::Red,
            left: NIL,
            right: NIL,
            parent,
        };
        match self.free.pop() {
            Some(slot) => {
                self.nodes[slot] = node;
                slot
            }
            None => {
                self.nodes.push(node);
                self.nodes.len() - 1
            }
        }
    }

    fn find(&self, index: u64) -> usize {
        let mut n = self.root;
        while n != NIL {
            let k = self.nodes[n].index;
            n = if index < k {
                self.left(n)
            } else if index > k {
                self.right(n)
            } else {
                return n;
            };
        }
        NIL
    }

    fn minimum(&self, mut n: usize) -> usize {
        while self.left(n) != NIL {
            n = self.left(n);
        }
        n
    }

    fn maximum(&self, mut n: usize) -> usize {
        while self.right(n) != NIL {
            n = self.right(n);
        }
        n
    }

    fn successor(&self, mut n: usize) -> usize {
        if self.right(n) != NIL {
            return self.minimum(self.right(n));
        }
        let mut p = self.parent(n);
        while p != NIL && n == self.right(p) {
            n = p;
            p = self.parent(p);
        }
        p
    }

    fn rotate_left(&mut self, x: usize) {
        let y = self.right(x);
        let yl = self.left(y);
        self.nodes[x].right = yl;
        if yl != NIL {
            self.nodes[yl].parent = x;
        }
        let xp = self.parent(x);
        self.nodes[y].parent = xp;
        if xp == NIL {
            self.root = y;
        } else if x == self.left(xp) {
            self.nodes[xp].left = y;
        } else {
            self.nodes[xp].right = y;
        }
        self.nodes[y].left = x;
        self.nodes[x].parent = y;
    }

    fn rotate_right(&mut self, x: usize) {
        let y = self.left(x);
        let yr = self.right(y);
        self.nodes[x].left = yr;
        if yr != NIL {
            self.nodes[yr].parent = x;
        }
        let xp = self.parent(x);
        self.nodes[y].parent = xp;
        if xp == NIL {
            self.root = y;
        } else if x == self.right(xp) {
            self.nodes[xp].right = y;
        } else {
            self.nodes[xp].left = y;
        }
        self.nodes[y].right = x;
        self.nodes[x].parent = y;
    }

    fn insert_fixup(&mut self, mut z: usize) {
        while self.color(self.parent(z)) == Color::Red {
            let p = self.parent(z);
            let g = self.parent(p);
            if p == self.left(g) {
                let uncle = self.right(g);
                if self.color(uncle) == Color::Red {
                    self.nodes[p].color = Color::Black;
                    self.nodes[uncle].color = Color::Black;
                    self.nodes[g].color = Color::Red;
                    z = g;
                } else {
                    if z == self.right(p) {
                        z = p;
                        self.rotate_left(z);
                    }
                    let p = self.parent(z);
                    let g = self.parent(p);
                    self.nodes[p].color = Color::Black;
                    self.nodes[g].color = Color::Red;
                    self.rotate_right(g);
                }
            } else {
                let uncle = self.left(g);
                if self.color(uncle) == Color::Red {
                    self.nodes[p].color = Color::Black;
                    self.nodes[uncle].color = Color::Black;
                    self.nodes[g].color = Color::Red;
                    z = g;
                } else {
                    if z == self.left(p) {
                        z = p;
                        self.rotate_right(z);
                    }
                    let p = self.parent(z);
                    let g = self.parent(p);
                    self.nodes[p].color = Color::Black;
                    self.nodes[g].color = Color::Red;
                    self.rotate_left(g);
                }
            }
        }
        let root = self.root;
        self.nodes[root].color = Color::Black;
    }

    fn transplant(&mut self, u: usize, v: usize) {
        let up = self.parent(u);
        if up == NIL {
            self.root = v;
        } else if u == self.left(up) {
            self.nodes[up].left = v;
        } else {
            self.nodes[up].right = v;
        }
        // v may be the sentinel; its parent link is read by delete_fixup
        self.nodes[v].parent = up;
    }

    fn delete_node(&mut self, z: usize) {
        let mut y = z;
        let mut y_color = self.color(y);
        let x;
        if self.left(z) == NIL {
            x = self.right(z);
            self.transplant(z, x);
        } else if self.right(z) == NIL {
            x = self.left(z);
            self.transplant(z, x);
        } else {
            y = self.minimum(self.right(z));
            y_color = self.color(y);
            x = self.right(y);
            if self.parent(y) == z {
                self.nodes[x].parent = y;
            } else {
                self.transplant(y, x);
                let zr = self.right(z);
                self.nodes[y].right = zr;
                self.nodes[zr].parent = y;
            }
            self.transplant(z, y);
            let zl = self.left(z);
            self.nodes[y].left = zl;
            self.nodes[zl].parent = y;
            self.nodes[y].color = self.color(z);
        }
        if y_color == Color::Black {
            self.delete_fixup(x);
        }
        self.nodes[NIL] = Node::SENTINEL;
        self.free.push(z);
        self.len -= 1;
        if z == self.rightmost {
            self.rightmost = if self.root == NIL {
                NIL
            } else {
                self.maximum(self.root)
            };
        }
    }

    fn delete_fixup(&mut self, mut x: usize) {
        while x != self.root && self.color(x) == Color::Black {
            let p = self.parent(x);
            if x == self.left(p) {
                let mut w = self.right(p);
                if self.color(w) == Color::Red {
                    self.nodes[w].color = Color::Black;
                    self.nodes[p].color = Color::Red;
                    self.rotate_left(p);
                    w = self.right(self.parent(x));
                }
                if self.color(self.left(w)) == Color::Black
                    && self.color(self.right(w)) == Color::Black
                {
                    self.nodes[w].color = Color::Red;
                    x = self.parent(x);
                } else {
                    if self.color(self.right(w)) == Color::Black {
                        let wl = self.left(w);
                        self.nodes[wl].color = Color::Black;
                        self.nodes[w].color = Color::Red;
                        self.rotate_right(w);
                        w = self.right(self.parent(x));
                    }
                    let p = self.parent(x);
                    self.nodes[w].color = self.color(p);
                    self.nodes[p].color = Color::Black;
                    let wr = self.right(w);
                    self.nodes[wr].color = Color::Black;
                    self.rotate_left(p);
                    x = self.root;
                }
            } else {
                let mut w = self.left(p);
                if self.color(w) == Color::Red {
                    self.nodes[w].color = Color::Black;
                    self.nodes[p].color = Color::Red;
                    self.rotate_right(p);
                    w = self.left(self.parent(x));
                }
                if self.color(self.right(w)) == Color::Black
                    && self.color(self.left(w)) == Color::Black
                {
                    self.nodes[w].color = Color::Red;
                    x = self.parent(x);
                } else {
                    if self.color(self.left(w)) == Color::Black {
                        let wr = self.right(w);
                        self.nodes[wr].color = Color::Black;
                        self.nodes[w].color = Color::Red;
                        self.rotate_left(w);
                        w = self.left(self.parent(x));
                    }
                    let p = self.parent(x);
                    self.nodes[w].color = self.color(p);
                    self.nodes[p].color = Color::Black;
                    let wl = self.left(w);
                    self.nodes[wl].color = Color::Black;
                    self.rotate_right(p);
                    x = self.root;
                }
            }
        }
        self.nodes[x].color = Color::Black;
    }

    // --- public element operations ---

    /// Inserts or overwrites `index`. A zero value erases the element.
    pub fn insert(&mut self, index: u64, value: f64) -> Result<()> {
        self.check_index(index)?;
        if value == 0.0 {
            self.erase_unchecked(index);
            return Ok(());
        }
        let mut parent = NIL;
        let mut n = self.root;
        let mut go_left = false;
        while n != NIL {
            parent = n;
            let k = self.nodes[n].index;
            if index < k {
                go_left = true;
                n = self.left(n);
            } else if index > k {
                go_left = false;
                n = self.right(n);
            } else {
                self.nodes[n].value = value;
                return Ok(());
            }
        }
        self.stats.searched += 1;
        let z = self.alloc(index, value, parent);
        if parent == NIL {
            self.root = z;
        } else if go_left {
            self.nodes[parent].left = z;
        } else {
            self.nodes[parent].right = z;
        }
        if self.rightmost == NIL || index > self.nodes[self.rightmost].index {
            self.rightmost = z;
        }
        self.len += 1;
        self.insert_fixup(z);
        Ok(())
    }

    /// Insertion of an element known to lie past every stored index: the new
    /// node hangs directly off the current maximum, skipping the descent.
    pub fn append_max(&mut self, index: u64, value: f64) -> Result<()> {
        self.check_index(index)?;
        if let Some(max) = self.max_index() {
            if index <= max {
                return Err(SparseError::Precondition(format!(
                    "append index {index} is not above the current maximum {max}"
                )));
            }
        }
        if value == 0.0 {
            return Ok(());
        }
        let parent = self.rightmost;
        let z = self.alloc(index, value, parent);
        if parent == NIL {
            self.root = z;
        } else {
            self.nodes[parent].right = z;
        }
        self.rightmost = z;
        self.len += 1;
        self.stats.appended += 1;
        self.insert_fixup(z);
        Ok(())
    }

    pub fn get(&self, index: u64) -> Result<f64> {
        self.check_index(index)?;
        let n = self.find(index);
        Ok(if n == NIL { 0.0 } else { self.nodes[n].value })
    }

    /// Removes `index`; returns whether it was stored.
    pub fn erase(&mut self, index: u64) -> Result<bool> {
        self.check_index(index)?;
        Ok(self.erase_unchecked(index))
    }

    fn erase_unchecked(&mut self, index: u64) -> bool {
        let z = self.find(index);
        if z == NIL {
            return false;
        }
        self.delete_node(z);
        true
    }

    /// Adds `delta` to the element; an exact-zero result erases it.
    pub fn accumulate(&mut self, index: u64, delta: f64) -> Result<()> {
        self.check_index(index)?;
        let n = self.find(index);
        if n == NIL {
            return self.insert(index, delta);
        }
        let v = self.nodes[n].value + delta;
        if v == 0.0 {
            self.delete_node(n);
        } else {
            self.nodes[n].value = v;
        }
        Ok(())
    }

    /// In-order `(index, value)` pairs.
    pub fn iter(&self) -> Iter<'_> {
        let next = if self.root == NIL {
            NIL
        } else {
            self.minimum(self.root)
        };
        Iter {
            tree: self,
            next,
            remaining: self.len,
        }
    }

    /// Stored elements as column-major triplets.
    pub fn triplets(&self) -> impl Iterator<Item = Triplet> + '_ {
        let n_rows = self.dims.n_rows;
        self.iter().map(move |(k, v)| {
            let (r, c) = decode_index(k, n_rows);
            Triplet::new(r, c, v)
        })
    }

    /// Stored indices in `lo ..= hi`, ascending.
    pub fn range_keys(&self, lo: u64, hi: u64) -> Vec<u64> {
        // lowest node with index >= lo
        let mut n = self.root;
        let mut first = NIL;
        while n != NIL {
            if self.nodes[n].index >= lo {
                first = n;
                n = self.left(n);
            } else {
                n = self.right(n);
            }
        }
        let mut out = Vec::new();
        while first != NIL && self.nodes[first].index <= hi {
            out.push(self.nodes[first].index);
            first = self.successor(first);
        }
        out
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(self.root, 0usize)];
        while let Some((n, d)) = stack.pop() {
            if n == NIL {
                best = best.max(d);
                continue;
            }
            stack.push((self.left(n), d + 1));
            stack.push((self.right(n), d + 1));
        }
        best
    }

    /// One in-order pass, decoding each index and filling the CSC arrays.
    pub fn to_csc(&self) -> CscData {
        let dims = self.dims;
        let mut values = Vec::with_capacity(self.len);
        let mut rows = Vec::with_capacity(self.len);
        let mut offsets = vec![0usize; dims.n_cols + 1];
        for (k, v) in self.iter() {
            let (r, c) = decode_index(k, dims.n_rows);
            rows.push(r);
            values.push(v);
            offsets[c + 1] += 1;
        }
        for c in 0..dims.n_cols {
            offsets[c + 1] += offsets[c];
        }
        CscData::from_parts_unchecked(dims, offsets, rows, values)
    }

    /// Builds a balanced tree straight from the sorted CSC stream in linear
    /// time. All levels but the deepest are full; the deepest level is
    /// coloured red when it is incomplete.
    pub fn from_csc(m: &CscData) -> Self {
        let dims = m.dims();
        let entries: Vec<(u64, f64)> = m
            .iter()
            .map(|t| (encode_index(t.row, t.col, dims.n_rows), t.value))
            .collect();
        let n = entries.len();
        let mut tree = RbtStore::with_capacity(dims, n).expect("CSC dims already validated");
        if n == 0 {
            return tree;
        }
        let deepest = (usize::BITS - 1 - n.leading_zeros()) as usize;
        let perfect = (n + 1).is_power_of_two();
        tree.nodes.resize(n + 1, Node::SENTINEL);

        // iterative midpoint construction; node for entries[k] lives in slot k+1
        let mut stack = vec![(0usize, n, NIL, false, 0usize)];
        while let Some((lo, hi, parent, is_left, depth)) = stack.pop() {
            if lo >= hi {
                continue;
            }
            let mid = lo + (hi - lo) / 2;
            let slot = mid + 1;
            let color = if depth == deepest && !perfect {
                Color::Red
            } else {
                Color::Black
            };
            tree.nodes[slot] = Node {
                index: entries[mid].0,
                value: entries[mid].1,
                color,
                left: NIL,
                right: NIL,
                parent,
            };
            if parent == NIL {
                tree.root = slot;
            } else if is_left {
                tree.nodes[parent].left = slot;
            } else {
                tree.nodes[parent].right = slot;
            }
            stack.push((lo, mid, slot, true, depth + 1));
            stack.push((mid + 1, hi, slot, false, depth + 1));
        }
        tree.len = n;
        tree.rightmost = n;
        tree
    }

    /// Walks the whole tree and checks every structural invariant: parent
    /// links, strict BST order, root and sentinel colour, no red node with a
    /// red child, uniform black height, height bound, element count, cached
    /// maximum, value and index range.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.nodes[NIL].color != Color::Black {
            return Err("sentinel is not black".into());
        }
        if self.root == NIL {
            return if self.len == 0 && self.rightmost == NIL {
                Ok(())
            } else {
                Err(format!("empty tree reports len {}", self.len))
            };
        }
        if self.color(self.root) != Color::Black {
            return Err("root is red".into());
        }
        if self.parent(self.root) != NIL {
            return Err("root has a parent".into());
        }

        // (node, depth, black count above, lower bound, upper bound)
        let mut stack = vec![(self.root, 1usize, 0usize, None::<u64>, None::<u64>)];
        let mut black_height = None;
        let mut count = 0usize;
        let mut height = 0usize;
        while let Some((n, depth, blacks, lo, hi)) = stack.pop() {
            let node = &self.nodes[n];
            count += 1;
            height = height.max(depth);
            if lo.is_some_and(|l| node.index <= l) || hi.is_some_and(|h| node.index >= h) {
                return Err(format!("BST order violated at index {}", node.index));
            }
            if node.value == 0.0 {
                return Err(format!("zero stored at index {}", node.index));
            }
            if node.index >= self.n_elem {
                return Err(format!("index {} out of range", node.index));
            }
            let blacks = blacks + usize::from(node.color == Color::Black);
            for (child, is_left) in [(node.left, true), (node.right, false)] {
                if child == NIL {
                    match black_height {
                        None => black_height = Some(blacks),
                        Some(b) if b != blacks => {
                            return Err(format!("black height {blacks} differs from {b}"));
                        }
                        _ => {}
                    }
                    continue;
                }
                if self.parent(child) != n {
                    return Err(format!("broken parent link below index {}", node.index));
                }
                if node.color == Color::Red && self.color(child) == Color::Red {
                    return Err(format!("red node {} has a red child", node.index));
                }
                let (clo, chi) = if is_left {
                    (lo, Some(node.index))
                } else {
                    (Some(node.index), hi)
                };
                stack.push((child, depth + 1, blacks, clo, chi));
            }
        }
        if count != self.len {
            return Err(format!("reachable nodes {count} != len {}", self.len));
        }
        let bound = 2.0 * ((self.len + 1) as f64).log2();
        if height as f64 > bound + 1e-9 {
            return Err(format!("height {height} exceeds 2*log2(N+1) = {bound:.3}"));
        }
        if self.rightmost != self.maximum(self.root) {
            return Err("cached maximum is stale".into());
        }
        Ok(())
    }
}

pub struct Iter<'a> {
    tree: &'a RbtStore,
    next: usize,
    remaining: usize,
}

impl Iterator for Iter<'_> {
    type Item = (u64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next == NIL {
            return None;
        }
        let n = &self.tree.nodes[self.next];
        let item = (n.index, n.value);
        self.next = self.tree.successor(self.next);
        self.remaining -= 1;
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for Iter<'_> {}
