//! Depth certificates for rooted trees with `O(log n / t)` bits.
//!
//! A node at depth `d` stores `d mod 3`, a milestone flag (`d mod t == 0`),
//! and chunk number `d mod t` of two block values: `d / t` and `d / t + 1`,
//! each written in `c * t` bits, most significant chunk first. Walking `t - 1`
//! steps up the tree, the nodes up to the nearest milestone supply the low
//! positions of block `d / t` and the nodes above it supply the remaining
//! positions through their copy of the next block.

use crate::bits::{bit_width, BitReader, BitWriter};
use crate::marks::ViewMarks;
use crate::view::View;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepthChunkCert {
    pub milestone: bool,
    pub parent_mod3: u8,
    pub chunk_self: u64,
    pub chunk_next: u64,
}

/// Chunk width for trees of depth at most `max_depth`.
pub fn chunk_width(max_depth: usize, t: usize) -> usize {
    let blocks = bit_width((max_depth / t) as u64 + 1);
    blocks.div_ceil(t).max(1)
}

fn mask(c: usize) -> u64 {
    if c >= 64 {
        u64::MAX
    } else {
        (1 << c) - 1
    }
}

fn shift(j: usize, c: usize, t: usize) -> usize {
    (t - 1 - j) * c
}

/// Chunk `j` of the block value `q`.
pub fn chunk(q: u64, j: usize, c: usize, t: usize) -> u64 {
    let s = shift(j, c, t);
    if s >= 64 {
        0
    } else {
        (q >> s) & mask(c)
    }
}

impl DepthChunkCert {
    pub fn for_depth(d: usize, c: usize, t: usize) -> Self {
        let (q, j) = ((d / t) as u64, d % t);
        Self {
            milestone: j == 0,
            parent_mod3: (d % 3) as u8,
            chunk_self: chunk(q, j, c, t),
            chunk_next: chunk(q + 1, j, c, t),
        }
    }

    pub fn write(&self, w: &mut BitWriter, c: usize) {
        w.bit(self.milestone);
        w.uint(self.parent_mod3 as u64, 2);
        w.uint(self.chunk_self, c);
        w.uint(self.chunk_next, c);
    }

    pub fn read(r: &mut BitReader<'_>, c: usize) -> Option<Self> {
        let milestone = r.bit()?;
        let parent_mod3 = r.uint(2)? as u8;
        (parent_mod3 < 3).then_some(())?;
        Some(Self { milestone, parent_mod3, chunk_self: r.uint(c)?, chunk_next: r.uint(c)? })
    }
}

/// The marked tree of a view, oriented by the mod-3 counters: the parent of a
/// node is its marked neighbor whose counter is one less.
pub struct Oriented<'a> {
    pub view: &'a View,
    pub marks: &'a ViewMarks,
    pub certs: Vec<DepthChunkCert>,
    pub c: usize,
    pub t: usize,
}

impl Oriented<'_> {
    pub fn is_child_of(&self, i: usize, j: usize) -> bool {
        self.marks.marked(self.view, i, j) && (self.certs[j].parent_mod3 + 1) % 3 == self.certs[i].parent_mod3
    }

    /// `Some(None)` for a root; `None` when ambiguous or when `i` lacks full
    /// adjacency in the view.
    pub fn parent(&self, i: usize) -> Option<Option<usize>> {
        if !self.view.has_full_adjacency(i) {
            return None;
        }
        let mut parent = None;
        for j in self.view.neighbors(i).filter(|&j| self.marks.marked(self.view, i, j)) {
            if self.certs[j].parent_mod3 == self.certs[i].parent_mod3 {
                return None;
            }
            if self.is_child_of(i, j) {
                if parent.is_some() {
                    return None;
                }
                parent = Some(j);
            }
        }
        Some(parent)
    }

    /// Reconstructed depth of `i`, a function of the certificates of `i`'s
    /// `t` nearest ancestors and their neighbors only.
    pub fn depth(&self, i: usize) -> Option<u64> {
        let (t, c) = (self.t, self.c);
        let mut anc = vec![i];
        for s in 0..t - 1 {
            match self.parent(anc[s])? {
                None => return Some(s as u64),
                Some(p) => anc.push(p),
            }
        }
        let mut milestones = (0..t).filter(|&s| self.certs[anc[s]].milestone);
        let m = milestones.next()?;
        if milestones.next().is_some() {
            return None;
        }
        let mut q: u64 = 0;
        for j in 0..t {
            let part = if j <= m { self.certs[anc[m - j]].chunk_self } else { self.certs[anc[t + m - j]].chunk_next };
            let s = shift(j, c, t);
            if s >= 64 || part.leading_zeros() < s as u32 {
                if part != 0 {
                    return None;
                }
                continue;
            }
            q |= part << s;
        }
        q.checked_mul(t as u64)?.checked_add(m as u64)
    }
}
