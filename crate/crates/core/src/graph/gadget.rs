//! The two-party lower-bound graph built from a pair of input strings.

use super::LabeledGraph;
use crate::bits::{BitString, BitWriter};
use crate::error::{PlsError, Result};

/// Role tags written into the labels of distinguished nodes. Path nodes get an
/// empty label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum GadgetRole {
    Left = 1,
    LeftLeaf = 2,
    Right = 3,
    RightLeaf = 4,
    True = 5,
    False = 6,
    TruePrime = 7,
    FalsePrime = 8,
    LeftHub = 9,
    LeftCenter = 10,
    RightHub = 11,
    RightCenter = 12,
}

impl GadgetRole {
    pub fn tag(self, index: usize) -> BitString {
        let mut w = BitWriter::new();
        w.uint(self as u64, 4);
        w.uint(index as u64, 16);
        w.finish()
    }

    pub fn parse(label: &BitString) -> Option<(u8, usize)> {
        if label.len() != 20 {
            return None;
        }
        let mut r = label.reader();
        Some((r.uint(4)? as u8, r.uint(16)? as usize))
    }
}

/// A built gadget together with the node indices of its named parts.
#[derive(Clone, Debug)]
pub struct Gadget {
    pub graph: LabeledGraph,
    pub k: usize,
    pub p: usize,
    pub t: usize,
    /// `left[i]` is ℓ_i for `i < k`; index `k` is ℓ_k and `k + 1` is ℓ_{k+1}.
    pub left: Vec<usize>,
    pub left_leaf: Vec<usize>,
    pub right: Vec<usize>,
    pub right_leaf: Vec<usize>,
    pub truth: Vec<usize>,
    pub falsity: Vec<usize>,
    pub truth_prime: Vec<usize>,
    pub falsity_prime: Vec<usize>,
    /// Input edges actually inserted, as node pairs.
    pub input_edges: Vec<(usize, usize)>,
}

impl Gadget {
    /// Expected diameter when the inputs are disjoint (and not both zero).
    pub fn disjoint_diameter(p: usize, t: usize) -> u64 {
        (4 * p + 2 * t + 2) as u64
    }

    /// Lower bound on the diameter when the inputs intersect.
    pub fn intersecting_bound(p: usize, t: usize) -> u64 {
        (6 * p + 2 * t + 1) as u64
    }
}

struct Builder {
    labels: Vec<BitString>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn node(&mut self, label: BitString) -> usize {
        self.labels.push(label);
        self.labels.len() - 1
    }

    fn nodes(&mut self, role: GadgetRole, count: usize) -> Vec<usize> {
        (0..count).map(|i| self.node(role.tag(i))).collect()
    }

    /// Path of `len` edges between `a` and `b` through `len - 1` fresh nodes.
    fn path(&mut self, a: usize, b: usize, len: usize) {
        let mut prev = a;
        for _ in 1..len {
            let x = self.node(BitString::new());
            self.edges.push((prev, x));
            prev = x;
        }
        self.edges.push((prev, b));
    }
}

/// Builds the gadget for inputs `sa`, `sb` (equal length `k`, a power of two,
/// `k >= 2`). Refuses the pair of all-zero inputs, for which the dichotomy
/// does not hold; use [`build_gadget_raw`] to obtain that graph anyway.
pub fn build_gadget(sa: &[bool], sb: &[bool], p: usize, t: usize) -> Result<Gadget> {
    if sa.iter().chain(sb).all(|&b| !b) {
        return Err(PlsError::Refused("both inputs are all-zero; this input pair is excluded".into()));
    }
    build_gadget_raw(sa, sb, p, t)
}

pub fn build_gadget_raw(sa: &[bool], sb: &[bool], p: usize, t: usize) -> Result<Gadget> {
    let k = sa.len();
    if sb.len() != k {
        return Err(PlsError::Malformed(format!("inputs of lengths {k} and {}", sb.len())));
    }
    if k < 2 || !k.is_power_of_two() {
        return Err(PlsError::Malformed(format!("k = {k} must be a power of two, at least 2")));
    }
    if p == 0 || t == 0 {
        return Err(PlsError::Malformed("P and t must be positive".into()));
    }
    let logk = k.trailing_zeros() as usize;
    let mut b = Builder { labels: Vec::new(), edges: Vec::new() };

    let mut left = b.nodes(GadgetRole::Left, k);
    left.push(b.node(GadgetRole::LeftHub.tag(k)));
    left.push(b.node(GadgetRole::LeftCenter.tag(k + 1)));
    let left_leaf = b.nodes(GadgetRole::LeftLeaf, k);
    let truth = b.nodes(GadgetRole::True, logk);
    let falsity = b.nodes(GadgetRole::False, logk);
    let mut right = b.nodes(GadgetRole::Right, k);
    right.push(b.node(GadgetRole::RightHub.tag(k)));
    right.push(b.node(GadgetRole::RightCenter.tag(k + 1)));
    let right_leaf = b.nodes(GadgetRole::RightLeaf, k);
    let truth_prime = b.nodes(GadgetRole::TruePrime, logk);
    let falsity_prime = b.nodes(GadgetRole::FalsePrime, logk);

    for (side, leaf, tr, fa) in [
        (&left, &left_leaf, &truth, &falsity),
        (&right, &right_leaf, &truth_prime, &falsity_prime),
    ] {
        for i in 0..k {
            b.path(side[i], leaf[i], p);
            b.path(side[i], side[k], p);
        }
        b.path(side[k], side[k + 1], p);
        for h in 0..logk {
            b.path(side[k + 1], tr[h], p);
            b.path(side[k + 1], fa[h], p);
        }
        for i in 0..k {
            for h in 0..logk {
                let target = if (i >> h) & 1 == 1 { tr[h] } else { fa[h] };
                b.path(side[i], target, p);
            }
        }
    }
    for h in 0..logk {
        b.path(truth[h], falsity_prime[h], 2 * t + 1);
        b.path(falsity[h], truth_prime[h], 2 * t + 1);
    }
    b.path(left[k + 1], right[k + 1], 2 * t + 1);

    let mut input_edges = Vec::new();
    for i in 0..k {
        if !sa[i] {
            input_edges.push((left[i], left[k + 1]));
        }
        if !sb[i] {
            input_edges.push((right[i], right[k + 1]));
        }
    }
    b.edges.extend(&input_edges);

    let n = b.labels.len();
    let graph = LabeledGraph::new((1..=n as u64).collect(), b.edges, None, b.labels)?;
    Ok(Gadget { graph, k, p, t, left, left_leaf, right, right_leaf, truth, falsity, truth_prime, falsity_prime, input_edges })
}
