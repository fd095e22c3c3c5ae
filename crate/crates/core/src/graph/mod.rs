//! Labeled, optionally weighted, connected simple graphs.

mod gadget;
mod generate;
mod io;

pub use gadget::{build_gadget, build_gadget_raw, Gadget, GadgetRole};
pub use generate::{complete, cycle, grid, path, random_connected, random_tree, random_with_edges, star};
pub use io::Instance;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitString;
use crate::error::{PlsError, Result};

/// Exponent of the identity range `[1, n^c]`.
pub const ID_EXPONENT: u32 = 3;

pub const INF: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    ids: Vec<u64>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    weights: Option<Vec<u64>>,
    labels: Vec<BitString>,
    edge_index: HashMap<(usize, usize), usize>,
    by_id: HashMap<u64, usize>,
}

impl LabeledGraph {
    /// Builds and validates a graph. Nodes are `0..ids.len()`; `weights`, when
    /// given, is aligned with `edges`.
    pub fn new(
        ids: Vec<u64>,
        edges: Vec<(usize, usize)>,
        weights: Option<Vec<u64>>,
        labels: Vec<BitString>,
    ) -> Result<Self> {
        let n = ids.len();
        let bad = |m: String| Err(PlsError::InvalidGraph(m));
        if n == 0 {
            return bad("graph has no nodes".into());
        }
        if labels.len() != n {
            return bad(format!("{} labels for {n} nodes", labels.len()));
        }
        let mut by_id = HashMap::with_capacity(n);
        for (v, &id) in ids.iter().enumerate() {
            if id == 0 {
                return bad("identities must be positive".into());
            }
            if by_id.insert(id, v).is_some() {
                return bad(format!("duplicate identity {id}"));
            }
        }
        if let Some(w) = &weights {
            if w.len() != edges.len() {
                return bad(format!("{} weights for {} edges", w.len(), edges.len()));
            }
            if w.iter().any(|&x| x == 0) {
                return bad("weights must be positive".into());
            }
        }
        let mut adj = vec![Vec::new(); n];
        let mut norm = Vec::with_capacity(edges.len());
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return bad(format!("edge ({a},{b}) out of range"));
            }
            if a == b {
                return bad(format!("self-loop at {a}"));
            }
            let key = (a.min(b), a.max(b));
            if edge_index.insert(key, i).is_some() {
                return bad(format!("duplicate edge ({a},{b})"));
            }
            adj[a].push(b);
            adj[b].push(a);
            norm.push(key);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = Self { ids, adj, edges: norm, weights, labels, edge_index, by_id };
        if !g.is_connected() {
            return bad("graph is not connected".into());
        }
        Ok(g)
    }

    /// Unweighted graph with sequential identities `1..=n` and empty labels.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new((1..=n as u64).collect(), edges.to_vec(), None, vec![BitString::new(); n])
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n()
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn id(&self, v: usize) -> u64 {
        self.ids[v]
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn node_of_id(&self, id: u64) -> Option<usize> {
        self.by_id.get(&id).copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as `(min, max)` node pairs, in insertion order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index.contains_key(&(a.min(b), a.max(b)))
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn weights(&self) -> Option<&[u64]> {
        self.weights.as_deref()
    }

    /// Weight of edge `{a, b}`; 1 on unweighted graphs.
    pub fn weight(&self, a: usize, b: usize) -> u64 {
        let i = self.edge_index[&(a.min(b), a.max(b))];
        self.weights.as_ref().map_or(1, |w| w[i])
    }

    pub fn label(&self, v: usize) -> &BitString {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[BitString] {
        &self.labels
    }

    pub fn with_labels(mut self, labels: Vec<BitString>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(PlsError::InvalidGraph(format!("{} labels for {} nodes", labels.len(), self.n())));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_ids(self, ids: Vec<u64>) -> Result<Self> {
        Self::new(ids, self.edges, self.weights, self.labels)
    }

    pub fn with_weights(self, weights: Option<Vec<u64>>) -> Result<Self> {
        Self::new(self.ids, self.edges, weights, self.labels)
    }

    /// Distinct identities drawn uniformly from `[1, n^c]`.
    pub fn with_random_ids<R: Rng>(self, rng: &mut R) -> Self {
        let n = self.n() as u64;
        let hi = n.saturating_pow(ID_EXPONENT).max(n);
        let mut chosen = HashSet::with_capacity(self.n());
        let mut ids = Vec::with_capacity(self.n());
        while ids.len() < self.n() {
            let id = rng.gen_range(1..=hi);
            if chosen.insert(id) {
                ids.push(id);
            }
        }
        Self::new(ids, self.edges, self.weights, self.labels).expect("relabeling keeps validity")
    }

    /// Pairwise distinct weights drawn from `[1, max(m, n^c)]`.
    pub fn with_random_distinct_weights<R: Rng>(self, rng: &mut R) -> Self {
        let m = self.m() as u64;
        let n = self.n() as u64;
        let hi = n.saturating_pow(ID_EXPONENT).max(m);
        let mut chosen = HashSet::with_capacity(self.m());
        let mut w = Vec::with_capacity(self.m());
        while (w.len() as u64) < m {
            let x = rng.gen_range(1..=hi);
            if chosen.insert(x) {
                w.push(x);
            }
        }
        w.shuffle(rng);
        Self::new(self.ids, self.edges, Some(w), self.labels).expect("reweighting keeps validity")
    }

    /// Hop distances from `src` (BFS), `usize::MAX` never occurs since the graph is connected.
    pub fn hop_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut q = VecDeque::new();
        dist[src] = 0;
        q.push_back(src);
        while let Some(v) = q.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Weighted distances from `src` (Dijkstra; BFS when unweighted).
    pub fn distances(&self, src: usize) -> Vec<u64> {
        if !self.is_weighted() {
            return self.hop_distances(src).into_iter().map(|d| d as u64).collect();
        }
        let mut dist = vec![INF; self.n()];
        let mut heap = BinaryHeap::new();
        dist[src] = 0;
        heap.push(Reverse((0u64, src)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &w in &self.adj[v] {
                let nd = d + self.weight(v, w);
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        dist
    }

    pub fn all_pairs_distances(&self) -> Vec<Vec<u64>> {
        (0..self.n()).map(|v| self.distances(v)).collect()
    }

    /// Weighted diameter (hop diameter on unweighted graphs).
    pub fn diameter(&self) -> u64 {
        (0..self.n()).map(|v| *self.distances(v).iter().max().unwrap()).max().unwrap()
    }

    pub fn hop_diameter(&self) -> usize {
        (0..self.n()).map(|v| self.hop_eccentricity(v)).max().unwrap()
    }

    pub fn hop_eccentricity(&self, v: usize) -> usize {
        *self.hop_distances(v).iter().max().unwrap()
    }

    /// Smallest hop eccentricity, with the lowest-identity node attaining it.
    pub fn hop_center(&self) -> (usize, usize) {
        (0..self.n())
            .map(|v| (self.hop_eccentricity(v), v))
            .min_by_key(|&(e, v)| (e, self.id(v)))
            .map(|(e, v)| (v, e))
            .unwrap()
    }

    /// Nodes at hop distance at most `t` from `v`.
    pub fn ball(&self, v: usize, t: usize) -> Vec<usize> {
        let d = self.hop_distances(v);
        (0..self.n()).filter(|&u| d[u] <= t).collect()
    }

    /// Minimum ball size `b(t) = min_v |B(v, t)|`.
    pub fn ball_growth(&self, t: usize) -> usize {
        (0..self.n()).map(|v| self.hop_distances(v).iter().filter(|&&d| d <= t).count()).min().unwrap()
    }

    pub fn is_tree(&self) -> bool {
        self.m() + 1 == self.n()
    }
}
