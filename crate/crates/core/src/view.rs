//! What a node learns after `t` synchronous rounds: the ball of radius `t`
//! with identities, labels and certificates, and every edge that has an
//! endpoint at distance at most `t - 1`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use crate::bits::BitString;
use crate::error::{PlsError, Result};
use crate::graph::{LabeledGraph, INF};

/// Local index 0 is always the center. Nodes are ordered by (distance, id), so
/// nothing about the host graph's node numbering leaks into the view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct View {
    radius: usize,
    ids: Vec<u64>,
    labels: Vec<BitString>,
    certs: Vec<BitString>,
    dist: Vec<usize>,
    adj: Vec<Vec<(usize, u64)>>,
    weighted: bool,
    by_id: HashMap<u64, usize>,
}

/// Source of adjacency for view construction, shared by host graphs and views.
trait Topology {
    fn ids(&self, v: usize) -> u64;
    fn nbrs(&self, v: usize) -> Vec<(usize, u64)>;
    fn label(&self, v: usize) -> BitString;
    fn weighted(&self) -> bool;
}

struct HostTopo<'a>(&'a LabeledGraph);

impl Topology for HostTopo<'_> {
    fn ids(&self, v: usize) -> u64 {
        self.0.id(v)
    }
    fn nbrs(&self, v: usize) -> Vec<(usize, u64)> {
        self.0.neighbors(v).iter().map(|&w| (w, self.0.weight(v, w))).collect()
    }
    fn label(&self, v: usize) -> BitString {
        self.0.label(v).clone()
    }
    fn weighted(&self) -> bool {
        self.0.is_weighted()
    }
}

impl Topology for View {
    fn ids(&self, v: usize) -> u64 {
        self.ids[v]
    }
    fn nbrs(&self, v: usize) -> Vec<(usize, u64)> {
        self.adj[v].clone()
    }
    fn label(&self, v: usize) -> BitString {
        self.labels[v].clone()
    }
    fn weighted(&self) -> bool {
        self.weighted
    }
}

fn build<T: Topology>(topo: &T, center: usize, radius: usize, cert: impl Fn(usize) -> BitString) -> View {
    let mut dist: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![center];
    dist.insert(center, 0);
    let mut q = VecDeque::from([center]);
    while let Some(v) = q.pop_front() {
        let d = dist[&v];
        if d == radius {
            continue;
        }
        for (w, _) in topo.nbrs(v) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(d + 1);
                order.push(w);
                q.push_back(w);
            }
        }
    }
    order.sort_by_key(|&v| (dist[&v], topo.ids(v)));
    let local: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); order.len()];
    for (i, &v) in order.iter().enumerate() {
        if dist[&v] + 1 > radius {
            continue;
        }
        for (w, wt) in topo.nbrs(v) {
            let j = local[&w];
            if !adj[i].iter().any(|&(x, _)| x == j) {
                adj[i].push((j, wt));
                adj[j].push((i, wt));
            }
        }
    }
    let ids: Vec<u64> = order.iter().map(|&v| topo.ids(v)).collect();
    for list in &mut adj {
        list.sort_by_key(|&(j, _)| ids[j]);
    }
    View {
        radius,
        by_id: ids.iter().enumerate().map(|(i, &id)| (id, i)).collect(),
        labels: order.iter().map(|&v| topo.label(v)).collect(),
        certs: order.iter().map(|&v| cert(v)).collect(),
        dist: order.iter().map(|&v| dist[&v]).collect(),
        ids,
        adj,
        weighted: topo.weighted(),
    }
}

/// The radius-`t` view of `v` under certificate assignment `certs`.
pub fn extract_view(g: &LabeledGraph, certs: &[BitString], v: usize, t: usize) -> Result<View> {
    if certs.len() != g.n() {
        return Err(PlsError::Malformed(format!("{} certificates for {} nodes", certs.len(), g.n())));
    }
    if v >= g.n() {
        return Err(PlsError::Malformed(format!("node {v} out of range")));
    }
    Ok(build(&HostTopo(g), v, t, |u| certs[u].clone()))
}

impl View {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> u64 {
        self.ids[i]
    }

    pub fn label(&self, i: usize) -> &BitString {
        &self.labels[i]
    }

    pub fn cert(&self, i: usize) -> &BitString {
        &self.certs[i]
    }

    pub fn certs(&self) -> &[BitString] {
        &self.certs
    }

    pub fn set_cert(&mut self, i: usize, cert: BitString) {
        self.certs[i] = cert;
    }

    pub fn dist(&self, i: usize) -> usize {
        self.dist[i]
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn local_of_id(&self, id: u64) -> Option<usize> {
        self.by_id.get(&id).copied()
    }

    /// Known neighbors of `i`, sorted by identity. Complete when `has_full_adjacency(i)`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i].iter().map(|&(j, _)| j)
    }

    pub fn weighted_neighbors(&self, i: usize) -> &[(usize, u64)] {
        &self.adj[i]
    }

    pub fn degree_known(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn has_full_adjacency(&self, i: usize) -> bool {
        self.dist[i] < self.radius
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].iter().any(|&(x, _)| x == j)
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<u64> {
        self.adj[i].iter().find(|&&(x, _)| x == j).map(|&(_, w)| w)
    }

    /// Every edge the view knows, as `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for &(j, _) in &self.adj[i] {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// True when every visible node has all its edges visible, i.e. the view
    /// holds the entire connected graph.
    pub fn is_closed(&self) -> bool {
        self.dist.iter().all(|&d| d < self.radius)
    }

    /// The whole visible structure as a graph. Only meaningful when closed.
    pub fn to_graph(&self) -> Result<LabeledGraph> {
        let edges = self.edges();
        let weights = self
            .weighted
            .then(|| edges.iter().map(|&(i, j)| self.weight(i, j).unwrap()).collect());
        LabeledGraph::new(self.ids.clone(), edges, weights, self.labels.clone())
    }

    /// The view that local node `c` would have at radius `r`, with certificates
    /// supplied by `cert`. Requires `dist(c) + r <= radius`.
    pub fn subview(&self, c: usize, r: usize, cert: impl Fn(usize) -> BitString) -> View {
        debug_assert!(self.dist[c] + r <= self.radius);
        build(self, c, r, cert)
    }

    /// Hop distances from `src` over visible edges; `usize::MAX` when unreachable.
    pub fn hops_from(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(v) = q.pop_front() {
            for &(w, _) in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Shortest-path distances from `src` using only visible edges accepted by
    /// `keep`; weighted when the host graph is. `INF` when unreachable.
    pub fn distances_from(&self, src: usize, keep: impl Fn(usize, usize) -> bool) -> Vec<u64> {
        let mut dist = vec![INF; self.len()];
        let mut heap = BinaryHeap::new();
        dist[src] = 0;
        heap.push(Reverse((0u64, src)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, wt) in &self.adj[v] {
                if !keep(v, w) {
                    continue;
                }
                let nd = d + if self.weighted { wt } else { 1 };
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        dist
    }
}
