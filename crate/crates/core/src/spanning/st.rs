//! The marked edges form a spanning tree.
//!
//! Shallow certificate (the graph has radius below `t`): bit 1, then a flag
//! marking the center, which decides alone.
//!
//! Deep certificate: bit 0, then the body: gamma(c), the depth certificate
//! for the tree rooted at its smallest identity, and the pair record spreading
//! the root's identity with coverage radius `t - 1`. Depths decreasing toward
//! the parent rule out cycles; the single node without a parent checks that
//! the spread identity is its own, which rules out a second component.

use std::collections::VecDeque;

use super::depth::{chunk_width, DepthChunkCert, Oriented};
use super::{shallow_center, shallow_certs, verify_shallow};
use crate::bits::{bit_width, BitString, BitWriter};
use crate::engine::{CertificateMap, Scheme};
use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;
use crate::marks::{marked_edges, marked_subgraph, ViewMarks};
use crate::uniform::{recover_pairs, spread_pairs};
use crate::view::View;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StBody {
    pub c: usize,
    pub depth: DepthChunkCert,
    pub pairs: BitString,
}

impl StBody {
    pub fn encode(&self) -> BitString {
        let mut w = BitWriter::new();
        w.gamma(self.c as u64);
        self.depth.write(&mut w, self.c);
        w.bits(&self.pairs);
        w.finish()
    }

    pub fn decode(bits: &BitString) -> Option<Self> {
        let mut r = bits.reader();
        let c = r.gamma()? as usize;
        if c > 64 {
            return None;
        }
        let depth = DepthChunkCert::read(&mut r, c)?;
        let pairs = r.take(r.remaining())?;
        Some(Self { c, depth, pairs })
    }
}

/// Parent and depth of every node in the tree `edges`, rooted at `root`.
pub fn orient(g: &LabeledGraph, edges: &[(usize, usize)], root: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    let mut adj = vec![Vec::new(); g.n()];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut parent = vec![None; g.n()];
    let mut depth = vec![usize::MAX; g.n()];
    depth[root] = 0;
    let mut q = VecDeque::from([root]);
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                parent[w] = Some(v);
                q.push_back(w);
            }
        }
    }
    (parent, depth)
}

/// Deep bodies for the spanning tree `edges` of `g`.
pub fn st_bodies(g: &LabeledGraph, edges: &[(usize, usize)], t: usize, seed: u64) -> Result<Vec<StBody>> {
    let root = (0..g.n()).min_by_key(|&v| g.id(v)).unwrap();
    let (_, depth) = orient(g, edges, root);
    if depth.contains(&usize::MAX) {
        return Err(PlsError::NotInLanguage("marked edges do not span".into()));
    }
    let c = chunk_width(*depth.iter().max().unwrap(), t);
    let id = g.id(root);
    let spread = spread_pairs(&BitString::from_uint(id, bit_width(id)), g, t - 1, seed)?;
    Ok(spread
        .encode()
        .into_iter()
        .zip(&depth)
        .map(|(pairs, &d)| StBody { c, depth: DepthChunkCert::for_depth(d, c, t), pairs })
        .collect())
}

/// Deep checks at the center of `view` given every view node's body.
/// Returns the orientation for further checks.
pub(crate) fn check_st_deep<'a>(view: &'a View, marks: &'a ViewMarks, bodies: &[StBody]) -> Option<Oriented<'a>> {
    let t = view.radius();
    let c = bodies[0].c;
    if bodies.iter().any(|b| b.c != c) || !marks.well_formed(view, 0) {
        return None;
    }
    if view.neighbors(0).next().is_some() && !view.neighbors(0).any(|j| marks.marked(view, 0, j)) {
        return None;
    }
    let o = Oriented { view, marks, certs: bodies.iter().map(|b| b.depth).collect(), c, t };
    let parent = o.parent(0)?;
    let d = o.depth(0)?;
    if let Some(p) = parent {
        if o.depth(p)?.checked_add(1) != Some(d) {
            return None;
        }
    }
    let recover = |center: usize| {
        let hops = view.hops_from(center);
        recover_pairs((0..view.len()).filter(|&i| hops[i] < t).map(|i| &bodies[i].pairs))
    };
    let root_id = recover(0)?;
    if view.neighbors(0).any(|j| recover(j).as_ref() != Some(&root_id)) {
        return None;
    }
    if parent.is_none() && root_id.to_uint() != Some(view.id(0)) {
        return None;
    }
    Some(o)
}

pub fn is_spanning_tree(g: &LabeledGraph) -> bool {
    marked_subgraph(g).is_some_and(|h| h.is_tree())
}

#[derive(Clone, Debug)]
pub struct StScheme {
    pub t: usize,
    pub seed: u64,
}

impl StScheme {
    pub fn new(t: usize) -> Self {
        Self { t: t.max(1), seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Deep certificates for any marked graph whose marked edges form a
    /// spanning forest reaching every node from the smallest identity.
    pub fn deep_certificates(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        let edges = marked_edges(g).ok_or_else(|| PlsError::Malformed("invalid marks".into()))?;
        Ok(st_bodies(g, &edges, self.t, self.seed)?
            .iter()
            .map(|b| {
                let mut w = BitWriter::new();
                w.bit(false);
                w.bits(&b.encode());
                w.finish()
            })
            .collect())
    }
}

impl Scheme for StScheme {
    fn name(&self) -> String {
        "st".into()
    }

    fn radius(&self) -> usize {
        self.t
    }

    fn holds(&self, g: &LabeledGraph) -> Result<bool> {
        Ok(is_spanning_tree(g))
    }

    fn prove(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        if !self.holds(g)? {
            return Err(PlsError::NotInLanguage(self.name()));
        }
        match shallow_center(g, self.t) {
            Some(c) => Ok(shallow_certs(g, c)),
            None => self.deep_certificates(g),
        }
    }

    fn verify(&self, view: &View) -> Result<bool> {
        let shallow = |i: usize| view.cert(i).len() > 0 && view.cert(i).get(0);
        if view.cert(0).is_empty() || (0..view.len()).any(|i| view.cert(i).is_empty() || shallow(i) != shallow(0)) {
            return Ok(false);
        }
        if shallow(0) {
            return Ok(verify_shallow(view, is_spanning_tree));
        }
        let Some(bodies) = (0..view.len())
            .map(|i| StBody::decode(&view.cert(i).slice(1, view.cert(i).len())))
            .collect::<Option<Vec<_>>>()
        else {
            return Ok(false);
        };
        let marks = ViewMarks::new(view);
        Ok(check_st_deep(view, &marks, &bodies).is_some())
    }

    fn self_check(&self, cert: &BitString) -> bool {
        match cert.as_slice().first() {
            None => false,
            Some(true) => cert.len() == 2,
            Some(false) => StBody::decode(&cert.slice(1, cert.len())).is_some(),
        }
    }

    fn forge(&self, g: &LabeledGraph) -> Option<CertificateMap> {
        marked_edges(g)?;
        self.deep_certificates(g).ok()
    }
}
