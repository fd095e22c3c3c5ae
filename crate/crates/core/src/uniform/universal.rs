//! The universal scheme: every node gets the whole instance and checks its
//! own row of the adjacency matrix, then asks a centralized oracle.
//!
//! Instance string: gamma(n), the n x n matrix (rows and columns in ascending
//! identity order), then per node gamma(label length) and the label, then
//! gamma(identity width) and the identities.

use std::collections::VecDeque;
use std::sync::Arc;

use super::{scale_uniform, UniformScaled};
use crate::bits::{bit_width, BitString, BitWriter};
use crate::engine::{CertificateMap, Scheme};
use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;
use crate::view::View;

pub type Oracle = Arc<dyn Fn(&LabeledGraph) -> bool + Send + Sync>;

/// Named predicates available to the universal scheme.
pub fn predicate(name: &str) -> Option<Oracle> {
    let f: Oracle = match name {
        "has-one" => Arc::new(|g: &LabeledGraph| g.labels().iter().any(|l| l.len() == 1 && l.get(0))),
        "all-equal" => Arc::new(|g: &LabeledGraph| g.labels().iter().all(|l| l == g.label(0))),
        "acyclic" => Arc::new(|g: &LabeledGraph| g.m() + 1 == g.n()),
        "even-order" => Arc::new(|g: &LabeledGraph| g.n() % 2 == 0),
        "bipartite" => Arc::new(is_bipartite),
        _ => return None,
    };
    Some(f)
}

pub const PREDICATES: &[&str] = &["has-one", "all-equal", "acyclic", "even-order", "bipartite"];

fn is_bipartite(g: &LabeledGraph) -> bool {
    let mut side = vec![None; g.n()];
    side[0] = Some(false);
    let mut q = VecDeque::from([0]);
    while let Some(v) = q.pop_front() {
        let s = side[v].unwrap();
        for &w in g.neighbors(v) {
            match side[w] {
                None => {
                    side[w] = Some(!s);
                    q.push_back(w);
                }
                Some(x) if x == s => return false,
                _ => {}
            }
        }
    }
    true
}

/// The instance with nodes in ascending identity order.
pub fn encode_instance(g: &LabeledGraph) -> BitString {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| g.id(v));
    let mut w = BitWriter::new();
    w.gamma(g.n() as u64);
    for &a in &order {
        for &b in &order {
            w.bit(g.has_edge(a, b));
        }
    }
    for &v in &order {
        w.gamma(g.label(v).len() as u64);
        w.bits(g.label(v));
    }
    let width = bit_width(g.ids().iter().copied().max().unwrap());
    w.gamma(width as u64);
    for &v in &order {
        w.uint(g.id(v), width);
    }
    w.finish()
}

struct Decoded {
    ids: Vec<u64>,
    labels: Vec<BitString>,
    matrix: Vec<Vec<bool>>,
}

fn decode_instance(s: &BitString) -> Option<Decoded> {
    let mut r = s.reader();
    let n = r.gamma()? as usize;
    if n == 0 || n * n > r.remaining() {
        return None;
    }
    let matrix: Vec<Vec<bool>> = (0..n).map(|_| (0..n).map(|_| r.bit()).collect()).collect::<Option<_>>()?;
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let len = r.gamma()? as usize;
        labels.push(r.take(len)?);
    }
    let width = r.gamma()? as usize;
    if width == 0 || width > 64 {
        return None;
    }
    let ids: Vec<u64> = (0..n).map(|_| r.uint(width)).collect::<Option<_>>()?;
    if !r.at_end() || ids.windows(2).any(|w| w[0] >= w[1]) {
        return None;
    }
    Some(Decoded { ids, labels, matrix })
}

fn rebuild(d: &Decoded) -> Option<LabeledGraph> {
    let n = d.ids.len();
    let mut edges = Vec::new();
    for a in 0..n {
        if d.matrix[a][a] {
            return None;
        }
        for b in a + 1..n {
            if d.matrix[a][b] != d.matrix[b][a] {
                return None;
            }
            if d.matrix[a][b] {
                edges.push((a, b));
            }
        }
    }
    LabeledGraph::new(d.ids.clone(), edges, None, d.labels.clone()).ok()
}

/// Radius-1 base: the certificate is the encoded instance.
pub struct UniversalBase {
    name: String,
    oracle: Oracle,
}

impl UniversalBase {
    pub fn new(name: &str, oracle: Oracle) -> Self {
        Self { name: name.to_string(), oracle }
    }
}

impl Scheme for UniversalBase {
    fn name(&self) -> String {
        format!("universal:{}", self.name)
    }

    fn radius(&self) -> usize {
        1
    }

    fn holds(&self, g: &LabeledGraph) -> Result<bool> {
        Ok((self.oracle)(g))
    }

    fn prove(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        if !(self.oracle)(g) {
            return Err(PlsError::NotInLanguage(self.name()));
        }
        Ok(vec![encode_instance(g); g.n()])
    }

    fn verify(&self, view: &View) -> Result<bool> {
        let mine = view.cert(0);
        if view.neighbors(0).any(|j| view.cert(j) != mine) {
            return Ok(false);
        }
        let Some(d) = decode_instance(mine) else {
            return Ok(false);
        };
        let Ok(me) = d.ids.binary_search(&view.id(0)) else {
            return Ok(false);
        };
        if &d.labels[me] != view.label(0) {
            return Ok(false);
        }
        let mut actual = vec![false; d.ids.len()];
        for j in view.neighbors(0) {
            match d.ids.binary_search(&view.id(j)) {
                Ok(x) => actual[x] = true,
                Err(_) => return Ok(false),
            }
        }
        if d.matrix[me] != actual {
            return Ok(false);
        }
        Ok(rebuild(&d).is_some_and(|g| (self.oracle)(&g)))
    }

    fn forge(&self, g: &LabeledGraph) -> Option<CertificateMap> {
        Some(vec![encode_instance(g); g.n()])
    }
}

/// The universal scheme for `oracle`, scaled to radius `t`.
pub fn universal_scheme(name: &str, oracle: Oracle, t: usize) -> Result<UniformScaled> {
    scale_uniform(Arc::new(UniversalBase::new(name, oracle)), t)
}
