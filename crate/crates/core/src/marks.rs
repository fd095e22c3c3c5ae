//! Edge subsets carried in node labels. A label lists identities of incident
//! neighbors: gamma(count), then for a nonempty list gamma(width) and the
//! identities in ascending order. An edge is marked when both endpoints list
//! each other.

use crate::bits::{bit_width, BitString, BitWriter};
use crate::error::Result;
use crate::graph::LabeledGraph;
use crate::view::View;

pub fn encode_marks(ids: &[u64]) -> BitString {
    let mut ids = ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let mut w = BitWriter::new();
    w.gamma(ids.len() as u64);
    if let Some(&max) = ids.last() {
        let width = bit_width(max);
        w.gamma(width as u64);
        for id in ids {
            w.uint(id, width);
        }
    }
    w.finish()
}

pub fn decode_marks(label: &BitString) -> Option<Vec<u64>> {
    let mut r = label.reader();
    let count = r.gamma()? as usize;
    if count == 0 {
        return r.at_end().then(Vec::new);
    }
    let width = r.gamma()? as usize;
    if width > 64 || count > r.remaining() {
        return None;
    }
    let ids: Vec<u64> = (0..count).map(|_| r.uint(width)).collect::<Option<_>>()?;
    (r.at_end() && ids.windows(2).all(|w| w[0] < w[1])).then_some(ids)
}

/// `g` relabeled so that exactly `edges` are marked.
pub fn with_marked_edges(g: &LabeledGraph, edges: &[(usize, usize)]) -> Result<LabeledGraph> {
    let mut lists = vec![Vec::new(); g.n()];
    for &(a, b) in edges {
        lists[a].push(g.id(b));
        lists[b].push(g.id(a));
    }
    g.clone().with_labels(lists.iter().map(|l| encode_marks(l)).collect())
}

/// The marked edges of `g`, or `None` when some label does not parse or lists
/// a non-neighbor.
pub fn marked_edges(g: &LabeledGraph) -> Option<Vec<(usize, usize)>> {
    let lists: Vec<Vec<u64>> = g.labels().iter().map(decode_marks).collect::<Option<_>>()?;
    for v in 0..g.n() {
        if lists[v].iter().any(|&id| g.node_of_id(id).map_or(true, |w| !g.has_edge(v, w))) {
            return None;
        }
    }
    Some(
        g.edges()
            .iter()
            .copied()
            .filter(|&(a, b)| lists[a].binary_search(&g.id(b)).is_ok() && lists[b].binary_search(&g.id(a)).is_ok())
            .collect(),
    )
}

/// The subgraph of marked edges on the same nodes, identities and weights;
/// `None` when the labels are invalid or the marked edges do not connect.
pub fn marked_subgraph(g: &LabeledGraph) -> Option<LabeledGraph> {
    let edges = marked_edges(g)?;
    let weights = g.is_weighted().then(|| edges.iter().map(|&(a, b)| g.weight(a, b)).collect());
    LabeledGraph::new(g.ids().to_vec(), edges, weights, g.labels().to_vec()).ok()
}

/// Marked-edge predicate for view nodes. Labels that do not parse mark nothing.
pub struct ViewMarks {
    lists: Vec<Option<Vec<u64>>>,
}

impl ViewMarks {
    pub fn new(view: &View) -> Self {
        Self { lists: (0..view.len()).map(|i| decode_marks(view.label(i))).collect() }
    }

    pub fn list(&self, i: usize) -> Option<&[u64]> {
        self.lists[i].as_deref()
    }

    fn lists(&self, i: usize, id: u64) -> bool {
        self.lists[i].as_ref().is_some_and(|l| l.binary_search(&id).is_ok())
    }

    pub fn marked(&self, view: &View, i: usize, j: usize) -> bool {
        self.lists(i, view.id(j)) && self.lists(j, view.id(i))
    }

    /// Whether node `i` (with full adjacency) has a parseable list naming only
    /// its neighbors.
    pub fn well_formed(&self, view: &View, i: usize) -> bool {
        self.lists[i].as_ref().is_some_and(|l| {
            l.iter().all(|&id| view.local_of_id(id).is_some_and(|j| view.has_edge(i, j)))
        })
    }
}
