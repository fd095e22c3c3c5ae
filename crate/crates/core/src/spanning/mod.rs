//! Spanning tree and minimum spanning tree certification. The tree is given
//! by marked edges in the labels (see [`crate::marks`]).

pub mod depth;
pub mod ghs;
pub mod mst;
pub mod st;

use crate::bits::BitString;
use crate::engine::CertificateMap;
use crate::graph::LabeledGraph;
use crate::view::View;

/// The node whose radius-`(t - 1)` ball covers the graph, if any.
pub(crate) fn shallow_center(g: &LabeledGraph, t: usize) -> Option<usize> {
    let (c, ecc) = g.hop_center();
    (ecc < t).then_some(c)
}

/// Shallow certificates: a set shallow bit and a flag at `center`.
pub(crate) fn shallow_certs(g: &LabeledGraph, center: usize) -> CertificateMap {
    (0..g.n()).map(|v| BitString::from_bits(vec![true, v == center])).collect()
}

/// Shallow verification: every node sees a flagged node, and a flagged node
/// must see the whole graph and decide it centrally.
pub(crate) fn verify_shallow(view: &View, decide: impl Fn(&LabeledGraph) -> bool) -> bool {
    let flagged = |i: usize| view.cert(i).len() == 2 && view.cert(i).get(1);
    if view.cert(0).len() != 2 || !(0..view.len()).any(flagged) {
        return false;
    }
    if !flagged(0) {
        return true;
    }
    view.is_closed() && view.to_graph().is_ok_and(|g| decide(&g))
}
