//! Phase-by-phase fragment merging: each fragment adds its lightest outgoing
//! edge until one fragment remains.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhsChoice {
    /// Identity naming the fragment: its endpoint of the chosen edge.
    pub fragment: u64,
    pub edge: (u64, u64),
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhsPhase {
    /// Node identity to fragment identity, at the start of the phase.
    pub fragment_of: BTreeMap<u64, u64>,
    pub choices: Vec<GhsChoice>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GhsTrace {
    pub phases: Vec<GhsPhase>,
}

impl GhsTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    /// Chosen edges as node pairs `(a, b)` with `a < b`.
    pub fn edges(&self, g: &LabeledGraph) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .phases
            .iter()
            .flat_map(|p| &p.choices)
            .map(|c| {
                let (a, b) = (g.node_of_id(c.edge.0).unwrap(), g.node_of_id(c.edge.1).unwrap());
                (a.min(b), a.max(b))
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn check_distinct_weights(g: &LabeledGraph) -> Result<()> {
    let mut seen = HashSet::new();
    for &(a, b) in g.edges() {
        if !seen.insert(g.weight(a, b)) {
            return Err(PlsError::Malformed(format!("duplicate edge weight {}", g.weight(a, b))));
        }
    }
    Ok(())
}

pub fn ghs_run(g: &LabeledGraph) -> Result<GhsTrace> {
    check_distinct_weights(g)?;
    let n = g.n();
    let mut comp: Vec<usize> = (0..n).collect();
    let mut trace = GhsTrace::default();
    loop {
        let count = comp.iter().collect::<HashSet<_>>().len();
        if count <= 1 {
            return Ok(trace);
        }
        // lightest outgoing edge per fragment, as (weight, inside, outside)
        let mut best: BTreeMap<usize, (u64, usize, usize)> = BTreeMap::new();
        for &(a, b) in g.edges() {
            if comp[a] == comp[b] {
                continue;
            }
            let w = g.weight(a, b);
            for (x, y) in [(a, b), (b, a)] {
                let e = best.entry(comp[x]).or_insert((w, x, y));
                if w < e.0 {
                    *e = (w, x, y);
                }
            }
        }
        let name: BTreeMap<usize, u64> = best.iter().map(|(&f, &(_, x, _))| (f, g.id(x))).collect();
        let fragment_of = (0..n).map(|v| (g.id(v), name[&comp[v]])).collect();
        let choices = best
            .values()
            .map(|&(w, x, y)| GhsChoice { fragment: g.id(x), edge: (g.id(x), g.id(y)), weight: w })
            .collect();
        trace.phases.push(GhsPhase { fragment_of, choices });
        // merge along the chosen edges
        for &(_, x, y) in best.values() {
            let (from, to) = (comp[x].max(comp[y]), comp[x].min(comp[y]));
            for c in comp.iter_mut() {
                if *c == from {
                    *c = to;
                }
            }
        }
    }
}

/// Minimum spanning tree by sorting edges, as node pairs `(a, b)` with `a < b`.
pub fn kruskal(g: &LabeledGraph) -> Vec<(usize, usize)> {
    let mut edges = g.edges().to_vec();
    edges.sort_by_key(|&(a, b)| (g.weight(a, b), a, b));
    let mut root: Vec<usize> = (0..g.n()).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    let mut out = Vec::new();
    for (a, b) in edges {
        let (ra, rb) = (find(&mut root, a), find(&mut root, b));
        if ra != rb {
            root[ra] = rb;
            out.push((a, b));
        }
    }
    out.sort_unstable();
    out
}
