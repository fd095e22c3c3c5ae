use serde::{Deserialize, Serialize};

use super::LabeledGraph;
use crate::bits::BitString;
use crate::error::{PlsError, Result};

#[derive(Serialize, Deserialize)]
struct WireLabel {
    hex: String,
    bits: usize,
}

/// JSON form of a labeled graph: `{"n", "ids", "edges", "labels"}`. Each edge is
/// `[u, v]` or `[u, v, w]`; each label is `{"hex", "bits"}`.
#[derive(Serialize, Deserialize)]
pub struct Instance {
    n: usize,
    ids: Vec<u64>,
    edges: Vec<Vec<u64>>,
    labels: Vec<WireLabel>,
}

impl Instance {
    pub fn from_graph(g: &LabeledGraph) -> Self {
        let edges = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| match g.weights() {
                Some(w) => vec![a as u64, b as u64, w[i]],
                None => vec![a as u64, b as u64],
            })
            .collect();
        let labels = g.labels().iter().map(|l| WireLabel { hex: l.to_hex(), bits: l.len() }).collect();
        Self { n: g.n(), ids: g.ids().to_vec(), edges, labels }
    }

    pub fn into_graph(self) -> Result<LabeledGraph> {
        if self.ids.len() != self.n || self.labels.len() != self.n {
            return Err(PlsError::Malformed(format!(
                "n = {} but {} ids and {} labels",
                self.n,
                self.ids.len(),
                self.labels.len()
            )));
        }
        let weighted = self.edges.first().is_some_and(|e| e.len() == 3);
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut weights = Vec::new();
        for e in &self.edges {
            match (e.len(), weighted) {
                (2, false) => {}
                (3, true) => weights.push(e[2]),
                _ => return Err(PlsError::Malformed(format!("edge {e:?} has the wrong arity"))),
            }
            edges.push((e[0] as usize, e[1] as usize));
        }
        let labels = self
            .labels
            .iter()
            .map(|l| BitString::from_hex(&l.hex, l.bits))
            .collect::<Result<Vec<_>>>()?;
        LabeledGraph::new(self.ids, edges, weighted.then_some(weights), labels)
    }

    pub fn to_json(g: &LabeledGraph) -> String {
        serde_json::to_string_pretty(&Self::from_graph(g)).expect("instance serializes")
    }

    pub fn parse(s: &str) -> Result<LabeledGraph> {
        serde_json::from_str::<Self>(s)?.into_graph()
    }
}
