//! The marked edges form an `(alpha, beta)`-spanner: for every pair,
//! `dist_H(u, v) <= alpha * dist_G(u, v) + beta`. Unweighted graphs only.
//!
//! Certificate layout: gamma(id_width), gamma(dist_width), the table over
//! `G`, then the table over the marked subgraph `H`.
//!
//! The `H` table only needs to be a lower bound. The `G` table must be exact,
//! so its check also asks that nodes within `t - 1` hops attain every
//! reconstructed minimum. That makes each node's reconstruction at most one
//! more than its neighbor's, hence at most the true distance.

use super::diameter::widths;
use super::{check_tables, sparse_tables, DistanceTable};
use crate::bits::{bit_width, BitString, BitWriter};
use crate::engine::{CertificateMap, Scheme};
use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;
use crate::marks::{marked_subgraph, ViewMarks};
use crate::view::View;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpannerCert {
    pub graph: DistanceTable,
    pub spanner: DistanceTable,
}

impl SpannerCert {
    pub fn encode(&self, id_width: usize, dist_width: usize) -> BitString {
        let mut w = BitWriter::new();
        w.gamma(id_width as u64);
        w.gamma(dist_width as u64);
        self.graph.write(&mut w, id_width, dist_width);
        self.spanner.write(&mut w, id_width, dist_width);
        w.finish()
    }

    pub fn decode(bits: &BitString) -> Option<Self> {
        let mut r = bits.reader();
        let (iw, dw) = widths(&mut r)?;
        let graph = DistanceTable::read(&mut r, iw, dw)?;
        let spanner = DistanceTable::read(&mut r, iw, dw)?;
        r.at_end().then_some(Self { graph, spanner })
    }
}

#[derive(Clone, Debug)]
pub struct SpannerScheme {
    pub alpha: f64,
    pub beta: f64,
    pub t: usize,
    pub seed: u64,
}

impl SpannerScheme {
    pub fn new(alpha: f64, beta: f64, t: usize) -> Result<Self> {
        if !(alpha >= 1.0 && beta >= 0.0) {
            return Err(PlsError::Malformed(format!("need alpha >= 1 and beta >= 0, got {alpha}, {beta}")));
        }
        Ok(Self { alpha, beta, t: t.max(1), seed: 0 })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn stretch_ok(&self, dh: u64, dg: u64) -> bool {
        dh as f64 <= self.alpha * dg as f64 + self.beta + 1e-9
    }

    /// Honest tables for both metrics, whether or not the stretch holds.
    pub fn certificates(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        if g.is_weighted() {
            return Err(PlsError::Refused("spanner certification takes unweighted graphs".into()));
        }
        let h = marked_subgraph(g)
            .ok_or_else(|| PlsError::Refused("marked edges are invalid or do not span a connected subgraph".into()))?;
        let dg = sparse_tables(g, self.t, self.seed)?;
        let dh = sparse_tables(&h, self.t, self.seed.wrapping_add(1 << 32))?;
        let iw = bit_width(g.ids().iter().copied().max().unwrap());
        let dw = bit_width(h.diameter());
        Ok((0..g.n())
            .map(|v| SpannerCert { graph: dg[v].clone(), spanner: dh[v].clone() }.encode(iw, dw))
            .collect())
    }
}

impl Scheme for SpannerScheme {
    fn name(&self) -> String {
        "spanner".into()
    }

    fn radius(&self) -> usize {
        self.t
    }

    fn holds(&self, g: &LabeledGraph) -> Result<bool> {
        if g.is_weighted() {
            return Err(PlsError::Refused("spanner certification takes unweighted graphs".into()));
        }
        let Some(h) = marked_subgraph(g) else {
            return Ok(false);
        };
        let (ag, ah) = (g.all_pairs_distances(), h.all_pairs_distances());
        Ok((0..g.n()).all(|u| (0..g.n()).all(|v| self.stretch_ok(ah[u][v], ag[u][v]))))
    }

    fn prove(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        if !self.holds(g)? {
            return Err(PlsError::NotInLanguage(self.name()));
        }
        self.certificates(g)
    }

    fn verify(&self, view: &View) -> Result<bool> {
        let marks = ViewMarks::new(view);
        if !marks.well_formed(view, 0) {
            return Ok(false);
        }
        let Some(certs) = (0..view.len()).map(|i| SpannerCert::decode(view.cert(i))).collect::<Option<Vec<_>>>()
        else {
            return Ok(false);
        };
        let (dg, dh): (Vec<DistanceTable>, Vec<DistanceTable>) =
            certs.into_iter().map(|c| (c.graph, c.spanner)).unzip();
        let in_g = view.distances_from(0, |_, _| true);
        let in_h = view.distances_from(0, |i, j| marks.marked(view, i, j));
        let Some(rg) = check_tables(view, &dg, &in_g, true) else {
            return Ok(false);
        };
        let Some(rh) = check_tables(view, &dh, &in_h, false) else {
            return Ok(false);
        };
        if rg.distance.len() != rh.distance.len() {
            return Ok(false);
        }
        Ok(rg.distance.iter().all(|(u, &d)| rh.distance.get(u).is_some_and(|&dh| self.stretch_ok(dh, d))))
    }

    fn forge(&self, g: &LabeledGraph) -> Option<CertificateMap> {
        self.certificates(g).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{prove_and_run, run};
    use crate::graph::{cycle, grid};
    use crate::marks::with_marked_edges;

    #[test]
    fn full_marking_is_a_spanner() {
        let g = grid(5, 5);
        let g = with_marked_edges(&g, g.edges()).unwrap();
        let s = SpannerScheme::new(1.0, 0.0, 3).unwrap();
        assert!(prove_and_run(&s, &g).unwrap().accepted);
    }

    #[test]
    fn dropping_a_cycle_edge_stretches_the_pair() {
        let g = cycle(12);
        let edges: Vec<_> = g.edges().iter().copied().filter(|&e| e != (0, 1)).collect();
        let g = with_marked_edges(&g, &edges).unwrap();
        // dist_H(0, 1) = 11 against dist_G = 1
        let tight = SpannerScheme::new(1.0, 9.0, 3).unwrap();
        assert!(!tight.holds(&g).unwrap());
        let v = run(&tight, &g, &tight.forge(&g).unwrap(), None).unwrap();
        assert!(!v.accepted);
        let loose = SpannerScheme::new(1.0, 10.0, 3).unwrap();
        assert!(prove_and_run(&loose, &g).unwrap().accepted);
    }

    #[test]
    fn inflated_graph_distances_are_rejected() {
        let g = cycle(12);
        let edges: Vec<_> = g.edges().iter().copied().filter(|&e| e != (0, 1)).collect();
        let g = with_marked_edges(&g, &edges).unwrap();
        let s = SpannerScheme::new(1.0, 9.0, 3).unwrap();
        let honest = s.forge(&g).unwrap();
        // pretend node 1 is far from node 0 in G by copying the H table over
        let certs: Vec<BitString> = honest
            .iter()
            .map(|c| {
                let mut r = c.reader();
                let (iw, dw) = widths(&mut r).unwrap();
                let mut d = SpannerCert::decode(c).unwrap();
                d.graph = d.spanner.clone();
                d.encode(iw, dw)
            })
            .collect();
        assert!(!run(&s, &g, &certs, None).unwrap().accepted);
    }
}
