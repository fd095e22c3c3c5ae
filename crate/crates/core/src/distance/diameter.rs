//! Diameter equals the label `x` carried by every node.
//!
//! Certificate layout: gamma(id_width), gamma(dist_width), the witness pair
//! `a`, `b` (`id_width` bits each), the witness fields `f` and `g`
//! (`dist_width` bits each), then the sparse distance table.
//!
//! The tables give an upper bound: each node reconstructs its distance to
//! every node and checks it against `x`. The witness gives the lower bound:
//! `f` and `g` are distance fields to `a` and `b`, and `b` checks `f(b) >= x`.

use std::collections::HashMap;

use super::{check_tables, sparse_tables, DistanceTable};
use crate::bits::{bit_width, BitString, BitReader, BitWriter};
use crate::engine::{CertificateMap, Scheme};
use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;
use crate::view::View;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerSideWitness {
    pub a: u64,
    pub b: u64,
    pub f: u64,
    pub g: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiameterCert {
    pub witness: LowerSideWitness,
    pub table: DistanceTable,
}

impl DiameterCert {
    pub fn encode(&self, id_width: usize, dist_width: usize) -> BitString {
        let mut w = BitWriter::new();
        w.gamma(id_width as u64);
        w.gamma(dist_width as u64);
        let s = &self.witness;
        w.uint(s.a, id_width);
        w.uint(s.b, id_width);
        w.uint(s.f, dist_width);
        w.uint(s.g, dist_width);
        self.table.write(&mut w, id_width, dist_width);
        w.finish()
    }

    pub fn decode(bits: &BitString) -> Option<Self> {
        let mut r = bits.reader();
        let (iw, dw) = widths(&mut r)?;
        let witness = LowerSideWitness { a: r.uint(iw)?, b: r.uint(iw)?, f: r.uint(dw)?, g: r.uint(dw)? };
        let table = DistanceTable::read(&mut r, iw, dw)?;
        r.at_end().then_some(Self { witness, table })
    }
}

pub(crate) fn widths(r: &mut BitReader<'_>) -> Option<(usize, usize)> {
    let iw = r.gamma()? as usize;
    let dw = r.gamma()? as usize;
    (iw <= 64 && dw <= 64).then_some((iw, dw))
}

/// `g` with every label set to `x`.
pub fn diameter_labels(g: &LabeledGraph, x: u64) -> Result<LabeledGraph> {
    g.clone().with_labels(vec![BitString::from_uint(x, bit_width(x)); g.n()])
}

#[derive(Clone, Debug)]
pub struct DiameterScheme {
    pub t: usize,
    pub seed: u64,
}

impl DiameterScheme {
    pub fn new(t: usize) -> Self {
        Self { t: t.max(1), seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Certificates built from the true distances, whatever the labels say.
    pub fn certificates(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        let apsp = g.all_pairs_distances();
        let d = g.diameter();
        let mut pair = None;
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.sort_by_key(|&v| g.id(v));
        'find: for &a in &order {
            for &b in &order {
                if apsp[a][b] == d {
                    pair = Some((a, b));
                    break 'find;
                }
            }
        }
        let (a, b) = pair.expect("some pair attains the diameter");
        let tables = sparse_tables(g, self.t, self.seed)?;
        let iw = bit_width(g.ids().iter().copied().max().unwrap());
        let dw = bit_width(d);
        Ok((0..g.n())
            .map(|v| {
                let witness = LowerSideWitness { a: g.id(a), b: g.id(b), f: apsp[v][a], g: apsp[v][b] };
                DiameterCert { witness, table: tables[v].clone() }.encode(iw, dw)
            })
            .collect())
    }
}

fn reconstruct_tables(view: &View, tables: &[DistanceTable]) -> Option<HashMap<u64, u64>> {
    let dist = view.distances_from(0, |_, _| true);
    check_tables(view, tables, &dist, false).map(|r| r.distance)
}

/// The distances `D'(u)` the center of `view` rebuilds from the tables in
/// the view's certificates, keyed by identity. `None` when the table checks fail.
pub fn reconstruct(view: &View) -> Option<HashMap<u64, u64>> {
    let tables = (0..view.len()).map(|i| DiameterCert::decode(view.cert(i)).map(|c| c.table)).collect::<Option<Vec<_>>>()?;
    reconstruct_tables(view, &tables)
}

/// Checks one distance field at the center: zero exactly at `root`, every
/// edge changes it by at most its weight, and a neighbor is one edge closer.
fn field_ok(view: &View, field: &[u64], root: u64) -> bool {
    let mine = field[0];
    let mut tight = false;
    for &(j, w) in view.weighted_neighbors(0) {
        let w = if view.is_weighted() { w } else { 1 };
        if mine.abs_diff(field[j]) > w {
            return false;
        }
        tight |= field[j] + w == mine;
    }
    if view.id(0) == root {
        mine == 0
    } else {
        tight
    }
}

impl Scheme for DiameterScheme {
    fn name(&self) -> String {
        "diameter".into()
    }

    fn radius(&self) -> usize {
        self.t
    }

    fn holds(&self, g: &LabeledGraph) -> Result<bool> {
        let d = g.diameter();
        Ok(g.labels().iter().all(|l| l.to_uint() == Some(d)))
    }

    fn prove(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        if !self.holds(g)? {
            return Err(PlsError::NotInLanguage(self.name()));
        }
        self.certificates(g)
    }

    fn verify(&self, view: &View) -> Result<bool> {
        let Some(x) = view.label(0).to_uint() else {
            return Ok(false);
        };
        if view.neighbors(0).any(|j| view.label(j).to_uint() != Some(x)) {
            return Ok(false);
        }
        let Some(certs) = (0..view.len()).map(|i| DiameterCert::decode(view.cert(i))).collect::<Option<Vec<_>>>()
        else {
            return Ok(false);
        };
        // witness at radius 1
        let mine = &certs[0].witness;
        let near: Vec<usize> = std::iter::once(0).chain(view.neighbors(0)).collect();
        if near.iter().any(|&j| certs[j].witness.a != mine.a || certs[j].witness.b != mine.b) {
            return Ok(false);
        }
        let f: Vec<u64> = certs.iter().map(|c| c.witness.f).collect();
        let g: Vec<u64> = certs.iter().map(|c| c.witness.g).collect();
        if !field_ok(view, &f, mine.a) || !field_ok(view, &g, mine.b) {
            return Ok(false);
        }
        if view.id(0) == mine.b && mine.f < x {
            return Ok(false);
        }
        let tables: Vec<DistanceTable> = certs.into_iter().map(|c| c.table).collect();
        Ok(reconstruct_tables(view, &tables).is_some_and(|r| r.values().all(|&d| d <= x)))
    }

    fn forge(&self, g: &LabeledGraph) -> Option<CertificateMap> {
        self.certificates(g).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{prove_and_run, run};
    use crate::graph::{cycle, path, random_connected};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cert_round_trip() {
        let c = DiameterCert {
            witness: LowerSideWitness { a: 3, b: 7, f: 5, g: 0 },
            table: DistanceTable { entries: vec![(3, 5), (7, 0)] },
        };
        assert_eq!(DiameterCert::decode(&c.encode(3, 3)), Some(c));
    }

    #[test]
    fn single_node_accepts_zero() {
        let g = diameter_labels(&LabeledGraph::from_edges(1, &[]).unwrap(), 0).unwrap();
        let s = DiameterScheme::new(3);
        let certs = s.prove(&g).unwrap();
        let c = DiameterCert::decode(&certs[0]).unwrap();
        assert_eq!(c.table.entries, vec![(g.id(0), 0)]);
        assert!(run(&s, &g, &certs, None).unwrap().accepted);
    }

    #[test]
    fn reconstruction_is_exact_on_honest_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_connected(30, 0.1, &mut rng).with_random_distinct_weights(&mut rng);
        let apsp = g.all_pairs_distances();
        let s = DiameterScheme::new(4);
        let g = diameter_labels(&g, g.diameter()).unwrap();
        let certs = s.prove(&g).unwrap();
        for v in 0..g.n() {
            let view = crate::view::extract_view(&g, &certs, v, 4).unwrap();
            let tables: Vec<DistanceTable> =
                (0..view.len()).map(|i| DiameterCert::decode(view.cert(i)).unwrap().table).collect();
            let r = check_tables(&view, &tables, &view.distances_from(0, |_, _| true), false).unwrap();
            assert_eq!(r.distance.len(), g.n());
            for u in 0..g.n() {
                assert_eq!(r.distance[&g.id(u)], apsp[v][u]);
            }
        }
    }

    #[test]
    fn every_single_witness_shift_is_caught() {
        let g = diameter_labels(&path(12), 11).unwrap();
        let s = DiameterScheme::new(3);
        let honest = s.prove(&g).unwrap();
        for v in 0..g.n() {
            for delta in [-1i64, 1] {
                let mut c = DiameterCert::decode(&honest[v]).unwrap();
                let Some(f) = c.witness.f.checked_add_signed(delta) else { continue };
                c.witness.f = f;
                let mut certs = honest.clone();
                let (iw, dw) = widths(&mut honest[v].reader()).unwrap();
                certs[v] = c.encode(iw, dw);
                assert!(!run(&s, &g, &certs, None).unwrap().accepted, "v={v} delta={delta}");
            }
        }
        assert!(prove_and_run(&s, &g).unwrap().accepted);
    }

    #[test]
    fn cycle_has_diameter_half() {
        let g = diameter_labels(&cycle(32), 16).unwrap();
        assert!(prove_and_run(&DiameterScheme::new(8), &g).unwrap().accepted);
    }
}
