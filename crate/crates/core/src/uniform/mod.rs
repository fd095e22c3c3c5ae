//! Scaling of uniform certificates (the same string at every node) by the
//! ball growth: each node keeps a few `(index, bit)` pairs and the string is
//! rebuilt from the pairs found nearby.
//!
//! Node certificate: gamma(k), then records of `log2_ceil(k)` index bits and
//! one value bit, filling the rest of the string.
//!
//! A node rebuilds the string from the ball of radius `t - 1` around itself
//! and around each neighbor, and rejects unless all of these agree. Pairs are
//! therefore spread so that every ball of radius `t - 1` sees every index.

pub mod universal;

use std::collections::HashSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::{log2_ceil, BitString, BitWriter};
use crate::engine::{CertificateMap, Scheme};
use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;
use crate::view::View;

pub const SAMPLING_CONSTANT: f64 = 6.0;
pub const RESAMPLE_BUDGET: u64 = 64;

/// `log2 n`, at least 1.
pub fn log_n(n: usize) -> f64 {
    (n as f64).log2().max(1.0)
}

/// Largest number of pairs a node may hold.
pub fn load_bound(k: usize, n: usize, growth: usize) -> usize {
    (2.0 * SAMPLING_CONSTANT * k as f64 * log_n(n) / growth as f64).ceil() as usize
}

/// Radii `r` with `b(r) >= log n` and `k >= b(r)`; the upper end is
/// `usize::MAX` when every ball size is at most `k`.
pub fn radius_range(g: &LabeledGraph, k: usize) -> Option<(usize, usize)> {
    let hops: Vec<Vec<usize>> = (0..g.n()).map(|v| g.hop_distances(v)).collect();
    let diam = hops.iter().flatten().copied().max().unwrap_or(0).max(1);
    let growth: Vec<usize> = (0..=diam)
        .map(|r| hops.iter().map(|d| d.iter().filter(|&&x| x <= r).count()).min().unwrap())
        .collect();
    let lo = (1..=diam).find(|&r| growth[r] as f64 >= log_n(g.n()))?;
    let hi = if growth[diam] <= k { usize::MAX } else { (1..=diam).rev().find(|&r| growth[r] <= k)? };
    (lo <= hi).then_some((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairAssignment {
    pub k: usize,
    pub radius: usize,
    /// Per node, the indices it holds together with their bits.
    pub pairs: Vec<Vec<(usize, bool)>>,
}

impl PairAssignment {
    /// Checks coverage of every index in every ball and the load bound.
    pub fn check(&self, g: &LabeledGraph) -> std::result::Result<(), String> {
        let bound = load_bound(self.k, g.n(), g.ball_growth(self.radius));
        if let Some(v) = (0..g.n()).find(|&v| self.pairs[v].len() > bound) {
            return Err(format!("node {v} holds {} pairs, bound {bound}", self.pairs[v].len()));
        }
        self.check_coverage(g)
    }

    /// Checks that every ball holds every index.
    pub fn check_coverage(&self, g: &LabeledGraph) -> std::result::Result<(), String> {
        let gap = (0..g.n()).into_par_iter().find_map_any(|v| {
            let mut seen = vec![false; self.k];
            for u in g.ball(v, self.radius) {
                for &(i, _) in &self.pairs[u] {
                    seen[i] = true;
                }
            }
            seen.iter().position(|&s| !s).map(|i| (v, i))
        });
        match gap {
            Some((v, i)) => Err(format!("index {i} missing from the ball of node {v}")),
            None => Ok(()),
        }
    }

    pub fn encode(&self) -> CertificateMap {
        let width = log2_ceil(self.k as u64);
        self.pairs
            .iter()
            .map(|held| {
                let mut w = BitWriter::new();
                w.gamma(self.k as u64);
                for &(i, b) in held {
                    w.uint(i as u64, width);
                    w.bit(b);
                }
                w.finish()
            })
            .collect()
    }
}

/// Decodes one node's certificate into `(k, pairs)`.
pub fn decode_pairs(cert: &BitString) -> Option<(usize, Vec<(usize, bool)>)> {
    let mut r = cert.reader();
    let k = r.gamma()? as usize;
    let width = log2_ceil(k as u64);
    if k == 0 || r.remaining() % (width + 1) != 0 {
        return None;
    }
    let mut out = Vec::with_capacity(r.remaining() / (width + 1));
    while !r.at_end() {
        let i = r.uint(width)? as usize;
        if i >= k {
            return None;
        }
        out.push((i, r.bit()?));
    }
    Some((k, out))
}

/// Distributes the bits of `s` so that every ball of radius `radius` holds
/// every index, resampling with derived seeds until both invariants hold.
pub fn assign_pairs(s: &BitString, g: &LabeledGraph, radius: usize, seed: u64) -> Result<PairAssignment> {
    match radius_range(g, s.len()) {
        Some((lo, hi)) if (lo..=hi).contains(&radius) => {}
        range => {
            return Err(PlsError::Refused(format!(
                "radius {radius} outside the admissible range {range:?} for k = {}",
                s.len()
            )))
        }
    }
    spread(s, g, radius, seed, true)
}

/// Like [`assign_pairs`] for any radius, checking coverage but not the load.
pub fn spread_pairs(s: &BitString, g: &LabeledGraph, radius: usize, seed: u64) -> Result<PairAssignment> {
    spread(s, g, radius, seed, false)
}

fn spread(s: &BitString, g: &LabeledGraph, radius: usize, seed: u64, bounded: bool) -> Result<PairAssignment> {
    let k = s.len();
    let n = g.n();
    if k == 0 {
        return Err(PlsError::Refused("cannot spread an empty string".into()));
    }
    let growth = g.ball_growth(radius);
    let p = (SAMPLING_CONSTANT * log_n(n) / growth as f64).min(1.0);
    let balls: Vec<Vec<usize>> = (0..n).map(|v| g.ball(v, radius)).collect();
    let mut last_failure = String::new();
    for attempt in 0..RESAMPLE_BUDGET {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let mut held: Vec<Vec<bool>> = (0..n).map(|_| (0..k).map(|_| rng.gen_bool(p)).collect()).collect();
        // count[v][i]: holders of index i in the ball of v
        let mut count = vec![vec![0u32; k]; n];
        for v in 0..n {
            for &u in &balls[v] {
                for i in 0..k {
                    count[v][i] += held[u][i] as u32;
                }
            }
        }
        if let Some(v) = (0..n).find(|&v| count[v].contains(&0)) {
            last_failure = format!("coverage fails at node {v}");
            continue;
        }
        // drop redundant copies greedily, in a fresh node order per index so
        // that the surviving copies spread evenly
        let mut order: Vec<usize> = (0..n).collect();
        for i in 0..k {
            order.shuffle(&mut rng);
            for &u in &order {
                if held[u][i] && balls[u].iter().all(|&v| count[v][i] >= 2) {
                    held[u][i] = false;
                    for &v in &balls[u] {
                        count[v][i] -= 1;
                    }
                }
            }
        }
        let pairs = held
            .iter()
            .map(|h| (0..k).filter(|&i| h[i]).map(|i| (i, s.get(i))).collect())
            .collect();
        let a = PairAssignment { k, radius, pairs };
        match if bounded { a.check(g) } else { a.check_coverage(g) } {
            Ok(()) => return Ok(a),
            Err(e) => last_failure = e,
        }
    }
    Err(PlsError::Refused(format!("no valid assignment after {RESAMPLE_BUDGET} attempts: {last_failure}")))
}

/// Rebuilds the string from the pairs held by view nodes within hop distance
/// `radius` of `center`. `None` on a conflict, a gap or a malformed certificate.
pub fn recover_within(view: &View, center: usize, radius: usize) -> Option<BitString> {
    let hops = view.hops_from(center);
    recover_pairs((0..view.len()).filter(|&u| hops[u] <= radius).map(|u| view.cert(u)))
}

/// Rebuilds the string from a set of pair records.
pub fn recover_pairs<'a>(records: impl IntoIterator<Item = &'a BitString>) -> Option<BitString> {
    let mut k = None;
    let mut bits: Vec<Option<bool>> = Vec::new();
    for record in records {
        let (ku, pairs) = decode_pairs(record)?;
        if *k.get_or_insert(ku) != ku {
            return None;
        }
        bits.resize(ku, None);
        for (i, b) in pairs {
            if *bits[i].get_or_insert(b) != b {
                return None;
            }
        }
    }
    bits.into_iter().collect::<Option<Vec<bool>>>().map(BitString::from_bits)
}

/// Rebuilds the string from every pair in the view.
pub fn recover_uniform(view: &View) -> Option<BitString> {
    recover_within(view, 0, view.radius())
}

/// A radius-1 scheme whose honest certificates are all equal, scaled to radius `t`.
pub struct UniformScaled {
    base: Arc<dyn Scheme>,
    t: usize,
    seed: u64,
}

pub fn scale_uniform(base: Arc<dyn Scheme>, t: usize) -> Result<UniformScaled> {
    if base.radius() != 1 {
        return Err(PlsError::Refused(format!("base scheme has radius {}, expected 1", base.radius())));
    }
    if t < 2 {
        return Err(PlsError::Refused("uniform scaling needs t >= 2".into()));
    }
    Ok(UniformScaled { base, t, seed: 0 })
}

impl UniformScaled {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Radius of the balls that must cover every index.
    pub fn coverage_radius(&self) -> usize {
        self.t - 1
    }

    pub fn assignment(&self, g: &LabeledGraph) -> Result<PairAssignment> {
        let certs = self.base.prove(g)?;
        let s = uniform_string(&certs)?;
        assign_pairs(&s, g, self.coverage_radius(), self.seed)
    }
}

fn uniform_string(certs: &[BitString]) -> Result<BitString> {
    if certs.iter().any(|c| c != &certs[0]) {
        return Err(PlsError::Refused("base certificates are not uniform".into()));
    }
    Ok(certs[0].clone())
}

impl Scheme for UniformScaled {
    fn name(&self) -> String {
        format!("uniform-scale:{}", self.base.name())
    }

    fn radius(&self) -> usize {
        self.t
    }

    fn holds(&self, g: &LabeledGraph) -> Result<bool> {
        self.base.holds(g)
    }

    fn prove(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        Ok(self.assignment(g)?.encode())
    }

    fn verify(&self, view: &View) -> Result<bool> {
        let r = self.coverage_radius();
        let Some(s) = recover_within(view, 0, r) else {
            return Ok(false);
        };
        let neighbors: Vec<usize> = view.neighbors(0).collect();
        for u in neighbors {
            if recover_within(view, u, r).as_ref() != Some(&s) {
                return Ok(false);
            }
        }
        self.base.verify(&view.subview(0, 1, |_| s.clone()))
    }

    fn self_check(&self, cert: &BitString) -> bool {
        decode_pairs(cert).is_some()
    }

    fn forge(&self, g: &LabeledGraph) -> Option<CertificateMap> {
        let s = uniform_string(&self.base.forge(g)?).ok()?;
        assign_pairs(&s, g, self.coverage_radius(), self.seed).ok().map(|a| a.encode())
    }
}

/// Ids of the nodes holding index `i`, for inspection and mutation tests.
pub fn holders(a: &PairAssignment, i: usize) -> HashSet<usize> {
    (0..a.pairs.len()).filter(|&v| a.pairs[v].iter().any(|&(j, _)| j == i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, path};
    use crate::view::extract_view;

    fn pattern(k: usize) -> BitString {
        BitString::from_bits((0..k).map(|i| (i * 7 + 3) % 5 < 2).collect())
    }

    #[test]
    fn single_node_holds_everything() {
        let g = LabeledGraph::from_edges(1, &[]).unwrap();
        let a = assign_pairs(&pattern(9), &g, 1, 0).unwrap();
        assert_eq!(a.pairs[0].len(), 9);
        a.check(&g).unwrap();
    }

    #[test]
    fn complete_graph_at_radius_one() {
        let g = complete(8);
        let a = assign_pairs(&pattern(16), &g, 1, 0).unwrap();
        a.check(&g).unwrap();
        // pruning leaves exactly one copy of every index
        assert_eq!(a.pairs.iter().map(Vec::len).sum::<usize>(), 16);
    }

    #[test]
    fn cycle_assignment_scanned_ball_by_ball() {
        let g = cycle(64);
        let s = pattern(64);
        let a = assign_pairs(&s, &g, 8, 3).unwrap();
        for v in 0..64 {
            let mut seen = vec![None; 64];
            for u in g.ball(v, 8) {
                for &(i, b) in &a.pairs[u] {
                    assert_eq!(b, s.get(i));
                    seen[i] = Some(b);
                }
            }
            assert!(seen.iter().all(Option::is_some), "node {v}");
        }
        assert!(a.pairs.iter().all(|p| p.len() <= load_bound(64, 64, 17)));
        let certs = a.encode();
        for v in 0..64 {
            assert_eq!(recover_uniform(&extract_view(&g, &certs, v, 8).unwrap()), Some(s.clone()));
        }
    }

    #[test]
    fn gaps_and_conflicts_reject() {
        let g = cycle(64);
        let s = pattern(64);
        let a = assign_pairs(&s, &g, 8, 3).unwrap();
        let mut gap = a.clone();
        for held in &mut gap.pairs {
            held.retain(|&(i, _)| i != 3);
        }
        let certs = gap.encode();
        assert_eq!(recover_uniform(&extract_view(&g, &certs, 0, 8).unwrap()), None);

        let mut clash = a.clone();
        clash.pairs[0].push((5, false));
        clash.pairs[1].push((5, true));
        let certs = clash.encode();
        assert_eq!(recover_uniform(&extract_view(&g, &certs, 0, 8).unwrap()), None);
    }

    #[test]
    fn out_of_range_radius_is_refused() {
        // a path of 40 has b(1) = 2 < log2 40
        let g = path(40);
        assert!(matches!(assign_pairs(&pattern(64), &g, 1, 0), Err(PlsError::Refused(_))));
        // and b(r) > k is too large a radius
        assert!(matches!(assign_pairs(&pattern(8), &g, 9, 0), Err(PlsError::Refused(_))));
        assert_eq!(radius_range(&g, 8), Some((5, 7)));
    }

    #[test]
    fn pair_records_round_trip() {
        let a = PairAssignment { k: 5, radius: 1, pairs: vec![vec![(4, true), (0, false)]] };
        let c = &a.encode()[0];
        assert_eq!(decode_pairs(c), Some((5, vec![(4, true), (0, false)])));
        let mut bad = c.clone();
        bad.push(true);
        assert_eq!(decode_pairs(&bad), None);
    }
}
