//! Sparse distance tables: every node stores its distance to a few targets,
//! chosen so that along the canonical shortest path from any node `v` toward
//! any target `u`, one of the first `t` nodes stores `u`. A radius-`t` view
//! then recovers every distance.
//!
//! Table record layout: gamma(count), then `count` entries of identity
//! (`id_width` bits) and distance (`dist_width` bits), in ascending identity
//! order. Both widths are written once per certificate as gamma codes.

pub mod diameter;
pub mod spanner;

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::{BitReader, BitWriter};
use crate::error::{PlsError, Result};
use crate::graph::{LabeledGraph, INF};
use crate::view::View;

pub const SAMPLING_CONSTANT: f64 = 6.0;
pub const RESAMPLE_BUDGET: u64 = 64;

/// Entries `(identity, distance)` sorted by identity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DistanceTable {
    pub entries: Vec<(u64, u64)>,
}

impl DistanceTable {
    pub fn get(&self, id: u64) -> Option<u64> {
        self.entries.binary_search_by_key(&id, |e| e.0).ok().map(|i| self.entries[i].1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub(crate) fn write(&self, w: &mut BitWriter, id_width: usize, dist_width: usize) {
        w.gamma(self.entries.len() as u64);
        for &(id, d) in &self.entries {
            w.uint(id, id_width);
            w.uint(d, dist_width);
        }
    }

    pub(crate) fn read(r: &mut BitReader<'_>, id_width: usize, dist_width: usize) -> Option<Self> {
        let count = r.gamma()? as usize;
        if count > r.remaining() {
            return None;
        }
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            entries.push((r.uint(id_width)?, r.uint(dist_width)?));
        }
        entries.windows(2).all(|w| w[0].0 < w[1].0).then_some(Self { entries })
    }
}

/// Next hop from every node toward `target` on the canonical shortest path:
/// the smallest-identity neighbor that lies on some shortest path.
pub fn canonical_next_hops(g: &LabeledGraph, target: usize) -> (Vec<u64>, Vec<Option<usize>>) {
    let dist = g.distances(target);
    let next = (0..g.n())
        .map(|v| {
            (v != target).then(|| {
                *g.neighbors(v)
                    .iter()
                    .filter(|&&w| dist[w] + g.weight(v, w) == dist[v])
                    .min_by_key(|&&w| g.id(w))
                    .unwrap()
            })
        })
        .collect();
    (dist, next)
}

/// For every ordered pair `(v, u)`, whether one of the first `t` nodes of the
/// canonical path from `v` to `u` stores `u`. Returns the first uncovered pair.
pub fn check_coverage(g: &LabeledGraph, tables: &[DistanceTable], t: usize) -> std::result::Result<(), String> {
    let bad = (0..g.n()).into_par_iter().find_map_any(|u| {
        let (_, next) = canonical_next_hops(g, u);
        let id = g.id(u);
        (0..g.n()).find_map(|v| {
            let mut cur = v;
            for step in 0..t {
                if tables[cur].get(id).is_some() {
                    return None;
                }
                match next[cur] {
                    Some(w) if step + 1 < t => cur = w,
                    _ => break,
                }
            }
            Some((v, u))
        })
    });
    match bad {
        Some((v, u)) => Err(format!("no node among the first {t} on the path from {} to {} stores it", g.id(v), g.id(u))),
        None => Ok(()),
    }
}

/// Sparse tables for the metric of `g`: each node stores a target with
/// probability `min(1, c log n / t)`, redundant entries are pruned, and the
/// coverage property is verified before returning. Every node stores itself.
pub fn sparse_tables(g: &LabeledGraph, t: usize, seed: u64) -> Result<Vec<DistanceTable>> {
    let n = g.n();
    let t = t.max(1);
    let p = (SAMPLING_CONSTANT * (n as f64).log2().max(1.0) / t as f64).min(1.0);
    // per target: distances, and for each node the nodes whose first t path
    // nodes include it
    let per_target: Vec<(Vec<u64>, Vec<Vec<usize>>)> = (0..n)
        .into_par_iter()
        .map(|u| {
            let (dist, next) = canonical_next_hops(g, u);
            let mut members = vec![Vec::new(); n];
            for v in 0..n {
                let mut cur = v;
                for step in 0..t {
                    members[cur].push(v);
                    match next[cur] {
                        Some(w) if step + 1 < t => cur = w,
                        _ => break,
                    }
                }
            }
            (dist, members)
        })
        .collect();
    let mut last = String::new();
    for attempt in 0..RESAMPLE_BUDGET {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let mut store = vec![vec![false; n]; n]; // store[u][v]: v keeps u
        let mut covered = true;
        for u in 0..n {
            for v in 0..n {
                store[u][v] = v == u || rng.gen_bool(p);
            }
            let (_, members) = &per_target[u];
            let mut count = vec![0u32; n];
            for v in 0..n {
                if store[u][v] {
                    for &w in &members[v] {
                        count[w] += 1;
                    }
                }
            }
            if count.contains(&0) {
                covered = false;
                last = format!("sample misses target {}", g.id(u));
                break;
            }
            let mut order: Vec<usize> = (0..n).filter(|&v| v != u).collect();
            order.shuffle(&mut rng);
            for v in order {
                if store[u][v] && members[v].iter().all(|&w| count[w] >= 2) {
                    store[u][v] = false;
                    for &w in &members[v] {
                        count[w] -= 1;
                    }
                }
            }
        }
        if !covered {
            continue;
        }
        let tables: Vec<DistanceTable> = (0..n)
            .map(|v| {
                let mut entries: Vec<(u64, u64)> =
                    (0..n).filter(|&u| store[u][v]).map(|u| (g.id(u), per_target[u].0[v])).collect();
                entries.sort_unstable();
                DistanceTable { entries }
            })
            .collect();
        match check_coverage(g, &tables, t) {
            Ok(()) => return Ok(tables),
            Err(e) => last = e,
        }
    }
    Err(PlsError::Refused(format!("no covering tables after {RESAMPLE_BUDGET} attempts: {last}")))
}

/// Result of the table checks at a view's center.
pub(crate) struct Reconstruction {
    /// `D'(u)` for every identity the view can reconstruct.
    pub distance: HashMap<u64, u64>,
}

/// Runs the table checks at the center of `view` for tables `tables[i]` (one
/// per view node) under view distances `dist` (`INF` for unusable nodes).
/// With `exact`, also requires that nodes within `t - 1` hops already attain
/// every minimum, which makes the reconstruction an upper bound too.
pub(crate) fn check_tables(
    view: &View,
    tables: &[DistanceTable],
    dist: &[u64],
    exact: bool,
) -> Option<Reconstruction> {
    let t = view.radius();
    let me = view.id(0);
    let own = &tables[0];
    if own.get(me) != Some(0) {
        return None;
    }
    let usable: Vec<usize> = (0..view.len()).filter(|&i| dist[i] != INF).collect();
    for &(u, d0) in &own.entries {
        let mut tight = u == me;
        for &i in usable.iter().filter(|&&i| i != 0) {
            if let Some(d) = tables[i].get(u) {
                if d0 > d + dist[i] || d > d0 + dist[i] {
                    return None;
                }
                tight |= d + dist[i] == d0;
            }
        }
        if !tight {
            return None;
        }
    }
    // every identity mentioned in the view is stored within t - 1 hops
    let near: HashSet<u64> = (0..view.len())
        .filter(|&i| view.dist(i) < t)
        .flat_map(|i| tables[i].entries.iter().map(|e| e.0))
        .collect();
    if (0..view.len()).any(|i| tables[i].entries.iter().any(|e| !near.contains(&e.0))) {
        return None;
    }
    let mut distance: HashMap<u64, u64> = HashMap::new();
    let mut near_min: HashMap<u64, u64> = HashMap::new();
    for &i in &usable {
        for &(u, d) in &tables[i].entries {
            let total = d.saturating_add(dist[i]);
            let e = distance.entry(u).or_insert(INF);
            *e = (*e).min(total);
            if view.dist(i) < t {
                let e = near_min.entry(u).or_insert(INF);
                *e = (*e).min(total);
            }
        }
    }
    if near.iter().any(|u| !distance.contains_key(u)) {
        return None;
    }
    if exact && distance.iter().any(|(u, d)| near_min.get(u) != Some(d)) {
        return None;
    }
    Some(Reconstruction { distance })
}
