//! The marked edges form the minimum spanning tree (distinct weights).
//!
//! Shallow certificate: as for spanning trees; the flagged center runs the
//! centralized check.
//!
//! Deep certificate:
//!
//! ```text
//! 0 | gamma(len) spanning-tree body | gamma(P) | phase (bit_width(P) bits)
//!   | child-adds | parent-adds | P times: [ counter (2) | small (1) | gamma(len) pairs if not small ]
//! ```
//!
//! The phase and adder bits describe the edge to the parent. For every phase
//! the fragments are the components of the tree edges of earlier phases. Each
//! fragment is oriented toward the endpoint `u` of its chosen edge by a mod-3
//! counter. A small fragment (all within `t - 1` of `u`) is checked by `u`
//! alone. Otherwise the string gamma-coded `(id(u), w(e))` is spread over the
//! fragment with coverage radius `t - 1`, so every node learns it and can also
//! recompute it for each neighbor. That tells outgoing edges apart from
//! internal ones.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use super::depth::Oriented;
use super::ghs::{check_distinct_weights, ghs_run, kruskal};
use super::st::{check_st_deep, is_spanning_tree, orient, st_bodies, StBody};
use super::{shallow_center, shallow_certs, verify_shallow};
use crate::bits::{bit_width, BitString, BitWriter};
use crate::engine::{CertificateMap, Scheme};
use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;
use crate::marks::{marked_edges, ViewMarks};
use crate::uniform::{recover_pairs, spread_pairs};
use crate::view::View;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseCert {
    pub counter: u8,
    pub small: bool,
    pub pairs: Option<BitString>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MstCert {
    pub st: StBody,
    pub phase: u64,
    pub child_adds: bool,
    pub parent_adds: bool,
    pub phases: Vec<PhaseCert>,
}

impl MstCert {
    pub fn encode(&self) -> BitString {
        let mut w = BitWriter::new();
        w.bit(false);
        let body = self.st.encode();
        w.gamma(body.len() as u64);
        w.bits(&body);
        let p = self.phases.len() as u64;
        w.gamma(p);
        w.uint(self.phase, bit_width(p));
        w.bit(self.child_adds);
        w.bit(self.parent_adds);
        for ph in &self.phases {
            w.uint(ph.counter as u64, 2);
            w.bit(ph.small);
            if let Some(pairs) = &ph.pairs {
                w.gamma(pairs.len() as u64);
                w.bits(pairs);
            }
        }
        w.finish()
    }

    pub fn decode(bits: &BitString) -> Option<Self> {
        let mut r = bits.reader();
        if r.bit()? {
            return None;
        }
        let len = r.gamma()? as usize;
        let st = StBody::decode(&r.take(len)?)?;
        let p = r.gamma()?;
        if p > r.remaining() as u64 {
            return None;
        }
        let phase = r.uint(bit_width(p))?;
        let (child_adds, parent_adds) = (r.bit()?, r.bit()?);
        let mut phases = Vec::with_capacity(p as usize);
        for _ in 0..p {
            let counter = r.uint(2)? as u8;
            let small = r.bit()?;
            let pairs = if small {
                None
            } else {
                let len = r.gamma()? as usize;
                Some(r.take(len)?)
            };
            if counter > 2 {
                return None;
            }
            phases.push(PhaseCert { counter, small, pairs });
        }
        r.at_end().then_some(Self { st, phase, child_adds, parent_adds, phases })
    }
}

/// The fragment string: gamma-coded widths followed by `id` and `weight`.
pub fn encode_fragment(id: u64, weight: u64) -> BitString {
    let mut w = BitWriter::new();
    for x in [id, weight] {
        w.gamma(bit_width(x) as u64);
        w.uint(x, bit_width(x));
    }
    w.finish()
}

pub fn decode_fragment(s: &BitString) -> Option<(u64, u64)> {
    let mut r = s.reader();
    let mut out = [0; 2];
    for x in &mut out {
        let width = r.gamma()? as usize;
        if width > 64 {
            return None;
        }
        *x = r.uint(width)?;
    }
    r.at_end().then_some((out[0], out[1]))
}

pub fn is_mst(g: &LabeledGraph) -> bool {
    check_distinct_weights(g).is_ok() && is_spanning_tree(g) && marked_edges(g).is_some_and(|mut e| {
        e.iter_mut().for_each(|x| *x = (x.0.min(x.1), x.0.max(x.1)));
        e.sort_unstable();
        e == kruskal(g)
    })
}

#[derive(Clone, Debug)]
pub struct MstScheme {
    pub t: usize,
    pub seed: u64,
}

impl MstScheme {
    pub fn new(t: usize) -> Self {
        Self { t: t.max(1), seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Deep certificates following the merge phases of `g`, with the marked
    /// tree as the spanning-tree part. Honest when the marked tree is the MST.
    pub fn deep_certificates(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        let t = self.t;
        let tree = marked_edges(g).ok_or_else(|| PlsError::Malformed("invalid marks".into()))?;
        let bodies = st_bodies(g, &tree, t, self.seed)?;
        let root = (0..g.n()).min_by_key(|&v| g.id(v)).unwrap();
        let (parent, _) = orient(g, &tree, root);
        let trace = ghs_run(g)?;
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        // edge -> (phase, adding endpoints)
        let mut added: HashMap<(usize, usize), (usize, HashSet<usize>)> = HashMap::new();
        for (p, phase) in trace.phases.iter().enumerate() {
            for c in &phase.choices {
                let (x, y) = (g.node_of_id(c.edge.0).unwrap(), g.node_of_id(c.edge.1).unwrap());
                added.entry(key(x, y)).or_insert((p, HashSet::new())).1.insert(x);
            }
        }
        let n = g.n();
        let mut phases: Vec<Vec<PhaseCert>> = vec![Vec::new(); n];
        for (p, phase) in trace.phases.iter().enumerate() {
            let earlier: Vec<(usize, usize)> =
                added.iter().filter(|(_, (q, _))| *q < p).map(|(&e, _)| e).collect();
            let mut adj = vec![Vec::new(); n];
            for &(a, b) in &earlier {
                adj[a].push(b);
                adj[b].push(a);
            }
            let mut members: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            for v in 0..n {
                members.entry(phase.fragment_of[&g.id(v)]).or_default().push(v);
            }
            let weight: HashMap<u64, u64> = phase.choices.iter().map(|c| (c.fragment, c.weight)).collect();
            let mut certs: Vec<Option<PhaseCert>> = vec![None; n];
            for (&name, nodes) in &members {
                let u = g.node_of_id(name).unwrap();
                let mut dist = HashMap::from([(u, 0usize)]);
                let mut q = VecDeque::from([u]);
                while let Some(x) = q.pop_front() {
                    for &y in &adj[x] {
                        if !dist.contains_key(&y) {
                            dist.insert(y, dist[&x] + 1);
                            q.push_back(y);
                        }
                    }
                }
                let small = dist.values().all(|&d| d < t);
                let pairs: Option<CertificateMap> = if small {
                    None
                } else {
                    let local: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
                    let edges = earlier
                        .iter()
                        .filter(|(a, _)| local.contains_key(a))
                        .map(|(a, b)| (local[a], local[b]))
                        .collect();
                    let sub = LabeledGraph::new(
                        nodes.iter().map(|&v| g.id(v)).collect(),
                        edges,
                        None,
                        vec![BitString::new(); nodes.len()],
                    )?;
                    let s = encode_fragment(name, weight[&name]);
                    Some(spread_pairs(&s, &sub, t - 1, self.seed.wrapping_add(p as u64 + 1))?.encode())
                };
                for (i, &v) in nodes.iter().enumerate() {
                    certs[v] = Some(PhaseCert {
                        counter: (dist[&v] % 3) as u8,
                        small,
                        pairs: pairs.as_ref().map(|m| m[i].clone()),
                    });
                }
            }
            for v in 0..n {
                phases[v].push(certs[v].take().unwrap());
            }
        }
        Ok((0..n)
            .map(|v| {
                let (phase, child_adds, parent_adds) = match parent[v].and_then(|p| added.get(&key(v, p)).map(|a| (p, a))) {
                    Some((p, (ph, who))) => (*ph as u64, who.contains(&v), who.contains(&p)),
                    None => (0, false, false),
                };
                MstCert { st: bodies[v].clone(), phase, child_adds, parent_adds, phases: phases[v].clone() }.encode()
            })
            .collect())
    }

    /// Fragment strings `(id(u), w(e))` the center of `view` recovers per
    /// phase (`None` for small fragments), or `None` if certificates do not parse.
    pub fn recovered_fragments(&self, view: &View) -> Option<Vec<Option<(u64, u64)>>> {
        let marks = ViewMarks::new(view);
        let ctx = Ctx::new(view, &marks)?;
        (0..ctx.phases).map(|p| if ctx.certs[0].phases[p].small { Some(None) } else { ctx.fragment(0, p).map(Some) }).collect()
    }
}

struct Ctx<'a> {
    view: &'a View,
    o: Oriented<'a>,
    certs: Vec<MstCert>,
    phases: usize,
}

impl<'a> Ctx<'a> {
    fn new(view: &'a View, marks: &'a ViewMarks) -> Option<Self> {
        let certs: Vec<MstCert> = (0..view.len()).map(|i| MstCert::decode(view.cert(i))).collect::<Option<_>>()?;
        let phases = certs[0].phases.len();
        if certs.iter().any(|c| c.phases.len() != phases) {
            return None;
        }
        let bodies: Vec<StBody> = certs.iter().map(|c| c.st.clone()).collect();
        let o = check_st_deep(view, marks, &bodies)?;
        Some(Self { view, o, certs, phases })
    }

    /// Phase of a marked tree edge and whether `i`, `j` added it.
    fn edge(&self, i: usize, j: usize) -> Option<(u64, bool, bool)> {
        if self.o.is_child_of(i, j) {
            let c = &self.certs[i];
            Some((c.phase, c.child_adds, c.parent_adds))
        } else if self.o.is_child_of(j, i) {
            let c = &self.certs[j];
            Some((c.phase, c.parent_adds, c.child_adds))
        } else {
            None
        }
    }

    fn fragment_neighbors(&self, i: usize, p: usize) -> Vec<usize> {
        self.view.neighbors(i).filter(|&j| self.edge(i, j).is_some_and(|e| e.0 < p as u64)).collect()
    }

    /// Nodes within fragment distance `radius` of `src`.
    fn fragment_ball(&self, src: usize, p: usize, radius: usize) -> Vec<usize> {
        let mut dist = HashMap::from([(src, 0usize)]);
        let mut q = VecDeque::from([src]);
        let mut out = vec![src];
        while let Some(x) = q.pop_front() {
            if dist[&x] == radius {
                continue;
            }
            for y in self.fragment_neighbors(x, p) {
                if !dist.contains_key(&y) {
                    dist.insert(y, dist[&x] + 1);
                    out.push(y);
                    q.push_back(y);
                }
            }
        }
        out
    }

    fn fragment(&self, i: usize, p: usize) -> Option<(u64, u64)> {
        let ball = self.fragment_ball(i, p, self.o.t - 1);
        let records: Vec<&BitString> = ball.iter().map(|&x| self.certs[x].phases[p].pairs.as_ref()).collect::<Option<_>>()?;
        decode_fragment(&recover_pairs(records)?)
    }

    /// Whether the edge from `i` to neighbor `y` leaves `i`'s fragment. Only
    /// decidable when `i`'s fragment is not small.
    fn outgoing(&self, i: usize, y: usize, p: usize) -> Option<bool> {
        let (a, b) = (&self.certs[i].phases[p], &self.certs[y].phases[p]);
        if a.small != b.small {
            return Some(true);
        }
        if a.small {
            return None;
        }
        Some(self.fragment(i, p)? != self.fragment(y, p)?)
    }

    fn weight(&self, i: usize, j: usize) -> u64 {
        self.view.weight(i, j).unwrap_or(1)
    }

    /// Edges `(x, y)` incident to `x` that `x`'s fragment adds at phase `p`.
    fn adds(&self, x: usize, p: usize) -> Vec<(usize, usize)> {
        self.view
            .neighbors(x)
            .filter(|&y| self.edge(x, y).is_some_and(|(q, mine, _)| q == p as u64 && mine))
            .map(|y| (x, y))
            .collect()
    }

    fn check(&self) -> bool {
        let view = self.view;
        let t = self.o.t;
        let me = &self.certs[0];
        if self.phases == 0 {
            return false;
        }
        if self.o.parent(0).flatten().is_some() && (me.phase >= self.phases as u64 || !(me.child_adds || me.parent_adds)) {
            return false;
        }
        for p in 0..self.phases {
            let mine = &me.phases[p];
            let near = self.fragment_neighbors(0, p);
            if near.iter().any(|&j| {
                let other = &self.certs[j].phases[p];
                other.small != mine.small || other.counter == mine.counter
            }) {
                return false;
            }
            let parents = near.iter().filter(|&&j| (self.certs[j].phases[p].counter + 1) % 3 == mine.counter).count();
            if parents > 1 {
                return false;
            }
            let is_root = parents == 0;
            if mine.small {
                if !is_root {
                    continue;
                }
                let ball = self.fragment_ball(0, p, t - 1);
                let inside: HashSet<usize> = ball.iter().copied().collect();
                if ball.iter().any(|&x| self.fragment_neighbors(x, p).iter().any(|y| !inside.contains(y))) {
                    return false;
                }
                let lightest = ball
                    .iter()
                    .flat_map(|&x| view.neighbors(x).filter(|y| !inside.contains(y)).map(move |y| (x, y)))
                    .min_by_key(|&(x, y)| self.weight(x, y));
                let added: Vec<(usize, usize)> = ball.iter().flat_map(|&x| self.adds(x, p)).collect();
                if lightest.is_none() || added != vec![lightest.unwrap()] {
                    return false;
                }
            } else {
                let Some((name, w)) = self.fragment(0, p) else {
                    return false;
                };
                if near.iter().any(|&j| self.fragment(j, p) != Some((name, w))) {
                    return false;
                }
                let adds = self.adds(0, p);
                if is_root {
                    let [(_, y)] = adds[..] else {
                        return false;
                    };
                    if name != view.id(0) || self.weight(0, y) != w || self.outgoing(0, y, p) != Some(true) {
                        return false;
                    }
                } else if !adds.is_empty() {
                    return false;
                }
                for y in view.neighbors(0) {
                    match self.outgoing(0, y, p) {
                        Some(true) if self.weight(0, y) < w => return false,
                        None => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }
}

impl Scheme for MstScheme {
    fn name(&self) -> String {
        "mst".into()
    }

    fn radius(&self) -> usize {
        self.t
    }

    fn holds(&self, g: &LabeledGraph) -> Result<bool> {
        check_distinct_weights(g)?;
        Ok(is_mst(g))
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
        let shallow = |i: usize| !view.cert(i).is_empty() && view.cert(i).get(0);
        if view.cert(0).is_empty() || (0..view.len()).any(|i| view.cert(i).is_empty() || shallow(i) != shallow(0)) {
            return Ok(false);
        }
        if shallow(0) {
            return Ok(verify_shallow(view, is_mst));
        }
        let marks = ViewMarks::new(view);
        Ok(Ctx::new(view, &marks).is_some_and(|ctx| ctx.check()))
    }

    fn self_check(&self, cert: &BitString) -> bool {
        match cert.as_slice().first() {
            None => false,
            Some(true) => cert.len() == 2,
            Some(false) => MstCert::decode(cert).is_some(),
        }
    }

    fn forge(&self, g: &LabeledGraph) -> Option<CertificateMap> {
        self.deep_certificates(g).ok()
    }
}
