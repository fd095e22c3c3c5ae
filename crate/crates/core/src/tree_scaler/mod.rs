//! Turning a radius-1 scheme on trees, cycles or grids into a radius-`t`
//! scheme whose certificates shrink linearly in `t`.
//!
//! Every scaled certificate starts with a 5-bit header: role (2 bits), depth
//! counter mod 3 (2 bits), shallow flag (1 bit). The rest is a payload of
//! equally sized chunk slots carrying pieces of base certificates.

mod cycle;
mod grid;
mod tree;

pub use grid::grid_coordinates;
pub use tree::{decompose, decompose_rooted, recover, spread, verify_marking, TreeDecomposition};

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::bits::{BitReader, BitString, BitWriter};
use crate::engine::{CertificateMap, Scheme};
use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;
use crate::view::View;

/// Default cap on the assignments a border node may enumerate for its domain.
pub const DOMAIN_BUDGET: u128 = 1 << 20;

pub const HEADER_BITS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Root = 0,
    Border = 1,
    Extra = 2,
    Standard = 3,
}

impl Role {
    fn from_bits(v: u64) -> Role {
        match v {
            0 => Role::Root,
            1 => Role::Border,
            2 => Role::Extra,
            _ => Role::Standard,
        }
    }

    pub fn is_special(self) -> bool {
        self != Role::Standard
    }

    /// Root or border: the nodes that own a domain.
    pub fn is_border(self) -> bool {
        matches!(self, Role::Root | Role::Border)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub role: Role,
    /// 0..=2 for depth counters; the cycle variant uses 3 to tag its leader.
    pub counter: u8,
    pub shallow: bool,
}

impl Header {
    pub fn encode(self, payload: &BitString) -> BitString {
        let mut w = BitWriter::new();
        w.uint(self.role as u64, 2);
        w.uint(self.counter as u64, 2);
        w.bit(self.shallow);
        w.bits(payload);
        w.finish()
    }

    pub fn decode(cert: &BitString) -> Option<(Header, BitString)> {
        let mut r: BitReader<'_> = cert.reader();
        let role = Role::from_bits(r.uint(2)?);
        let counter = r.uint(2)? as u8;
        let shallow = r.bit()?;
        let payload = r.take(r.remaining())?;
        Some((Header { role, counter, shallow }, payload))
    }
}

/// A radius-1 scheme usable as the base of a scaling construction.
pub trait LocalBase: Scheme {
    /// Every certificate with which a node carrying `label` could possibly be
    /// accepted by its own verifier, or `None` for "any `k`-bit string".
    fn candidates(&self, _label: &BitString, _k: usize) -> Option<Vec<BitString>> {
        None
    }
}

/// Appends `1 0*` so that the result has exactly `total` bits.
pub(crate) fn pad(cert: &BitString, total: usize) -> BitString {
    let mut out = cert.clone();
    out.push(true);
    while out.len() < total {
        out.push(false);
    }
    out
}

pub(crate) fn unpad(padded: &BitString) -> Option<BitString> {
    let last_one = (0..padded.len()).rev().find(|&i| padded.get(i))?;
    Some(padded.slice(0, last_one))
}

/// Chunk size for spreading a `b`-bit certificate (plus its pad bit) over `s` nodes.
pub fn chunk_size(b: usize, s: usize) -> usize {
    (b + 1).div_ceil(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    Tree,
    Cycle,
    Grid,
}

/// The radius-`t` scheme obtained from a radius-1 base.
pub struct ScaledScheme {
    base: Arc<dyn LocalBase>,
    t: usize,
    topology: Topology,
    budget: u128,
}

fn check_base(base: &dyn LocalBase, t: usize, min_t: usize) -> Result<()> {
    if base.radius() != 1 {
        return Err(PlsError::Refused(format!("base scheme has radius {}, expected 1", base.radius())));
    }
    if t < min_t {
        return Err(PlsError::Refused(format!("t = {t} is below the minimum {min_t} for this construction")));
    }
    Ok(())
}

pub fn scale_tree(base: Arc<dyn LocalBase>, t: usize) -> Result<ScaledScheme> {
    check_base(base.as_ref(), t, 2)?;
    Ok(ScaledScheme { base, t, topology: Topology::Tree, budget: DOMAIN_BUDGET })
}

pub fn scale_cycle(base: Arc<dyn LocalBase>, t: usize) -> Result<ScaledScheme> {
    check_base(base.as_ref(), t, 2)?;
    Ok(ScaledScheme { base, t, topology: Topology::Cycle, budget: DOMAIN_BUDGET })
}

pub fn scale_grid(base: Arc<dyn LocalBase>, t: usize) -> Result<ScaledScheme> {
    check_base(base.as_ref(), t, 4)?;
    Ok(ScaledScheme { base, t, topology: Topology::Grid, budget: DOMAIN_BUDGET })
}

impl ScaledScheme {
    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Block unit `h` used by the construction at this radius.
    pub fn unit(&self) -> usize {
        match self.topology {
            Topology::Tree | Topology::Cycle => self.t / 2,
            Topology::Grid => grid::unit(self.t),
        }
    }

    fn is_shallow(&self, g: &LabeledGraph) -> bool {
        match self.topology {
            Topology::Tree => g.hop_diameter() <= self.t,
            Topology::Cycle | Topology::Grid => g.hop_center().1 < self.t,
        }
    }

    fn assemble(&self, g: &LabeledGraph, base: &[BitString]) -> Result<CertificateMap> {
        match self.topology {
            Topology::Tree if !g.is_tree() => return Err(PlsError::InvalidGraph("not a tree".into())),
            Topology::Cycle if !(g.n() >= 3 && g.m() == g.n() && (0..g.n()).all(|v| g.degree(v) == 2)) => {
                return Err(PlsError::InvalidGraph("not a cycle".into()))
            }
            _ => {}
        }
        match self.topology {
            Topology::Tree => tree::prove(g, base, self.t),
            Topology::Cycle => cycle::prove(g, base, self.t),
            Topology::Grid => grid::prove(g, base, self.t),
        }
    }

    fn base_certs(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        let certs = self.base.prove(g)?;
        let k = certs[0].len();
        if certs.iter().any(|c| c.len() != k) {
            return Err(PlsError::Refused("base certificates are not of uniform length".into()));
        }
        Ok(certs)
    }
}

impl Scheme for ScaledScheme {
    fn name(&self) -> String {
        let kind = match self.topology {
            Topology::Tree => "tree-scale",
            Topology::Cycle => "cycle-scale",
            Topology::Grid => "grid-scale",
        };
        format!("{kind}:{}", self.base.name())
    }

    fn radius(&self) -> usize {
        self.t
    }

    fn holds(&self, g: &LabeledGraph) -> Result<bool> {
        self.base.holds(g)
    }

    fn prove(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        if !self.base.holds(g)? {
            return Err(PlsError::NotInLanguage(self.base.name()));
        }
        if self.is_shallow(g) {
            return Ok(prove_shallow(g));
        }
        let base = self.base_certs(g)?;
        self.assemble(g, &base)
    }

    fn verify(&self, view: &View) -> Result<bool> {
        let Some((hdr, _)) = Header::decode(view.cert(0)) else {
            return Ok(false);
        };
        if hdr.shallow {
            return verify_shallow(view, self.base.as_ref());
        }
        let base = self.base.as_ref();
        match self.topology {
            Topology::Tree => tree::verify(view, base, self.t, self.budget),
            Topology::Cycle => cycle::verify(view, base, self.t, self.budget),
            Topology::Grid => grid::verify(view, base, self.t, self.budget),
        }
    }

    fn self_check(&self, cert: &BitString) -> bool {
        match Header::decode(cert) {
            None => false,
            Some((h, p)) if h.shallow => p.is_empty() && matches!(h.role, Role::Root | Role::Standard),
            Some((_, p)) => !p.is_empty(),
        }
    }

    fn forge(&self, g: &LabeledGraph) -> Option<CertificateMap> {
        if self.is_shallow(g) {
            return Some(prove_shallow(g));
        }
        let base = self.base.forge(g)?;
        self.assemble(g, &base).ok()
    }
}

/// Shallow instances: the most central node re-decides from its closed view.
fn prove_shallow(g: &LabeledGraph) -> CertificateMap {
    let (center, _) = g.hop_center();
    (0..g.n())
        .map(|v| {
            let role = if v == center { Role::Root } else { Role::Standard };
            Header { role, counter: 0, shallow: true }.encode(&BitString::new())
        })
        .collect()
}

fn verify_shallow(view: &View, base: &dyn LocalBase) -> Result<bool> {
    let Some((me, payload)) = Header::decode(view.cert(0)) else {
        return Ok(false);
    };
    if !payload.is_empty() || !matches!(me.role, Role::Root | Role::Standard) {
        return Ok(false);
    }
    for j in view.neighbors(0) {
        match Header::decode(view.cert(j)) {
            Some((h, _)) if h.shallow => {}
            _ => return Ok(false),
        }
    }
    let root_seen = (0..view.len())
        .any(|i| matches!(Header::decode(view.cert(i)), Some((h, _)) if h.shallow && h.role == Role::Root));
    if !root_seen {
        return Ok(false);
    }
    if me.role == Role::Root {
        if !view.is_closed() {
            return Ok(false);
        }
        return base.holds(&view.to_graph()?);
    }
    Ok(true)
}

/// Searches for base certificates of the standard nodes of `domain` under
/// which the base verifier accepts at every domain node. Certificates of the
/// special nodes in and around the domain are fixed by `fixed`. Neighbors of
/// the domain must be special, and so must the domain nodes touching them.
pub(crate) fn simulate_domain(
    view: &View,
    base: &dyn LocalBase,
    domain: &[usize],
    fixed: &HashMap<usize, BitString>,
    budget: u128,
) -> Result<bool> {
    let in_domain: HashSet<usize> = domain.iter().copied().collect();
    for &d in domain {
        if !view.has_full_adjacency(d) {
            return Ok(false);
        }
        for y in view.neighbors(d) {
            if !in_domain.contains(&y) && !(fixed.contains_key(&y) && fixed.contains_key(&d)) {
                return Ok(false);
            }
        }
    }
    let Some(k) = fixed.values().next().map(BitString::len) else {
        return Ok(false);
    };
    if fixed.values().any(|c| c.len() != k) {
        return Ok(false);
    }
    let standards: Vec<usize> = domain.iter().copied().filter(|d| !fixed.contains_key(d)).collect();
    let listed: Vec<Option<Vec<BitString>>> =
        standards.iter().map(|&s| base.candidates(view.label(s), k)).collect();
    let mut needed: u128 = 1;
    for l in &listed {
        let count = match l {
            Some(v) => v.len() as u128,
            None if k >= 120 => u128::MAX,
            None => 1u128 << k,
        };
        needed = needed.saturating_mul(count);
    }
    if needed > budget {
        return Err(PlsError::BudgetExceeded { needed, budget });
    }
    let cands: Vec<Vec<BitString>> = listed
        .into_iter()
        .map(|l| l.unwrap_or_else(|| (0..1u64 << k).map(|i| BitString::nth_of_len(i, k)).collect()))
        .collect();
    let pos: HashMap<usize, usize> = standards.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    // checks[i]: domain nodes whose closed neighborhood is fully assigned once
    // standard i is; checks for index usize::MAX can run immediately.
    let mut upfront = Vec::new();
    let mut checks = vec![Vec::new(); standards.len()];
    for &d in domain {
        let last = std::iter::once(d).chain(view.neighbors(d)).filter_map(|x| pos.get(&x).copied()).max();
        match last {
            Some(i) => checks[i].push(d),
            None => upfront.push(d),
        }
    }
    let mut assigned: Vec<Option<BitString>> = vec![None; standards.len()];
    let accepts = |d: usize, assigned: &[Option<BitString>]| -> Result<bool> {
        let sub = view.subview(d, 1, |x| match fixed.get(&x) {
            Some(c) => c.clone(),
            None => pos.get(&x).and_then(|&i| assigned[i].clone()).unwrap_or_default(),
        });
        base.verify(&sub)
    };
    for &d in &upfront {
        if !accepts(d, &assigned)? {
            return Ok(false);
        }
    }
    fn search(
        i: usize,
        assigned: &mut Vec<Option<BitString>>,
        cands: &[Vec<BitString>],
        checks: &[Vec<usize>],
        accepts: &dyn Fn(usize, &[Option<BitString>]) -> Result<bool>,
    ) -> Result<bool> {
        if i == cands.len() {
            return Ok(true);
        }
        for c in &cands[i] {
            assigned[i] = Some(c.clone());
            let mut ok = true;
            for &d in &checks[i] {
                if !accepts(d, assigned)? {
                    ok = false;
                    break;
                }
            }
            if ok && search(i + 1, assigned, cands, checks, accepts)? {
                return Ok(true);
            }
        }
        assigned[i] = None;
        Ok(false)
    }
    search(0, &mut assigned, &cands, &checks, &accepts)
}
