//! Trees: borders every `h` levels, extra borders just above them, and base
//! certificates of special nodes spread down chunk paths of length `h`.

use std::collections::{HashMap, VecDeque};

use super::{chunk_size, pad, simulate_domain, unpad, Header, LocalBase, Role};
use crate::bits::BitString;
use crate::engine::CertificateMap;
use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;
use crate::view::View;

#[derive(Clone, Debug)]
pub struct TreeDecomposition {
    pub root: usize,
    pub h: usize,
    pub parent: Vec<Option<usize>>,
    /// Sorted by identity.
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
    /// Depth of the subtree below each node.
    pub height: Vec<usize>,
    pub role: Vec<Role>,
    /// The border (or root) owning each node's domain.
    pub domain_of: Vec<usize>,
}

impl TreeDecomposition {
    pub fn domain(&self, b: usize) -> Vec<usize> {
        (0..self.role.len()).filter(|&v| self.domain_of[v] == b).collect()
    }

    pub fn borders(&self) -> Vec<usize> {
        (0..self.role.len()).filter(|&v| self.role[v].is_border()).collect()
    }

    pub fn slots(&self) -> usize {
        slots(self.h)
    }
}

/// Payload slots: one for border chunks, one for extra-border chunks. With
/// `h = 1` every node is a border and one slot suffices.
pub(super) fn slots(h: usize) -> usize {
    if h == 1 {
        1
    } else {
        2
    }
}

fn expected_role(depth: usize, tall: bool, h: usize) -> Role {
    if tall && depth % h == 0 {
        Role::Border
    } else if tall && (depth + 1) % h == 0 {
        Role::Extra
    } else {
        Role::Standard
    }
}

/// Decomposition with unit `h = t / 2`, rooted at the smallest identity.
pub fn decompose(tree: &LabeledGraph, t: usize) -> Result<TreeDecomposition> {
    if t < 2 {
        return Err(PlsError::Refused(format!("t = {t} leaves no room for a block unit")));
    }
    let root = (0..tree.n()).min_by_key(|&v| tree.id(v)).unwrap();
    decompose_rooted(tree, root, t / 2)
}

pub fn decompose_rooted(tree: &LabeledGraph, root: usize, h: usize) -> Result<TreeDecomposition> {
    if !tree.is_tree() {
        return Err(PlsError::InvalidGraph("not a tree".into()));
    }
    if h == 0 {
        return Err(PlsError::Refused("block unit must be positive".into()));
    }
    let n = tree.n();
    let mut parent = vec![None; n];
    let mut depth = vec![0; n];
    let mut order = vec![root];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut q = VecDeque::from([root]);
    while let Some(v) = q.pop_front() {
        for &w in tree.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                depth[w] = depth[v] + 1;
                order.push(w);
                q.push_back(w);
            }
        }
    }
    let mut children = vec![Vec::new(); n];
    for &v in &order[1..] {
        children[parent[v].unwrap()].push(v);
    }
    for c in &mut children {
        c.sort_by_key(|&w| tree.id(w));
    }
    let mut height = vec![0; n];
    for &v in order.iter().rev() {
        if let Some(p) = parent[v] {
            height[p] = height[p].max(height[v] + 1);
        }
    }
    if height[root] + 1 < h {
        return Err(PlsError::Refused(format!("tree of height {} is too shallow for unit {h}", height[root])));
    }
    let mut role: Vec<Role> = (0..n).map(|v| expected_role(depth[v], height[v] + 1 >= h, h)).collect();
    role[root] = Role::Root;
    let mut domain_of = vec![root; n];
    for &v in &order[1..] {
        domain_of[v] = if role[v].is_border() { v } else { domain_of[parent[v].unwrap()] };
    }
    Ok(TreeDecomposition { root, h, parent, children, depth, height, role, domain_of })
}

/// The `s` nodes carrying the chunks of `x`: starting at `x`, repeatedly step
/// to the smallest-identity child whose subtree is still deep enough.
fn chunk_path(
    x: usize,
    s: usize,
    children: impl Fn(usize) -> Option<Vec<usize>>,
    tall: impl Fn(usize, usize) -> Option<bool>,
) -> Option<Vec<usize>> {
    let mut path = vec![x];
    let mut cur = x;
    for i in 1..s {
        let need = s - 1 - i;
        let mut next = None;
        for c in children(cur)? {
            if tall(c, need)? {
                next = Some(c);
                break;
            }
        }
        cur = next?;
        path.push(cur);
    }
    Some(path)
}

/// Spreads the base certificates of all special nodes over their chunk paths
/// of length `s`. Returns the payload of every node.
pub fn spread(dec: &TreeDecomposition, base: &[BitString], s: usize) -> Result<Vec<BitString>> {
    let specials: Vec<usize> = (0..base.len()).filter(|&v| dec.role[v].is_special()).collect();
    let b = base[specials[0]].len();
    if specials.iter().any(|&v| base[v].len() != b) {
        return Err(PlsError::Refused("special certificates differ in length".into()));
    }
    let c = chunk_size(b, s);
    let mut payload = vec![BitString::zeros(dec.slots() * c); base.len()];
    for &x in &specials {
        let path = chunk_path(x, s, |v| Some(dec.children[v].clone()), |v, d| Some(dec.height[v] >= d))
            .ok_or_else(|| PlsError::Refused(format!("node {x} has no chunk path of length {s}")))?;
        let padded = pad(&base[x], c * s);
        let slot = if dec.role[x].is_border() { 0 } else { 1 };
        for (i, &p) in path.iter().enumerate() {
            for j in 0..c {
                payload[p].set(slot * c + j, padded.get(i * c + j));
            }
        }
    }
    Ok(payload)
}

/// Decoded headers of a whole view plus the parent/child structure implied by
/// the depth counters.
struct TreeView<'a> {
    view: &'a View,
    hdr: Vec<Header>,
    payload: Vec<BitString>,
    children: Vec<Option<Vec<usize>>>,
}

impl<'a> TreeView<'a> {
    fn new(view: &'a View) -> Option<Self> {
        let mut hdr = Vec::with_capacity(view.len());
        let mut payload = Vec::with_capacity(view.len());
        for i in 0..view.len() {
            let (h, p) = Header::decode(view.cert(i))?;
            if h.shallow || h.counter > 2 {
                return None;
            }
            hdr.push(h);
            payload.push(p);
        }
        if payload.iter().any(|p| p.len() != payload[0].len()) {
            return None;
        }
        let children = (0..view.len())
            .map(|i| {
                view.has_full_adjacency(i).then(|| {
                    view.neighbors(i).filter(|&j| hdr[j].counter == (hdr[i].counter + 1) % 3).collect()
                })
            })
            .collect();
        Some(Self { view, hdr, payload, children })
    }

    /// Whether some descendant sits `d` levels below `i`; `None` when the
    /// view is too small to tell.
    fn tall(&self, i: usize, d: usize) -> Option<bool> {
        if d == 0 {
            return Some(true);
        }
        let mut unknown = false;
        for &c in self.children[i].as_ref()? {
            match self.tall(c, d - 1) {
                Some(true) => return Some(true),
                None => unknown = true,
                Some(false) => {}
            }
        }
        (!unknown).then_some(false)
    }

    fn recover_at(&self, x: usize, s: usize, c: usize, slot: usize) -> Option<BitString> {
        let path = chunk_path(x, s, |v| self.children[v].clone(), |v, d| self.tall(v, d))?;
        let mut padded = BitString::new();
        for p in path {
            padded.extend(&self.payload[p].slice(slot * c, slot * c + c));
        }
        unpad(&padded)
    }

    fn chunk_len(&self, h: usize) -> Option<usize> {
        let len = self.payload[0].len();
        (len > 0 && len % slots(h) == 0).then(|| len / slots(h))
    }
}

/// The domain of a border center and the special nodes just outside it.
struct Zone {
    domain: Vec<usize>,
    outside: Vec<usize>,
}

/// Local marking checks at the center. `Some(None)` accepts a non-border,
/// `Some(Some(zone))` accepts a border whose zone is well marked.
fn check_marking(tv: &TreeView<'_>, h: usize) -> Option<Option<Zone>> {
    let view = tv.view;
    let me = tv.hdr[0];
    let mut parents = Vec::new();
    for j in view.neighbors(0) {
        match (tv.hdr[j].counter + 3 - me.counter) % 3 {
            2 => parents.push(j),
            1 => {}
            _ => return None,
        }
    }
    if parents.len() > 1 || (me.role == Role::Root) != parents.is_empty() {
        return None;
    }
    if me.role.is_special() && tv.tall(0, h - 1) != Some(true) {
        return None;
    }
    if !me.role.is_border() {
        return Some(None);
    }
    if let Some(&p) = parents.first() {
        let ok = if h == 1 { tv.hdr[p].role.is_border() } else { tv.hdr[p].role == Role::Extra };
        if !ok {
            return None;
        }
    }
    let mut domain = vec![0];
    let mut outside = parents;
    let mut stack: Vec<(usize, usize)> = tv.children[0].as_ref()?.iter().map(|&c| (c, 1)).collect();
    while let Some((v, j)) = stack.pop() {
        let expected = if j > h { Role::Standard } else { expected_role(j, tv.tall(v, h - 1)?, h) };
        if tv.hdr[v].role != expected {
            return None;
        }
        if expected == Role::Border {
            outside.push(v);
            continue;
        }
        domain.push(v);
        stack.extend(tv.children[v].as_ref()?.iter().map(|&c| (c, j + 1)));
    }
    Some(Some(Zone { domain, outside }))
}

/// Marking checks alone (no certificate recovery), for a view of radius at least `2h`.
pub fn verify_marking(view: &View, h: usize) -> bool {
    TreeView::new(view).is_some_and(|tv| check_marking(&tv, h).is_some())
}

/// Base certificates of every special node of the view whose chunk path is visible.
pub fn recover(view: &View, h: usize) -> HashMap<u64, BitString> {
    let mut out = HashMap::new();
    let Some(tv) = TreeView::new(view) else {
        return out;
    };
    let Some(c) = tv.chunk_len(h) else {
        return out;
    };
    for x in 0..view.len() {
        let role = tv.hdr[x].role;
        if role.is_special() {
            let slot = if role.is_border() { 0 } else { 1 };
            if let Some(cert) = tv.recover_at(x, h, c, slot) {
                out.insert(view.id(x), cert);
            }
        }
    }
    out
}

pub(super) fn prove(g: &LabeledGraph, base: &[BitString], t: usize) -> Result<CertificateMap> {
    let dec = decompose(g, t)?;
    let payload = spread(&dec, base, dec.h)?;
    Ok((0..g.n())
        .map(|v| {
            Header { role: dec.role[v], counter: (dec.depth[v] % 3) as u8, shallow: false }.encode(&payload[v])
        })
        .collect())
}

pub(super) fn verify(view: &View, base: &dyn LocalBase, t: usize, budget: u128) -> Result<bool> {
    let h = t / 2;
    let Some(tv) = TreeView::new(view) else {
        return Ok(false);
    };
    let Some(c) = tv.chunk_len(h) else {
        return Ok(false);
    };
    let zone = match check_marking(&tv, h) {
        None => return Ok(false),
        Some(None) => return Ok(true),
        Some(Some(z)) => z,
    };
    let mut fixed = HashMap::new();
    for &x in zone.domain.iter().chain(&zone.outside) {
        let role = tv.hdr[x].role;
        if role.is_special() {
            let slot = if role.is_border() { 0 } else { 1 };
            match tv.recover_at(x, h, c, slot) {
                Some(cert) => fixed.insert(x, cert),
                None => return Ok(false),
            };
        }
    }
    simulate_domain(view, base, &zone.domain, &fixed, budget)
}
