//! Cycles: a leader tagged with counter value 3 fixes an orientation; blocks
//! of `h` consecutive nodes (the last one up to `2h - 1`) start at borders.
//! Chunks run backward, from each special node toward its predecessors, so
//! that the block before the leader never has to look past its own end.

use std::collections::HashMap;

use super::tree::slots;
use super::{chunk_size, pad, simulate_domain, unpad, Header, LocalBase, Role};
use crate::bits::BitString;
use crate::engine::CertificateMap;
use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;
use crate::view::View;

const LEADER: u8 = 3;

/// Roles by position along the cycle, the leader at position 0.
pub(super) fn layout(n: usize, h: usize) -> Vec<Role> {
    let mut role = vec![Role::Standard; n];
    let last = h * (n / h - 1);
    for p in (0..=last).step_by(h) {
        if p > 0 && h > 1 {
            role[p - 1] = Role::Extra;
        }
    }
    if h > 1 {
        role[n - 1] = Role::Extra;
    }
    for p in (0..=last).step_by(h) {
        role[p] = Role::Border;
    }
    role[0] = Role::Root;
    role
}

pub(super) fn prove(g: &LabeledGraph, base: &[BitString], t: usize) -> Result<CertificateMap> {
    let n = g.n();
    let h = t / 2;
    if n < 2 * h {
        return Err(PlsError::Refused(format!("cycle of length {n} is too short for unit {h}")));
    }
    let leader = (0..n).min_by_key(|&v| g.id(v)).unwrap();
    let mut order = vec![leader];
    let mut prev = leader;
    let mut cur = *g.neighbors(leader).iter().min_by_key(|&&w| g.id(w)).unwrap();
    while cur != leader {
        order.push(cur);
        let next = g.neighbors(cur).iter().copied().find(|&w| w != prev).unwrap();
        prev = cur;
        cur = next;
    }
    let role = layout(n, h);
    let b = base[0].len();
    let c = chunk_size(b, h);
    let mut payload = vec![BitString::zeros(slots(h) * c); n];
    for p in 0..n {
        if !role[p].is_special() {
            continue;
        }
        let padded = pad(&base[order[p]], c * h);
        let slot = if role[p].is_border() { 0 } else { 1 };
        for i in 0..h {
            let holder = order[(p + n - i) % n];
            for j in 0..c {
                payload[holder].set(slot * c + j, padded.get(i * c + j));
            }
        }
    }
    let mut certs = vec![BitString::new(); n];
    for (p, &v) in order.iter().enumerate() {
        let counter = if p == 0 { LEADER } else { (p % 3) as u8 };
        certs[v] = Header { role: role[p], counter, shallow: false }.encode(&payload[v]);
    }
    Ok(certs)
}

struct CycleView<'a> {
    view: &'a View,
    hdr: Vec<Header>,
    payload: Vec<BitString>,
}

impl<'a> CycleView<'a> {
    fn new(view: &'a View) -> Option<Self> {
        let mut hdr = Vec::with_capacity(view.len());
        let mut payload = Vec::with_capacity(view.len());
        for i in 0..view.len() {
            let (h, p) = Header::decode(view.cert(i))?;
            if h.shallow || (h.counter == LEADER) != (h.role == Role::Root) {
                return None;
            }
            hdr.push(h);
            payload.push(p);
        }
        if payload.iter().any(|p| p.len() != payload[0].len()) {
            return None;
        }
        Some(Self { view, hdr, payload })
    }

    fn is_leader(&self, i: usize) -> bool {
        self.hdr[i].counter == LEADER
    }

    fn two_neighbors(&self, i: usize) -> Option<[usize; 2]> {
        if !self.view.has_full_adjacency(i) {
            return None;
        }
        let nb: Vec<usize> = self.view.neighbors(i).collect();
        (nb.len() == 2).then(|| [nb[0], nb[1]])
    }

    /// `(pred, succ)` of a non-leader, read off the counters.
    fn link_plain(&self, i: usize) -> Option<(usize, usize)> {
        let c = self.hdr[i].counter;
        let [a, b] = self.two_neighbors(i)?;
        let side = |w: usize| -> Option<Option<bool>> {
            if self.is_leader(w) {
                Some(None)
            } else if self.hdr[w].counter == (c + 1) % 3 {
                Some(Some(true))
            } else if self.hdr[w].counter == (c + 2) % 3 {
                Some(Some(false))
            } else {
                None
            }
        };
        match (side(a)?, side(b)?) {
            (Some(true), Some(false)) => Some((b, a)),
            (Some(false), Some(true)) => Some((a, b)),
            (None, Some(true)) => Some((a, b)),
            (None, Some(false)) => Some((b, a)),
            (Some(true), None) => Some((b, a)),
            (Some(false), None) => Some((a, b)),
            _ => None,
        }
    }

    fn link(&self, i: usize) -> Option<(usize, usize)> {
        if !self.is_leader(i) {
            return self.link_plain(i);
        }
        let [a, b] = self.two_neighbors(i)?;
        if self.is_leader(a) || self.is_leader(b) {
            return None;
        }
        match (self.link_plain(a)?, self.link_plain(b)?) {
            ((pa, _), (_, sb)) if pa == i && sb == i => Some((b, a)),
            ((_, sa), (pb, _)) if sa == i && pb == i => Some((a, b)),
            _ => None,
        }
    }

    fn pred(&self, i: usize) -> Option<usize> {
        self.link(i).map(|l| l.0)
    }

    fn succ(&self, i: usize) -> Option<usize> {
        self.link(i).map(|l| l.1)
    }
}

pub(super) fn verify(view: &View, base: &dyn LocalBase, t: usize, budget: u128) -> Result<bool> {
    let h = t / 2;
    let Some(cv) = CycleView::new(view) else {
        return Ok(false);
    };
    let len = cv.payload[0].len();
    if len == 0 || len % slots(h) != 0 {
        return Ok(false);
    }
    let c = len / slots(h);
    let Some((pred, _)) = cv.link(0) else {
        return Ok(false);
    };
    // the block this node belongs to must start within 2h - 1 steps back
    let mut cur = 0;
    let mut covered = cv.hdr[0].role.is_border();
    for _ in 1..2 * h {
        if covered {
            break;
        }
        match cv.pred(cur) {
            Some(p) => cur = p,
            None => return Ok(false),
        }
        covered = cv.hdr[cur].role.is_border();
    }
    if !covered {
        return Ok(false);
    }
    if !cv.hdr[0].role.is_border() {
        return Ok(true);
    }
    let pred_ok = if h == 1 { cv.hdr[pred].role.is_border() } else { cv.hdr[pred].role == Role::Extra };
    if !pred_ok {
        return Ok(false);
    }
    let mut domain = vec![0];
    let mut cur = 0;
    let next_border = loop {
        let Some(s) = cv.succ(cur) else {
            return Ok(false);
        };
        if cv.hdr[s].role.is_border() {
            break s;
        }
        domain.push(s);
        if domain.len() >= 2 * h {
            return Ok(false);
        }
        cur = s;
    };
    let block = domain.len();
    if block < h || block > 2 * h - 1 {
        return Ok(false);
    }
    for (j, &v) in domain.iter().enumerate().skip(1) {
        let expected = if j == block - 1 { Role::Extra } else { Role::Standard };
        if cv.hdr[v].role != expected {
            return Ok(false);
        }
    }
    // `line` lists h predecessors, the block, then the next border; chunk i of
    // the node at line[k] sits on line[k - i]
    let mut line = Vec::with_capacity(3 * h);
    let mut cur = 0;
    for _ in 0..h {
        match cv.pred(cur) {
            Some(p) => cur = p,
            None => return Ok(false),
        }
        line.push(cur);
    }
    line.reverse();
    line.extend(&domain);
    line.push(next_border);
    let mut fixed = HashMap::new();
    for k in h - 1..line.len() {
        let x = line[k];
        let role = cv.hdr[x].role;
        if !role.is_special() {
            continue;
        }
        let slot = if role.is_border() { 0 } else { 1 };
        let mut padded = BitString::new();
        for i in 0..h {
            padded.extend(&cv.payload[line[k - i]].slice(slot * c, slot * c + c));
        }
        match unpad(&padded) {
            Some(cert) => fixed.insert(x, cert),
            None => return Ok(false),
        };
    }
    simulate_domain(view, base, &domain, &fixed, budget)
}
