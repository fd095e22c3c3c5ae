//! Small radius-1 schemes used as bases for the scaling constructions.

use std::collections::VecDeque;

use crate::bits::BitString;
use crate::engine::{CertificateMap, Scheme};
use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;
use crate::tree_scaler::LocalBase;
use crate::view::View;

/// Hop distance from every node to the nearest source, `None` without sources.
fn distance_to(g: &LabeledGraph, is_source: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
    let mut dist = vec![usize::MAX; g.n()];
    let mut q = VecDeque::new();
    for v in (0..g.n()).filter(|&v| is_source(v)) {
        dist[v] = 0;
        q.push_back(v);
    }
    if q.is_empty() {
        return None;
    }
    while let Some(v) = q.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
        }
    }
    Some(dist)
}

/// Labels are `k`-bit numbers. Holds when some label is 0 and every label is
/// the hop distance to the nearest node labeled 0. Certificates repeat the label.
#[derive(Clone, Debug)]
pub struct RootDistance {
    pub k: usize,
}

impl Scheme for RootDistance {
    fn name(&self) -> String {
        format!("root-distance{}", self.k)
    }

    fn radius(&self) -> usize {
        1
    }

    fn holds(&self, g: &LabeledGraph) -> Result<bool> {
        if g.labels().iter().any(|l| l.len() != self.k) {
            return Ok(false);
        }
        let value = |v: usize| g.label(v).to_uint().unwrap_or(u64::MAX);
        Ok(distance_to(g, |v| value(v) == 0).is_some_and(|d| (0..g.n()).all(|v| d[v] as u64 == value(v))))
    }

    fn prove(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        if !self.holds(g)? {
            return Err(PlsError::NotInLanguage(self.name()));
        }
        Ok(g.labels().to_vec())
    }

    fn verify(&self, view: &View) -> Result<bool> {
        let k = self.k;
        let mine = view.cert(0);
        if mine.len() != k || mine != view.label(0) {
            return Ok(false);
        }
        let d = mine.to_uint().unwrap_or(u64::MAX);
        let mut lower = d == 0;
        for j in view.neighbors(0) {
            let c = view.cert(j);
            let Some(dj) = (c.len() == k).then(|| c.to_uint()).flatten() else {
                return Ok(false);
            };
            if d.abs_diff(dj) > 1 {
                return Ok(false);
            }
            lower |= dj + 1 == d;
        }
        Ok(lower)
    }

    fn self_check(&self, cert: &BitString) -> bool {
        cert.len() == self.k
    }

    fn forge(&self, g: &LabeledGraph) -> Option<CertificateMap> {
        g.labels().iter().all(|l| l.len() == self.k).then(|| g.labels().to_vec())
    }
}

impl LocalBase for RootDistance {
    fn candidates(&self, label: &BitString, k: usize) -> Option<Vec<BitString>> {
        Some(if label.len() == k { vec![label.clone()] } else { Vec::new() })
    }
}

/// One-bit labels. Holds when some node is marked; the certificate is the
/// `k`-bit hop distance to the nearest marked node.
#[derive(Clone, Debug)]
pub struct ReachMark {
    pub k: usize,
}

fn marked(label: &BitString) -> bool {
    label.len() == 1 && label.get(0)
}

impl Scheme for ReachMark {
    fn name(&self) -> String {
        format!("reach-mark{}", self.k)
    }

    fn radius(&self) -> usize {
        1
    }

    fn holds(&self, g: &LabeledGraph) -> Result<bool> {
        Ok(g.labels().iter().any(marked))
    }

    fn prove(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        let dist = distance_to(g, |v| marked(g.label(v))).ok_or_else(|| PlsError::NotInLanguage(self.name()))?;
        if dist.iter().any(|&d| self.k < 64 && d as u64 >= 1u64 << self.k) {
            return Err(PlsError::Refused(format!("distances do not fit in {} bits", self.k)));
        }
        Ok(dist.iter().map(|&d| BitString::from_uint(d as u64, self.k)).collect())
    }

    fn verify(&self, view: &View) -> Result<bool> {
        let value = |i: usize| (view.cert(i).len() == self.k).then(|| view.cert(i).to_uint()).flatten();
        let Some(d) = value(0) else {
            return Ok(false);
        };
        if d == 0 {
            return Ok(marked(view.label(0)));
        }
        Ok(view.neighbors(0).any(|j| value(j) == Some(d - 1)))
    }

    fn self_check(&self, cert: &BitString) -> bool {
        cert.len() == self.k
    }

    fn forge(&self, g: &LabeledGraph) -> Option<CertificateMap> {
        Some(vec![BitString::zeros(self.k); g.n()])
    }
}

impl LocalBase for ReachMark {}

/// Holds when every node carries the same label. The certificate is that
/// label, identical at every node.
#[derive(Clone, Debug)]
pub struct EqualLabels;

impl Scheme for EqualLabels {
    fn name(&self) -> String {
        "equal-labels".into()
    }

    fn radius(&self) -> usize {
        1
    }

    fn holds(&self, g: &LabeledGraph) -> Result<bool> {
        Ok(g.labels().iter().all(|l| l == g.label(0)))
    }

    fn prove(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        if !self.holds(g)? {
            return Err(PlsError::NotInLanguage(self.name()));
        }
        Ok(g.labels().to_vec())
    }

    fn verify(&self, view: &View) -> Result<bool> {
        let mine = view.cert(0);
        Ok(mine == view.label(0) && view.neighbors(0).all(|j| view.cert(j) == mine))
    }

    fn forge(&self, g: &LabeledGraph) -> Option<CertificateMap> {
        Some(vec![g.label(0).clone(); g.n()])
    }
}

/// Labels `k`-bit distances from the smallest-identity node of `g`.
pub fn root_distance_labels(g: &LabeledGraph, k: usize) -> Result<LabeledGraph> {
    let root = (0..g.n()).min_by_key(|&v| g.id(v)).unwrap();
    let d = g.hop_distances(root);
    g.clone().with_labels(d.iter().map(|&x| BitString::from_uint(x as u64, k)).collect())
}
