//! The scheme abstraction, global verification, and the completeness and
//! soundness harnesses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;
use crate::view::{extract_view, View};

/// One certificate per node, indexed like the graph's nodes.
pub type CertificateMap = Vec<BitString>;

pub fn certificates_to_json(certs: &CertificateMap) -> String {
    serde_json::to_string_pretty(certs).expect("certificates serialize")
}

pub fn certificates_from_json(s: &str) -> Result<CertificateMap> {
    Ok(serde_json::from_str(s)?)
}

/// Budget for [`exhaustive_soundness`].
pub const EXHAUSTIVE_BUDGET: u128 = 1 << 22;

pub trait Scheme: Send + Sync {
    fn name(&self) -> String;

    /// Verification radius `t`.
    fn radius(&self) -> usize;

    /// Centralized decision of the predicate.
    fn holds(&self, g: &LabeledGraph) -> Result<bool>;

    /// Honest certificates. Errors with `NotInLanguage` on no-instances.
    fn prove(&self, g: &LabeledGraph) -> Result<CertificateMap>;

    /// Local decision of the view's center.
    fn verify(&self, view: &View) -> Result<bool>;

    /// A necessary condition for the owner of `cert` to accept, whatever the
    /// rest of its view. Used only to prune exhaustive searches.
    fn self_check(&self, _cert: &BitString) -> bool {
        true
    }

    /// Well-formed certificates for an instance regardless of whether the
    /// predicate holds; seeds for mutation fuzzing.
    fn forge(&self, _g: &LabeledGraph) -> Option<CertificateMap> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub max_bits: usize,
    pub mean_bits: f64,
}

impl SizeReport {
    pub fn of(certs: &[BitString]) -> Self {
        let max_bits = certs.iter().map(BitString::len).max().unwrap_or(0);
        let total: usize = certs.iter().map(BitString::len).sum();
        let mean_bits = if certs.is_empty() { 0.0 } else { total as f64 / certs.len() as f64 };
        Self { max_bits, mean_bits }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    /// Nodes (host indices) whose verifier rejected, ascending.
    pub rejecting: Vec<usize>,
    pub size: SizeReport,
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

fn decide_all(scheme: &dyn Scheme, g: &LabeledGraph, certs: &[BitString]) -> Result<Vec<bool>> {
    let t = scheme.radius();
    (0..g.n())
        .into_par_iter()
        .map(|v| scheme.verify(&extract_view(g, certs, v, t)?))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Runs every node's verifier; the instance is accepted iff all accept.
/// `threads = None` uses the ambient pool. The result does not depend on it.
pub fn run(scheme: &dyn Scheme, g: &LabeledGraph, certs: &[BitString], threads: Option<usize>) -> Result<Verdict> {
    let decisions = with_threads(threads, || decide_all(scheme, g, certs))?;
    let rejecting: Vec<usize> = (0..g.n()).filter(|&v| !decisions[v]).collect();
    Ok(Verdict { accepted: rejecting.is_empty(), rejecting, size: SizeReport::of(certs) })
}

/// Prove then verify on one instance.
pub fn prove_and_run(scheme: &dyn Scheme, g: &LabeledGraph) -> Result<Verdict> {
    let certs = scheme.prove(g)?;
    run(scheme, g, &certs, None)
}

#[derive(Clone, Debug, Default)]
pub struct CompletenessReport {
    pub checked: usize,
    /// Instances where the predicate holds: index into the corpus, and either
    /// a rejecting verdict or a prover error.
    pub failures: Vec<(usize, String)>,
    pub max_bits: usize,
}

impl CompletenessReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// On every yes-instance of `corpus` the honest certificates are accepted.
/// No-instances are skipped.
pub fn check_completeness(scheme: &dyn Scheme, corpus: &[LabeledGraph]) -> Result<CompletenessReport> {
    let mut report = CompletenessReport::default();
    for (i, g) in corpus.iter().enumerate() {
        if !scheme.holds(g)? {
            continue;
        }
        report.checked += 1;
        match scheme.prove(g).and_then(|c| run(scheme, g, &c, None)) {
            Ok(v) if v.accepted => report.max_bits = report.max_bits.max(v.size.max_bits),
            Ok(v) => report.failures.push((i, format!("rejected at nodes {:?}", v.rejecting))),
            Err(e) => report.failures.push((i, e.to_string())),
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzReport {
    pub trials: usize,
    pub counterexample: Option<CertificateMap>,
}

fn random_string(rng: &mut ChaCha8Rng, max_bits: usize) -> BitString {
    let len = rng.gen_range(0..=max_bits);
    BitString::from_bits((0..len).map(|_| rng.gen()).collect())
}

/// One mutated certificate map. Mutations act on a seed map (forged or random).
fn mutate(rng: &mut ChaCha8Rng, seed: &CertificateMap, max_bits: usize) -> CertificateMap {
    let mut c = seed.clone();
    let n = c.len();
    let rounds = rng.gen_range(1..=3);
    for _ in 0..rounds {
        let v = rng.gen_range(0..n);
        match rng.gen_range(0..6) {
            0 | 1 => {
                if !c[v].is_empty() {
                    let i = rng.gen_range(0..c[v].len());
                    let b = c[v].get(i);
                    c[v].set(i, !b);
                }
            }
            2 => {
                let u = rng.gen_range(0..n);
                c[v] = c[u].clone();
            }
            3 => {
                let u = rng.gen_range(0..n);
                c.swap(u, v);
            }
            4 => {
                let len = c[v].len();
                if len > 0 {
                    c[v].truncate(rng.gen_range(0..len));
                }
            }
            _ => {
                if c[v].len() < max_bits.max(1) {
                    c[v].push(rng.gen());
                }
            }
        }
    }
    c
}

/// Random and mutated certificate maps on a no-instance. Trial `i` draws from
/// its own stream derived from `(seed, i)`, so the outcome does not depend on
/// scheduling.
pub fn fuzz_soundness(
    scheme: &dyn Scheme,
    g: &LabeledGraph,
    trials: usize,
    seed: u64,
    max_bits: usize,
) -> Result<FuzzReport> {
    if scheme.holds(g)? {
        return Err(PlsError::Refused("soundness fuzzing needs a no-instance".into()));
    }
    let forged = scheme.forge(g);
    let found = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Option<(usize, CertificateMap)>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let certs = match &forged {
                Some(f) if i % 4 != 3 => {
                    if i % 4 == 0 {
                        f.clone()
                    } else {
                        mutate(&mut rng, f, max_bits)
                    }
                }
                _ => (0..g.n()).map(|_| random_string(&mut rng, max_bits)).collect(),
            };
            Ok(run(scheme, g, &certs, None)?.accepted.then_some((i, certs)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .min_by_key(|(i, _)| *i);
    Ok(FuzzReport { trials, counterexample: found.map(|(_, c)| c) })
}

/// Searches every assignment of strings of length `0..=max_bits` for an
/// accepting map on a no-instance. Candidates rejected by
/// [`Scheme::self_check`] are dropped first, and partial assignments are
/// abandoned as soon as a node whose whole ball is assigned rejects. Refuses
/// when the remaining product exceeds `budget`.
pub fn exhaustive_soundness(
    scheme: &dyn Scheme,
    g: &LabeledGraph,
    max_bits: usize,
    budget: u128,
) -> Result<Option<CertificateMap>> {
    if scheme.holds(g)? {
        return Err(PlsError::Refused("exhaustive soundness needs a no-instance".into()));
    }
    let mut all = Vec::new();
    for len in 0..=max_bits {
        for i in 0..(1u64 << len) {
            all.push(BitString::nth_of_len(i, len));
        }
    }
    let candidates: Vec<BitString> = all.into_iter().filter(|c| scheme.self_check(c)).collect();
    let n = g.n();
    let needed = (candidates.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(PlsError::BudgetExceeded { needed, budget });
    }
    if candidates.is_empty() {
        return Ok(None);
    }
    let t = scheme.radius();
    // ready[i]: nodes whose ball is fully assigned once node i is assigned
    let mut ready = vec![Vec::new(); n];
    for v in 0..n {
        let last = g.ball(v, t).into_iter().max().unwrap();
        ready[last].push(v);
    }
    let mut certs = vec![BitString::new(); n];
    fn search(
        i: usize,
        certs: &mut Vec<BitString>,
        cands: &[BitString],
        ready: &[Vec<usize>],
        scheme: &dyn Scheme,
        g: &LabeledGraph,
    ) -> Result<bool> {
        if i == certs.len() {
            return Ok(true);
        }
        for c in cands {
            certs[i] = c.clone();
            let mut alive = true;
            for &v in &ready[i] {
                if !scheme.verify(&extract_view(g, certs, v, scheme.radius())?)? {
                    alive = false;
                    break;
                }
            }
            if alive && search(i + 1, certs, cands, ready, scheme, g)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    Ok(search(0, &mut certs, &candidates, &ready, scheme, g)?.then_some(certs))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub t: usize,
    pub max_bits: usize,
    pub mean_bits: f64,
    pub accepted: bool,
}

/// Honest certificate sizes and verdicts of `make(t)` for each `t`.
pub fn measure_scaling(
    make: impl Fn(usize) -> Result<Box<dyn Scheme>>,
    g: &LabeledGraph,
    ts: &[usize],
) -> Result<Vec<ScalingRow>> {
    ts.iter()
        .map(|&t| {
            let s = make(t)?;
            let v = prove_and_run(s.as_ref(), g)?;
            Ok(ScalingRow { t, max_bits: v.size.max_bits, mean_bits: v.size.mean_bits, accepted: v.accepted })
        })
        .collect()
}

/// Scheme that accepts everything. Used to exercise the harnesses.
pub struct AcceptAll {
    pub t: usize,
}

impl Scheme for AcceptAll {
    fn name(&self) -> String {
        "demo:accept-all".into()
    }
    fn radius(&self) -> usize {
        self.t
    }
    fn holds(&self, _g: &LabeledGraph) -> Result<bool> {
        Ok(false)
    }
    fn prove(&self, g: &LabeledGraph) -> Result<CertificateMap> {
        Ok(vec![BitString::new(); g.n()])
    }
    fn verify(&self, _view: &View) -> Result<bool> {
        Ok(true)
    }
}
