//! Schemes addressable by name, for the command line and for sweeps.
//!
//! Names: `st`, `mst`, `diameter`, `spanner`, `tree-scale:<base>`,
//! `cycle-scale:<base>`, `grid-scale:<base>`, `uniform-scale:<base>`,
//! `universal:<predicate>` and the radius-1 demo schemes under `demo:`.

use std::sync::Arc;

use crate::distance::diameter::DiameterScheme;
use crate::distance::spanner::SpannerScheme;
use crate::engine::{AcceptAll, Scheme};
use crate::error::{PlsError, Result};
use crate::spanning::mst::MstScheme;
use crate::spanning::st::StScheme;
use crate::toy::{EqualLabels, ReachMark, RootDistance};
use crate::tree_scaler::{scale_cycle, scale_grid, scale_tree, LocalBase};
use crate::uniform::universal::{predicate, universal_scheme, UniversalBase, PREDICATES};
use crate::uniform::scale_uniform;

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeParams {
    pub t: usize,
    /// Label width of the demo bases.
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self { t: 1, k: 8, alpha: 1.0, beta: 0.0, seed: 0 }
    }
}

pub const NAMES: &[&str] = &[
    "st",
    "mst",
    "diameter",
    "spanner",
    "tree-scale:<base>",
    "cycle-scale:<base>",
    "grid-scale:<base>",
    "uniform-scale:<base>",
    "universal:<predicate>",
    "demo:root-distance",
    "demo:reach-mark",
    "demo:equal-labels",
    "demo:accept-all",
];

fn unknown(name: &str) -> PlsError {
    PlsError::UnknownScheme(name.to_string())
}

fn local_base(name: &str, p: &SchemeParams) -> Result<Arc<dyn LocalBase>> {
    match name.strip_prefix("demo:").unwrap_or(name) {
        "root-distance" => Ok(Arc::new(RootDistance { k: p.k })),
        "reach-mark" => Ok(Arc::new(ReachMark { k: p.k })),
        _ => Err(unknown(name)),
    }
}

/// Radius-1 schemes with uniform honest certificates.
fn uniform_base(name: &str) -> Result<Arc<dyn Scheme>> {
    if let Some(pred) = name.strip_prefix("universal:") {
        let oracle = predicate(pred).ok_or_else(|| unknown(name))?;
        return Ok(Arc::new(UniversalBase::new(pred, oracle)));
    }
    match name.strip_prefix("demo:").unwrap_or(name) {
        "equal-labels" => Ok(Arc::new(EqualLabels)),
        _ => Err(unknown(name)),
    }
}

pub fn build(name: &str, p: &SchemeParams) -> Result<Box<dyn Scheme>> {
    if p.t == 0 {
        return Err(PlsError::Malformed("t must be at least 1".into()));
    }
    let t = p.t;
    if let Some((kind, base)) = name.split_once(':') {
        let scheme: Box<dyn Scheme> = match kind {
            "tree-scale" => Box::new(scale_tree(local_base(base, p)?, t)?),
            "cycle-scale" => Box::new(scale_cycle(local_base(base, p)?, t)?),
            "grid-scale" => Box::new(scale_grid(local_base(base, p)?, t)?),
            "uniform-scale" => Box::new(scale_uniform(uniform_base(base)?, t)?.with_seed(p.seed)),
            "universal" => {
                let oracle = predicate(base).ok_or_else(|| unknown(name))?;
                Box::new(universal_scheme(base, oracle, t)?.with_seed(p.seed))
            }
            "demo" => demo(base, p).ok_or_else(|| unknown(name))?,
            _ => return Err(unknown(name)),
        };
        return Ok(scheme);
    }
    Ok(match name {
        "st" => Box::new(StScheme::new(t).with_seed(p.seed)),
        "mst" => Box::new(MstScheme::new(t).with_seed(p.seed)),
        "diameter" => Box::new(DiameterScheme::new(t).with_seed(p.seed)),
        "spanner" => Box::new(SpannerScheme::new(p.alpha, p.beta, t)?.with_seed(p.seed)),
        _ => return Err(unknown(name)),
    })
}

fn demo(base: &str, p: &SchemeParams) -> Option<Box<dyn Scheme>> {
    // the radius-1 bases ignore t
    Some(match base {
        "root-distance" => Box::new(RootDistance { k: p.k }),
        "reach-mark" => Box::new(ReachMark { k: p.k }),
        "equal-labels" => Box::new(EqualLabels),
        "accept-all" => Box::new(AcceptAll { t: p.t }),
        _ => return None,
    })
}

/// Every concrete name, with each base and predicate expanded.
pub fn expanded_names() -> Vec<String> {
    let mut out: Vec<String> = ["st", "mst", "diameter", "spanner"].iter().map(|s| s.to_string()).collect();
    for kind in ["tree-scale", "cycle-scale", "grid-scale"] {
        for base in ["root-distance", "reach-mark"] {
            out.push(format!("{kind}:{base}"));
        }
    }
    out.push("uniform-scale:equal-labels".into());
    for pred in PREDICATES {
        out.push(format!("uniform-scale:universal:{pred}"));
        out.push(format!("universal:{pred}"));
    }
    for d in ["root-distance", "reach-mark", "equal-labels", "accept-all"] {
        out.push(format!("demo:{d}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_expanded_name_builds() {
        let p = SchemeParams { t: 4, ..Default::default() };
        for name in expanded_names() {
            let s = build(&name, &p).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(s.radius() == 4 || s.radius() == 1, "{name}");
        }
    }

    #[test]
    fn unknown_names_and_zero_radius_are_refused() {
        let p = SchemeParams::default();
        assert!(matches!(build("nope", &p), Err(PlsError::UnknownScheme(_))));
        assert!(matches!(build("tree-scale:nope", &p), Err(PlsError::UnknownScheme(_))));
        assert!(matches!(build("universal:nope", &p), Err(PlsError::UnknownScheme(_))));
        assert!(build("st", &SchemeParams { t: 0, ..p }).is_err());
    }

    #[test]
    fn names_round_trip_for_the_distributed_schemes() {
        let p = SchemeParams { t: 3, alpha: 2.0, ..Default::default() };
        for name in ["st", "mst", "diameter", "spanner", "demo:accept-all"] {
            assert_eq!(build(name, &p).unwrap().name(), name);
        }
        assert_eq!(build("universal:bipartite", &p).unwrap().name(), "uniform-scale:universal:bipartite");
    }
}
