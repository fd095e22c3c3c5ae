use rand::Rng;

use super::LabeledGraph;
use crate::error::{PlsError, Result};

fn build(n: usize, edges: Vec<(usize, usize)>) -> LabeledGraph {
    LabeledGraph::from_edges(n, &edges).expect("generator produced an invalid graph")
}

pub fn path(n: usize) -> LabeledGraph {
    build(n, (1..n).map(|i| (i - 1, i)).collect())
}

/// Cycle on `n >= 3` nodes, node `i` adjacent to `i ± 1 mod n`.
pub fn cycle(n: usize) -> LabeledGraph {
    assert!(n >= 3, "a simple cycle needs at least 3 nodes");
    let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    e.push((n - 1, 0));
    build(n, e)
}

/// `cols x rows` grid; node `(x, y)` has index `y * cols + x`.
pub fn grid(cols: usize, rows: usize) -> LabeledGraph {
    let mut e = Vec::new();
    for y in 0..rows {
        for x in 0..cols {
            let v = y * cols + x;
            if x + 1 < cols {
                e.push((v, v + 1));
            }
            if y + 1 < rows {
                e.push((v, v + cols));
            }
        }
    }
    build(cols * rows, e)
}

pub fn star(n: usize) -> LabeledGraph {
    build(n, (1..n).map(|i| (0, i)).collect())
}

pub fn complete(n: usize) -> LabeledGraph {
    let mut e = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            e.push((a, b));
        }
    }
    build(n, e)
}

/// Random recursive tree: node `i` attaches to a uniform earlier node.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> LabeledGraph {
    build(n, (1..n).map(|i| (rng.gen_range(0..i), i)).collect())
}

/// A random tree plus every other pair independently with probability `p`.
pub fn random_connected<R: Rng>(n: usize, p: f64, rng: &mut R) -> LabeledGraph {
    let mut e: Vec<_> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    let tree: std::collections::HashSet<_> = e.iter().copied().collect();
    for b in 1..n {
        for a in 0..b {
            if !tree.contains(&(a, b)) && rng.gen_bool(p) {
                e.push((a, b));
            }
        }
    }
    build(n, e)
}

/// A random tree plus uniformly drawn extra pairs, `m` edges in total.
pub fn random_with_edges<R: Rng>(n: usize, m: usize, rng: &mut R) -> Result<LabeledGraph> {
    let most = n * n.saturating_sub(1) / 2;
    if n == 0 || m + 1 < n || m > most {
        return Err(PlsError::InvalidGraph(format!("no connected simple graph has {n} nodes and {m} edges")));
    }
    let mut e: Vec<_> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    let mut seen: std::collections::HashSet<_> = e.iter().copied().collect();
    let mut rest: Vec<(usize, usize)> = (1..n).flat_map(|b| (0..b).map(move |a| (a, b))).filter(|p| !seen.contains(p)).collect();
    while e.len() < m {
        let p = rest.swap_remove(rng.gen_range(0..rest.len()));
        if seen.insert(p) {
            e.push(p);
        }
    }
    Ok(build(n, e))
}
