use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpls::engine::{fuzz_soundness, prove_and_run, run};
use tpls::graph::{cycle, grid, path, random_connected};
use tpls::toy::EqualLabels;
use tpls::uniform::universal::{encode_instance, predicate, universal_scheme};
use tpls::bits::{bit_width, log2_ceil};
use tpls::uniform::{load_bound, log_n, radius_range, scale_uniform, PairAssignment};
use tpls::{BitString, LabeledGraph, Scheme};

fn same_labels(g: LabeledGraph, k: usize, seed: u64) -> LabeledGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = BitString::from_bits((0..k).map(|_| rng.gen()).collect());
    let n = g.n();
    g.with_labels(vec![s; n]).unwrap()
}

/// Largest `max_bits * b(t - 1) / (k log^2 n)` over the admissible radii.
fn worst_ratio(g: &LabeledGraph, k: usize) -> f64 {
    let (lo, hi) = radius_range(g, k).unwrap();
    let mut worst: f64 = 0.0;
    for r in lo..=hi.min(g.hop_diameter()) {
        let s = scale_uniform(Arc::new(EqualLabels), r + 1).unwrap();
        s.assignment(g).unwrap().check(g).unwrap();
        let v = prove_and_run(&s, g).unwrap();
        assert!(v.accepted, "r = {r}");
        let ratio = (v.size.max_bits * g.ball_growth(r)) as f64 / (k as f64 * log_n(g.n()).powi(2));
        worst = worst.max(ratio);
    }
    worst
}

#[test]
fn cycle_and_grid_scale_with_ball_growth() {
    let k = 256;
    let c = same_labels(cycle(64), k, 1);
    let g = same_labels(grid(8, 8), k, 2);
    let worst = worst_ratio(&c, k).max(worst_ratio(&g, k));
    // largest observed ratio is about 1.04
    assert!(worst <= 1.5, "ratio {worst}");
}

#[test]
fn radius_below_range_is_refused() {
    let g = same_labels(cycle(64), 64, 3);
    // b(1) = 3 < log2 64
    let s = scale_uniform(Arc::new(EqualLabels), 2).unwrap();
    assert!(s.prove(&g).is_err());
    assert!(scale_uniform(Arc::new(EqualLabels), 1).is_err());
}

#[test]
fn differing_labels_are_never_accepted() {
    let g = same_labels(cycle(40), 64, 4);
    let mut labels = g.labels().to_vec();
    let flipped = !labels[17].get(5);
    labels[17].set(5, flipped);
    let bad = g.with_labels(labels).unwrap();
    let s = scale_uniform(Arc::new(EqualLabels), 6).unwrap();
    let forged = s.forge(&bad).unwrap();
    assert!(!run(&s, &bad, &forged, None).unwrap().accepted);
    assert!(fuzz_soundness(&s, &bad, 200, 5, 60).unwrap().counterexample.is_none());
}

#[test]
fn split_strings_are_caught_by_neighbor_cross_check() {
    // Left holders carry one string, right holders another, with a gap wider
    // than two coverage radii: every ball is covered and conflict-free, so
    // only comparing with the neighbors' reconstructions exposes the split.
    let t = 4;
    let r = t - 1;
    let k = 8;
    let g = path(40);
    let left = BitString::from_uint(0b1010_1010, k);
    let right = BitString::from_uint(0b0101_0101, k);
    let a = 10;
    let pairs: Vec<Vec<(usize, bool)>> = (0..40)
        .map(|v| match v {
            v if v <= a => (0..k).map(|i| (i, left.get(i))).collect(),
            v if v > a + 2 * r => (0..k).map(|i| (i, right.get(i))).collect(),
            _ => Vec::new(),
        })
        .collect();
    let labels = (0..40).map(|v| if v <= a + r { left.clone() } else { right.clone() }).collect();
    let g = g.with_labels(labels).unwrap();
    let certs = PairAssignment { k, radius: r, pairs }.encode();
    let s = scale_uniform(Arc::new(EqualLabels), t).unwrap();
    let v = run(&s, &g, &certs, None).unwrap();
    assert_eq!(v.rejecting, vec![a + r, a + r + 1]);
}

#[test]
fn universal_has_one_on_a_cycle() {
    let g = cycle(32);
    let labels = (0..32).map(|v| BitString::from_uint((v == 9) as u64, 1)).collect();
    let g = g.with_labels(labels).unwrap();
    let s = universal_scheme("has-one", predicate("has-one").unwrap(), 8).unwrap();
    let v = prove_and_run(&s, &g).unwrap();
    assert!(v.accepted);
    let k = encode_instance(&g).len();
    let record = log2_ceil(k as u64) + 1;
    let header = 2 * bit_width(k as u64 + 1) - 1;
    assert!(v.size.max_bits <= load_bound(k, 32, g.ball_growth(7)) * record + header);
}

#[test]
fn universal_rejects_no_instances_and_corrupted_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let g = random_connected(16, 0.2, &mut rng);
    let g = g.clone().with_labels(vec![BitString::from_uint(0, 1); 16]).unwrap();
    let s = universal_scheme("has-one", predicate("has-one").unwrap(), 4).unwrap();
    let forged = s.forge(&g).unwrap();
    let v = run(&s, &g, &forged, None).unwrap();
    assert_eq!(v.rejecting.len(), 16);

    // a bipartite yes-instance, then one flipped matrix bit per trial
    let grid_g = grid(4, 4).with_labels(vec![BitString::from_uint(0, 1); 16]).unwrap();
    let base = tpls::uniform::universal::UniversalBase::new("bipartite", predicate("bipartite").unwrap());
    let honest = encode_instance(&grid_g);
    let start = 2 * 5 - 1; // gamma(16)
    for i in 0..256 {
        let mut bad = honest.clone();
        let flipped = !bad.get(start + i);
        bad.set(start + i, flipped);
        let v = run(&base, &grid_g, &vec![bad; 16], None).unwrap();
        assert!(v.rejecting.contains(&(i / 16)), "bit {i}");
    }
}
