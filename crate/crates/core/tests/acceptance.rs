//! End-to-end acceptance suite. Runs without the test harness so that every
//! criterion prints one line, pass or fail, on every run.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpls::distance::diameter::{diameter_labels, reconstruct, DiameterScheme};
use tpls::distance::spanner::SpannerScheme;
use tpls::engine::{exhaustive_soundness, fuzz_soundness, prove_and_run, run, EXHAUSTIVE_BUDGET};
use tpls::graph::{build_gadget, build_gadget_raw, cycle, grid, random_connected, random_tree, random_with_edges, Gadget};
use tpls::marks::with_marked_edges;
use tpls::spanning::ghs::{ghs_run, kruskal};
use tpls::spanning::mst::MstScheme;
use tpls::spanning::st::StScheme;
use tpls::toy::{root_distance_labels, EqualLabels, RootDistance};
use tpls::tree_scaler::{scale_cycle, scale_grid, scale_tree};
use tpls::uniform::universal::{predicate, universal_scheme};
use tpls::uniform::{log_n, radius_range, scale_uniform};
use tpls::{extract_view, BitString, CertificateMap, LabeledGraph, Scheme};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Hop distances by BFS over a plain edge list; `u64::MAX` when unreachable.
fn bfs_apsp(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<u64>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    (0..n)
        .map(|s| {
            let mut d = vec![u64::MAX; n];
            d[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &w in &adj[v] {
                    if d[w] == u64::MAX {
                        d[w] = d[v] + 1;
                        q.push_back(w);
                    }
                }
            }
            d
        })
        .collect()
}

/// Weighted all-pairs distances, cubic time.
fn floyd_warshall(g: &LabeledGraph) -> Vec<Vec<u64>> {
    let n = g.n();
    let mut d = vec![vec![u64::MAX / 4; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for &(a, b) in g.edges() {
        d[a][b] = g.weight(a, b);
        d[b][a] = g.weight(a, b);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn random_bits(rng: &mut ChaCha8Rng, k: usize) -> Vec<bool> {
    (0..k).map(|_| rng.gen()).collect()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut counts = [0usize; 2];
    for k in [2, 4, 8] {
        for p in [1, 2, 3] {
            for t in [1, 2, 3] {
                ensure!(build_gadget(&vec![false; k], &vec![false; k], p, t).is_err(), "all-zero pair not refused");
                for i in 0..50 {
                    let sa = random_bits(&mut rng, k);
                    // half the samples are made disjoint on purpose
                    let sb: Vec<bool> =
                        if i % 2 == 0 { sa.iter().map(|&a| !a && rng.gen()).collect() } else { random_bits(&mut rng, k) };
                    if sa.iter().chain(&sb).all(|&b| !b) {
                        continue;
                    }
                    let disjoint = sa.iter().zip(&sb).all(|(&a, &b)| !(a && b));
                    let gadget = build_gadget(&sa, &sb, p, t).map_err(|e| e.to_string())?;
                    let g = &gadget.graph;
                    let d = bfs_apsp(g.n(), g.edges()).iter().flatten().copied().max().unwrap();
                    if disjoint {
                        ensure!(d == Gadget::disjoint_diameter(p, t), "k={k} P={p} t={t}: disjoint diameter {d}");
                    } else {
                        ensure!(d >= Gadget::intersecting_bound(p, t), "k={k} P={p} t={t}: intersecting diameter {d}");
                    }
                    counts[disjoint as usize] += 1;
                }
            }
        }
    }
    ensure!(counts[0] > 0 && counts[1] > 0, "one side of the dichotomy never sampled");
    Ok(format!("{} disjoint and {} intersecting pairs over 27 settings", counts[1], counts[0]))
}

fn criterion_2() -> Outcome {
    let (k, n) = (64, 256);
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let g = root_distance_labels(&random_tree(n, &mut rng).with_random_ids(&mut rng), k).map_err(|e| e.to_string())?;
        for t in [2, 4, 8, 16] {
            let s = scale_tree(Arc::new(RootDistance { k }), t).map_err(|e| e.to_string())?;
            let v = prove_and_run(&s, &g).map_err(|e| e.to_string())?;
            ensure!(v.accepted, "t={t} rejected an honest tree");
            let lhs = v.size.max_bits * t;
            let rhs = 4 * k + 64 * t;
            ensure!(lhs <= rhs, "t={t}: max_bits*t = {lhs} > {rhs}");
            worst = worst.max(lhs as f64 / rhs as f64);
        }
    }
    Ok(format!("20 trees, worst max_bits*t / (4k+64t) = {worst:.3}"))
}

fn criterion_3() -> Outcome {
    const C: f64 = 1.5;
    let k = 256;
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst: f64 = 0.0;
    let mut radii = 0;
    for g in [cycle(64), grid(8, 8)] {
        let s = BitString::from_bits(random_bits(&mut rng, k));
        let n = g.n();
        let g = g.with_labels(vec![s; n]).map_err(|e| e.to_string())?;
        let (lo, hi) = radius_range(&g, k).ok_or("empty admissible radius range")?;
        for r in lo..=hi.min(g.hop_diameter()) {
            let scheme = scale_uniform(Arc::new(EqualLabels), r + 1).map_err(|e| e.to_string())?;
            scheme.assignment(&g).map_err(|e| e.to_string())?.check(&g)?;
            let v = prove_and_run(&scheme, &g).map_err(|e| e.to_string())?;
            ensure!(v.accepted, "coverage radius {r} rejected");
            let ratio = (v.size.max_bits * g.ball_growth(r)) as f64 / (k as f64 * log_n(n).powi(2));
            ensure!(ratio <= C, "coverage radius {r}: ratio {ratio:.3} > {C}");
            worst = worst.max(ratio);
            radii += 1;
        }
    }
    Ok(format!("{radii} radii, coverage and load hold, worst max_bits*b/(k log^2 n) = {worst:.3} <= {C}"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut trials = 0;
    for i in 0..20 {
        let n = rng.gen_range(8..=64);
        let g = random_connected(n, rng.gen_range(0.03..0.15), &mut rng)
            .with_random_ids(&mut rng)
            .with_random_distinct_weights(&mut rng);
        let fw = floyd_warshall(&g);
        let d = fw.iter().flatten().copied().max().unwrap();
        let yes = diameter_labels(&g, d).map_err(|e| e.to_string())?;
        for t in [4, 8] {
            let s = DiameterScheme::new(t).with_seed(rng.gen());
            let certs = s.prove(&yes).map_err(|e| e.to_string())?;
            ensure!(run(&s, &yes, &certs, None).map_err(|e| e.to_string())?.accepted, "graph {i} t={t} rejected");
            for v in 0..n {
                let view = extract_view(&yes, &certs, v, t).map_err(|e| e.to_string())?;
                let r = reconstruct(&view).ok_or(format!("graph {i} t={t}: node {v} cannot reconstruct"))?;
                ensure!(r.len() == n, "graph {i} t={t}: node {v} rebuilds {} of {n} nodes", r.len());
                for u in 0..n {
                    ensure!(r[&g.id(u)] == fw[v][u], "graph {i} t={t}: D'({v},{u}) = {} != {}", r[&g.id(u)], fw[v][u]);
                }
            }
            // one claimed bound below the diameter
            let no = diameter_labels(&g, d - 1).map_err(|e| e.to_string())?;
            let max_bits = certs.iter().map(BitString::len).max().unwrap();
            let count = if i == 0 && t == 4 { 10_000 } else { 200 };
            let f = fuzz_soundness(&s, &no, count, rng.gen(), max_bits).map_err(|e| e.to_string())?;
            ensure!(f.counterexample.is_none(), "graph {i} t={t}: x = D-1 accepted");
            trials += count;
        }
    }
    Ok(format!("20 graphs x t in {{4,8}} complete and exact, {trials} fuzz trials on x = D-1 (one run of 10^4) found nothing"))
}

fn stretch_oracle(n: usize, g_edges: &[(usize, usize)], h_edges: &[(usize, usize)], alpha: f64, beta: f64) -> bool {
    let dg = bfs_apsp(n, g_edges);
    let dh = bfs_apsp(n, h_edges);
    (0..n).all(|u| (0..n).all(|v| dh[u][v] != u64::MAX && dh[u][v] as f64 <= alpha * dg[u][v] as f64 + beta + 1e-9))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut seen = [0usize; 2];
    for i in 0..50 {
        let n = rng.gen_range(6..=40);
        let g = random_connected(n, rng.gen_range(0.05..0.25), &mut rng).with_random_ids(&mut rng);
        let root = rng.gen_range(0..n);
        let d = g.hop_distances(root);
        let keep = rng.gen_range(0.0..1.0);
        // a BFS tree plus a random share of the remaining edges
        let mut tree = BTreeSet::new();
        for v in (0..n).filter(|&v| v != root) {
            let p = *g.neighbors(v).iter().filter(|&&w| d[w] + 1 == d[v]).min().unwrap();
            tree.insert((v.min(p), v.max(p)));
        }
        let extra: Vec<_> = g.edges().iter().copied().filter(|e| !tree.contains(e) && rng.gen_bool(keep)).collect();
        let marked_edges: Vec<_> = tree.iter().copied().chain(extra).collect();
        let alpha = *[1.0, 1.5, 2.0, 3.0].choose(&mut rng).unwrap();
        let beta = *[0.0, 1.0, 2.0, 4.0].choose(&mut rng).unwrap();
        let t = rng.gen_range(2..=4);
        let marked = with_marked_edges(&g, &marked_edges).map_err(|e| e.to_string())?;
        let s = SpannerScheme::new(alpha, beta, t).map_err(|e| e.to_string())?.with_seed(rng.gen());
        let oracle = stretch_oracle(n, g.edges(), &marked_edges, alpha, beta);
        ensure!(s.holds(&marked).map_err(|e| e.to_string())? == oracle, "instance {i}: predicate disagrees with the oracle");
        let certs = if oracle { s.prove(&marked) } else { Ok(s.forge(&marked).ok_or("no forged certificates")?) }
            .map_err(|e| e.to_string())?;
        let v = run(&s, &marked, &certs, None).map_err(|e| e.to_string())?;
        ensure!(v.accepted == oracle, "instance {i}: verdict {} but oracle {oracle}", v.accepted);
        seen[oracle as usize] += 1;
    }
    ensure!(seen[0] > 0 && seen[1] > 0, "corpus lacks yes or no instances: {seen:?}");
    for (beta, p) in [(2.0, 2), (4.0, 3)] {
        let gadget = build_gadget_raw(&[false; 2], &[false; 2], p, 1).map_err(|e| e.to_string())?;
        let g = &gadget.graph;
        let inputs: HashSet<(usize, usize)> = gadget.input_edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let kept: Vec<_> = g.edges().iter().copied().filter(|e| !inputs.contains(e)).collect();
        ensure!(!stretch_oracle(g.n(), g.edges(), &kept, 1.0, beta), "gadget P={p} unexpectedly a spanner");
        let marked = with_marked_edges(g, &kept).map_err(|e| e.to_string())?;
        let s = SpannerScheme::new(1.0, beta, 4).map_err(|e| e.to_string())?;
        let certs = s.forge(&marked).ok_or("no forged certificates")?;
        ensure!(!run(&s, &marked, &certs, None).map_err(|e| e.to_string())?.accepted, "gadget P={p} beta={beta} accepted");
    }
    Ok(format!("50 instances ({} yes, {} no) match the stretch oracle; gadget no-instances rejected", seen[1], seen[0]))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|b| (0..b).map(move |a| (a, b))).collect()
}

fn apply(perm: &[usize], mask: u32, all: &[(usize, usize)]) -> u32 {
    let mut out = 0;
    for (i, &(a, b)) in all.iter().enumerate() {
        if mask >> i & 1 == 1 {
            let (x, y) = (perm[a], perm[b]);
            out |= 1 << all.iter().position(|&e| e == (x.min(y), x.max(y))).unwrap();
        }
    }
    out
}

fn edges_of(mask: u32, all: &[(usize, usize)]) -> Vec<(usize, usize)> {
    all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect()
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    bfs_apsp(n, edges)[0].iter().all(|&d| d != u64::MAX)
}

/// Connected graphs on `n` nodes with a marked edge subset, one per
/// isomorphism class of the pair, skipping markings that are spanning trees.
fn marked_non_trees(n: usize) -> Vec<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    let all = pairs(n);
    let perms = permutations(n);
    let mut graphs = BTreeSet::new();
    for mask in 0..(1u32 << all.len()) {
        if connected(n, &edges_of(mask, &all)) {
            graphs.insert(perms.iter().map(|p| apply(p, mask, &all)).min().unwrap());
        }
    }
    let mut out = Vec::new();
    for g in graphs {
        let autos: Vec<&Vec<usize>> = perms.iter().filter(|p| apply(p, g, &all) == g).collect();
        let mut seen = HashSet::new();
        let mut sub = g;
        loop {
            let canon = autos.iter().map(|p| apply(p, sub, &all)).min().unwrap();
            let m = edges_of(sub, &all);
            let tree = m.len() + 1 == n && connected(n, &m);
            if seen.insert(canon) && !tree {
                out.push((edges_of(g, &all), m));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & g;
        }
    }
    out
}

fn criterion_6() -> Outcome {
    const C: f64 = 32.0;
    const C2: f64 = 24.0;
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = rng.gen_range(2..=128);
        let g = random_connected(n, rng.gen_range(0.0..0.1), &mut rng).with_random_ids(&mut rng);
        let tree = kruskal(&g.clone().with_random_distinct_weights(&mut rng));
        let g = with_marked_edges(&g, &tree).map_err(|e| e.to_string())?;
        for t in [2, 4, 8] {
            let v = prove_and_run(&StScheme::new(t).with_seed(rng.gen()), &g).map_err(|e| e.to_string())?;
            ensure!(v.accepted, "instance {i} (n={n}) t={t} rejected");
            let bound = C * log_n(n) + C2 * t as f64;
            let lhs = (v.size.max_bits * t) as f64;
            ensure!(lhs <= bound, "instance {i} (n={n}) t={t}: max_bits*t = {lhs} > {bound:.1}");
            worst = worst.max(lhs / bound);
        }
    }
    let mut classes = 0;
    for n in 2..=5 {
        for (edges, marks) in marked_non_trees(n) {
            let g = LabeledGraph::from_edges(n, &edges).map_err(|e| e.to_string())?;
            let g = with_marked_edges(&g, &marks).map_err(|e| e.to_string())?;
            for t in [1, 2] {
                let found = exhaustive_soundness(&StScheme::new(t), &g, 3, EXHAUSTIVE_BUDGET).map_err(|e| e.to_string())?;
                ensure!(found.is_none(), "n={n} edges {edges:?} marks {marks:?} t={t}: accepting certificates exist");
            }
            classes += 1;
        }
    }
    // 3 bits only admits the shallow mode; tiny graphs also get the deep mode
    let mut deep = 0;
    for n in 2..=4 {
        for (edges, marks) in marked_non_trees(n) {
            let g = LabeledGraph::from_edges(n, &edges).map_err(|e| e.to_string())?;
            let g = with_marked_edges(&g, &marks).map_err(|e| e.to_string())?;
            for t in [1, 2] {
                let found = exhaustive_soundness(&StScheme::new(t), &g, 6, EXHAUSTIVE_BUDGET).map_err(|e| e.to_string())?;
                ensure!(found.is_none(), "n={n} edges {edges:?} marks {marks:?} t={t}: accepting 6-bit certificates exist");
            }
            deep += 1;
        }
    }
    Ok(format!(
        "300 honest runs accepted; {classes} marked non-trees (n <= 5, t in {{1,2}}) proven sound at 3 bits, \
         {deep} of them (n <= 4) also at 6 bits; worst max_bits*t / ({C} log n + {C2} t) = {worst:.3}"
    ))
}

/// Path of tree edges between `a` and `b`.
fn tree_path(n: usize, tree: &[(usize, usize)], a: usize, b: usize) -> Vec<(usize, usize)> {
    let mut adj = vec![Vec::new(); n];
    for &(x, y) in tree {
        adj[x].push(y);
        adj[y].push(x);
    }
    let mut prev = vec![usize::MAX; n];
    prev[a] = a;
    let mut q = VecDeque::from([a]);
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if prev[w] == usize::MAX {
                prev[w] = v;
                q.push_back(w);
            }
        }
    }
    let mut out = Vec::new();
    let mut v = b;
    while v != a {
        out.push((v.min(prev[v]), v.max(prev[v])));
        v = prev[v];
    }
    out
}

fn criterion_7() -> Outcome {
    const C: f64 = 64.0;
    const C2: f64 = 40.0;
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for i in 0..500 {
        let n = rng.gen_range(1..=64);
        let most = n * (n - 1) / 2;
        let m = rng.gen_range(n - 1..=most.min(3 * n));
        let g = random_with_edges(n, m, &mut rng).map_err(|e| e.to_string())?.with_random_distinct_weights(&mut rng);
        let trace = ghs_run(&g).map_err(|e| e.to_string())?;
        ensure!(trace.edges(&g) == kruskal(&g), "graph {i}: merge phases and sorted-edge tree differ");
    }
    let mut worst: f64 = 0.0;
    let mut instances = Vec::new();
    for i in 0..50 {
        let n = rng.gen_range(8..=64);
        let m = n - 1 + rng.gen_range(1..=n / 2);
        let g = random_with_edges(n, m, &mut rng)
            .map_err(|e| e.to_string())?
            .with_random_ids(&mut rng)
            .with_random_distinct_weights(&mut rng);
        let tree = kruskal(&g);
        let marked = with_marked_edges(&g, &tree).map_err(|e| e.to_string())?;
        for t in [2, 4] {
            let v = prove_and_run(&MstScheme::new(t).with_seed(rng.gen()), &marked).map_err(|e| e.to_string())?;
            ensure!(v.accepted, "instance {i} (n={n}) t={t} rejected");
            let bound = C * log_n(n).powi(2) + C2 * t as f64;
            let lhs = (v.size.max_bits * t) as f64;
            ensure!(lhs <= bound, "instance {i} (n={n}) t={t}: max_bits*t = {lhs} > {bound:.1}");
            worst = worst.max(lhs / bound);
        }
        instances.push((g, tree));
    }
    let mut mutated = 0;
    while mutated < 200 {
        let (g, tree) = &instances[mutated % instances.len()];
        let n = g.n();
        let non_tree: Vec<_> = g.edges().iter().copied().filter(|e| !tree.contains(e)).collect();
        let f = *non_tree.choose(&mut rng).unwrap();
        let e = *tree_path(n, tree, f.0, f.1).choose(&mut rng).unwrap();
        let bad = if mutated % 2 == 0 {
            // the heavier non-tree edge replaces a tree edge
            let swapped: Vec<_> = tree.iter().copied().filter(|&x| x != e).chain([f]).collect();
            with_marked_edges(g, &swapped)
        } else {
            // the marks stay, but the non-tree edge becomes the lighter one
            let mut w: Vec<u64> = g.edges().iter().map(|&(a, b)| g.weight(a, b)).collect();
            let (ie, jf) = (g.edges().iter().position(|&x| x == e).unwrap(), g.edges().iter().position(|&x| x == f).unwrap());
            w.swap(ie, jf);
            with_marked_edges(&g.clone().with_weights(Some(w)).map_err(|e| e.to_string())?, tree)
        }
        .map_err(|e| e.to_string())?;
        let swapped_tree = tpls::marks::marked_edges(&bad).ok_or("marks unreadable")?;
        ensure!(swapped_tree.len() + 1 == n && connected(n, &swapped_tree), "mutation {mutated} broke the tree");
        ensure!(kruskal(&bad) != swapped_tree, "mutation {mutated} is still minimum");
        let s = MstScheme::new(if mutated % 4 < 2 { 2 } else { 4 }).with_seed(rng.gen());
        ensure!(!s.holds(&bad).map_err(|e| e.to_string())?, "mutation {mutated}: predicate holds");
        let forged = s.forge(&bad).ok_or("no forged certificates")?;
        ensure!(!run(&s, &bad, &forged, None).map_err(|e| e.to_string())?.accepted, "mutation {mutated} accepted");
        let max_bits = forged.iter().map(BitString::len).max().unwrap();
        let fz = fuzz_soundness(&s, &bad, 8, rng.gen(), max_bits).map_err(|e| e.to_string())?;
        ensure!(fz.counterexample.is_none(), "mutation {mutated}: fuzzing found accepting certificates");
        mutated += 1;
    }
    Ok(format!(
        "500 merge traces equal the sorted-edge tree; 100 honest runs accepted; 200 swaps rejected; \
         worst max_bits*t / ({C} log^2 n + {C2} t) = {worst:.3}"
    ))
}

/// Yes-instances for every scheme family, with honest certificates.
fn corpus() -> Vec<(Box<dyn Scheme>, LabeledGraph, CertificateMap)> {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut out: Vec<(Box<dyn Scheme>, LabeledGraph)> = Vec::new();
    let g = random_with_edges(40, 50, &mut rng).unwrap().with_random_ids(&mut rng);
    let st = with_marked_edges(&g, &kruskal(&g.clone().with_random_distinct_weights(&mut rng))).unwrap();
    out.push((Box::new(StScheme::new(3)), st));
    let w = g.clone().with_random_distinct_weights(&mut rng);
    out.push((Box::new(MstScheme::new(2)), with_marked_edges(&w, &kruskal(&w)).unwrap()));
    out.push((Box::new(DiameterScheme::new(4)), diameter_labels(&w, w.diameter()).unwrap()));
    out.push((Box::new(SpannerScheme::new(2.0, 1.0, 3).unwrap()), with_marked_edges(&g, g.edges()).unwrap()));
    let k = 8;
    let tree = root_distance_labels(&random_tree(60, &mut rng).with_random_ids(&mut rng), k).unwrap();
    out.push((Box::new(scale_tree(Arc::new(RootDistance { k }), 4).unwrap()), tree.clone()));
    out.push((Box::new(RootDistance { k }), tree));
    out.push((Box::new(scale_cycle(Arc::new(RootDistance { k }), 4).unwrap()), root_distance_labels(&cycle(30), k).unwrap()));
    out.push((Box::new(scale_grid(Arc::new(RootDistance { k }), 4).unwrap()), root_distance_labels(&grid(8, 8), k).unwrap()));
    let same = BitString::from_bits(random_bits(&mut rng, 256));
    let c = cycle(64).with_labels(vec![same; 64]).unwrap();
    let (lo, _) = radius_range(&c, 256).unwrap();
    out.push((Box::new(scale_uniform(Arc::new(EqualLabels), lo + 1).unwrap()), c));
    let has_one = cycle(32).with_labels((0..32).map(|v| BitString::from_uint((v == 9) as u64, 1)).collect()).unwrap();
    out.push((Box::new(universal_scheme("has-one", predicate("has-one").unwrap(), 8).unwrap()), has_one));
    out.into_iter()
        .map(|(s, g)| {
            let certs = s.prove(&g).unwrap();
            (s, g, certs)
        })
        .collect()
}

/// Keeps the radius-`t` ball of `v` (with every edge among its nodes) and
/// hangs a fresh path off each boundary node, so that the host graph differs
/// while the view of `v` does not.
fn splice(g: &LabeledGraph, certs: &[BitString], v: usize, t: usize, rng: &mut ChaCha8Rng) -> (LabeledGraph, CertificateMap, usize) {
    let ball = g.ball(v, t);
    let local = |x: usize| ball.iter().position(|&y| y == x);
    let hops = g.hop_distances(v);
    let mut ids: Vec<u64> = ball.iter().map(|&x| g.id(x)).collect();
    let mut labels: Vec<BitString> = ball.iter().map(|&x| g.label(x).clone()).collect();
    let mut new_certs: CertificateMap = ball.iter().map(|&x| certs[x].clone()).collect();
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for &(a, b) in g.edges() {
        if let (Some(i), Some(j)) = (local(a), local(b)) {
            edges.push((i, j));
            weights.push(g.weight(a, b));
        }
    }
    let mut fresh = g.ids().iter().copied().max().unwrap() + 1;
    for (i, &x) in ball.iter().enumerate() {
        if hops[x] == t {
            let mut prev = i;
            for _ in 0..rng.gen_range(1..=3) {
                ids.push(fresh);
                fresh += 1 + rng.gen_range(0..5);
                labels.push(BitString::from_bits(random_bits(rng, 3)));
                new_certs.push(BitString::from_bits(random_bits(rng, 6)));
                edges.push((prev, ids.len() - 1));
                weights.push(rng.gen_range(1..100));
                prev = ids.len() - 1;
            }
        }
    }
    let h = LabeledGraph::new(ids, edges, g.is_weighted().then_some(weights), labels).unwrap();
    (h, new_certs, local(v).unwrap())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(118);
    let mut checks = 0;
    for (s, g, honest) in corpus() {
        let name = s.name();
        let t = s.radius();
        // honest certificates and a few corrupted copies
        let mut maps = vec![honest.clone()];
        for _ in 0..3 {
            let mut c = honest.clone();
            let v = rng.gen_range(0..g.n());
            if !c[v].is_empty() {
                let i = rng.gen_range(0..c[v].len());
                let b = c[v].get(i);
                c[v].set(i, !b);
            }
            maps.push(c);
        }
        ensure!(run(s.as_ref(), &g, &honest, None).map_err(|e| e.to_string())?.accepted, "{name}: honest run rejected");
        for certs in &maps {
            let one = run(s.as_ref(), &g, certs, Some(1)).map_err(|e| e.to_string())?;
            let many = run(s.as_ref(), &g, certs, Some(4)).map_err(|e| e.to_string())?;
            ensure!(one == many, "{name}: verdict depends on the thread count");
            for v in 0..g.n() {
                let view = extract_view(&g, certs, v, t).map_err(|e| e.to_string())?;
                let first = s.verify(&view).map_err(|e| e.to_string())?;
                // purity: replay on the same and on a copied view
                ensure!(first == s.verify(&view).map_err(|e| e.to_string())?, "{name}: replay differs at {v}");
                ensure!(first == s.verify(&view.clone()).map_err(|e| e.to_string())?, "{name}: copy differs at {v}");
                ensure!(first == !one.rejecting.contains(&v), "{name}: run and direct verification differ at {v}");
                // monotone views: the radius-t view is a sub-view of the radius-(t+1) view
                let big = extract_view(&g, certs, v, t + 1).map_err(|e| e.to_string())?;
                let sub = big.subview(0, t, |i| big.cert(i).clone());
                ensure!(sub == view, "{name}: radius-{t} view is not a sub-view at {v}");
                ensure!(first == s.verify(&sub).map_err(|e| e.to_string())?, "{name}: sub-view verdict differs at {v}");
                checks += 1;
            }
            // locality: splice balls into different hosts
            for _ in 0..4 {
                let v = rng.gen_range(0..g.n());
                let (h, hc, hv) = splice(&g, certs, v, t, &mut rng);
                let a = extract_view(&g, certs, v, t).map_err(|e| e.to_string())?;
                let b = extract_view(&h, &hc, hv, t).map_err(|e| e.to_string())?;
                ensure!(a == b, "{name}: spliced view differs at {v}");
                let (x, y) = (s.verify(&a).map_err(|e| e.to_string())?, s.verify(&b).map_err(|e| e.to_string())?);
                ensure!(x == y, "{name}: verdict depends on the host beyond the ball at {v}");
            }
        }
    }
    // fuzzing is identical at one and several workers
    let c = cycle(9);
    let c = with_marked_edges(&c, c.edges()).map_err(|e| e.to_string())?;
    let s = StScheme::new(2);
    let pool = |k: usize| rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap();
    let a = pool(1).install(|| fuzz_soundness(&s, &c, 300, 5, 20)).map_err(|e| e.to_string())?;
    let b = pool(4).install(|| fuzz_soundness(&s, &c, 300, 5, 20)).map_err(|e| e.to_string())?;
    ensure!(a == b, "fuzz report depends on the thread count");
    Ok(format!("10 scheme families, {checks} node checks for purity, sub-views and threads, plus ball splicing"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 8] = [
        ("gadget diameter dichotomy", criterion_1, 30),
        ("tree scaling", criterion_2, 120),
        ("uniform scaling", criterion_3, 60),
        ("diameter scheme", criterion_4, 180),
        ("spanner scheme", criterion_5, 120),
        ("spanning tree scheme", criterion_6, 300),
        ("minimum spanning tree scheme", criterion_7, 300),
        ("engine properties", criterion_8, 120),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let over = took > Duration::from_secs(*budget);
        let (tag, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("criterion {} [{tag}] {name} ({:.1} s): {detail}", i + 1, took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
