mod common;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use common::{random_edges, Edge};
use native_graph::{
    neighbors_expand, neighbors_expand_pull, ExecutionPolicy, Frontier, Graph, PullScan,
    Representation, VertexId,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_active(seed: u64, n: usize, repr: Representation) -> Frontier {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut f = Frontier::new(repr, n);
    for _ in 0..rng.random_range(0..=n) {
        f.add_vertex(rng.random_range(0..n)).unwrap();
    }
    f
}

/// Destinations reached from each occurrence of an active vertex, by scanning the raw edge list.
fn adjacency_scan(edges: &[Edge], active: &[VertexId]) -> Vec<VertexId> {
    let mut out: Vec<_> = active
        .iter()
        .flat_map(|&v| edges.iter().filter(move |e| e.0 == v).map(|e| e.1))
        .collect();
    out.sort_unstable();
    out
}

fn policies() -> [ExecutionPolicy; 4] {
    [
        ExecutionPolicy::seq(),
        ExecutionPolicy::par(1),
        ExecutionPolicy::par(3),
        ExecutionPolicy::par(8),
    ]
}

#[test]
fn push_matches_adjacency_oracle() {
    for seed in 0..30 {
        let n = 10 + (seed as usize * 7) % 90;
        let edges = random_edges(seed, n);
        let g = Graph::from_edges(&edges, n).unwrap();
        let f = random_active(seed, n, Representation::Sparse);
        let expected = adjacency_scan(&edges, f.as_sparse().unwrap().as_slice());
        for policy in policies() {
            let mut got = neighbors_expand(&policy, &g, &f, |_, _, _, _| true).unwrap().to_vec();
            got.sort_unstable();
            assert_eq!(got, expected, "seed {seed} {policy:?}");
        }
    }
}

#[test]
fn push_and_pull_see_the_same_eligible_edges() {
    for seed in 0..50 {
        let n = 5 + (seed as usize * 13) % 200;
        let g = Graph::from_edges(&random_edges(seed, n), n).unwrap().build_transpose();
        assert!(g.num_edges() <= 1000);
        let f = random_active(seed, n, Representation::Bitmap);
        for policy in policies() {
            let pushed = Mutex::new(BTreeSet::new());
            neighbors_expand(&policy, &g, &f, |s, d, e, _| {
                pushed.lock().unwrap().insert((s, d, e));
                true
            })
            .unwrap();
            let pulled = Mutex::new(BTreeSet::new());
            neighbors_expand_pull(&policy, &g, &f, PullScan::Exhaustive, |s, d, e, _| {
                pulled.lock().unwrap().insert((s, d, e));
                true
            })
            .unwrap();
            assert_eq!(pushed.into_inner().unwrap(), pulled.into_inner().unwrap(), "seed {seed}");
        }
    }
}

#[test]
fn pure_conditions_give_policy_independent_sets() {
    for seed in 0..20 {
        let n = 150;
        let g = Graph::from_edges(&random_edges(seed, n), n).unwrap().build_transpose();
        let keep = |s: usize, d: usize, e: usize, w: f64| (s + d + e) % 3 != 0 && w > 1.0;
        for repr in [Representation::Sparse, Representation::Bitmap] {
            let f = random_active(seed, n, repr);
            let baseline = neighbors_expand(&ExecutionPolicy::seq(), &g, &f, keep).unwrap().to_set();
            for workers in 1..=8 {
                let out = neighbors_expand(&ExecutionPolicy::par(workers), &g, &f, keep).unwrap();
                assert_eq!(out.to_set(), baseline);
            }
            let bits = f.convert(Representation::Bitmap, n);
            let pulled = neighbors_expand_pull(&ExecutionPolicy::par(4), &g, &bits, PullScan::ShortCircuit, keep)
                .unwrap();
            assert_eq!(pulled.to_set(), baseline);
        }
    }
}

#[test]
fn push_invokes_condition_once_per_edge_occurrence() {
    for seed in 0..20 {
        let n = 120;
        let g = Graph::from_edges(&random_edges(seed, n), n).unwrap();
        let f = random_active(seed, n, Representation::Sparse);
        let expected: usize = f.to_vec().iter().map(|&v| g.out_degree(v)).sum();
        for policy in policies() {
            let calls = AtomicUsize::new(0);
            neighbors_expand(&policy, &g, &f, |_, _, _, _| {
                calls.fetch_add(1, Ordering::Relaxed);
                false
            })
            .unwrap();
            assert_eq!(calls.load(Ordering::Relaxed), expected);
        }
    }
}

#[test]
fn no_condition_runs_after_expand_returns() {
    let n = 400;
    let g = Graph::from_edges(&random_edges(9, n), n).unwrap().build_transpose();
    let mut f = Frontier::bitmap(n);
    for v in 0..n {
        f.add_vertex(v).unwrap();
    }
    for round in 0..20 {
        let returned = AtomicBool::new(false);
        let late = AtomicUsize::new(0);
        let cond = |_, d: usize, _, _| {
            if d % 17 == round % 17 {
                std::thread::yield_now();
            }
            if returned.load(Ordering::SeqCst) {
                late.fetch_add(1, Ordering::SeqCst);
            }
            true
        };
        neighbors_expand(&ExecutionPolicy::par(8), &g, &f, cond).unwrap();
        neighbors_expand_pull(&ExecutionPolicy::par(8), &g, &f, PullScan::Exhaustive, cond).unwrap();
        returned.store(true, Ordering::SeqCst);
        std::thread::sleep(std::time::Duration::from_millis(1));
        assert_eq!(late.load(Ordering::SeqCst), 0);
    }
}
