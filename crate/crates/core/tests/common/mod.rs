#![allow(dead_code)]

use native_graph::{Graph, VertexId, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Edge = (VertexId, VertexId, Weight);

/// Directed G(n, p) with p = 4/n; weights uniform in [0, 10), 10% of them zero.
pub fn random_edges(seed: u64, n: usize) -> Vec<Edge> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = (4.0 / n as f64).min(1.0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if rng.random_bool(p) {
                let w = if rng.random_bool(0.1) {
                    0.0
                } else {
                    rng.random_range(0.0..10.0)
                };
                edges.push((u, v, w));
            }
        }
    }
    edges
}

pub fn random_graph(seed: u64, n: usize) -> Graph {
    Graph::from_edges(&random_edges(seed, n), n).unwrap()
}

pub fn sorted_edges(mut edges: Vec<Edge>) -> Vec<(VertexId, VertexId, u64)> {
    edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
    edges.into_iter().map(|(s, d, w)| (s, d, w.to_bits())).collect()
}

/// Brute-force shortest distances: relax every edge until nothing changes.
pub fn bellman_ford(n: usize, edges: &[Edge], source: VertexId) -> Vec<Weight> {
    let mut dist = vec![f64::INFINITY; n];
    dist[source] = 0.0;
    loop {
        let mut changed = false;
        for &(u, v, w) in edges {
            if dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
                changed = true;
            }
        }
        if !changed {
            return dist;
        }
    }
}

/// Hop counts by repeated frontier scans over the raw edge list.
pub fn brute_force_hops(n: usize, edges: &[Edge], source: VertexId) -> Vec<Option<usize>> {
    let mut depth = vec![None; n];
    depth[source] = Some(0);
    let mut level = 0;
    loop {
        let mut grew = false;
        for &(u, v, _) in edges {
            if depth[u] == Some(level) && depth[v].is_none() {
                depth[v] = Some(level + 1);
                grew = true;
            }
        }
        if !grew {
            return depth;
        }
        level += 1;
    }
}
