//! Shortest paths and breadth-first search built from the operators, plus
//! a sequential Dijkstra used as the reference.

use std::cmp::Ordering as CmpOrdering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use thiserror::Error;

use crate::frontier::{Frontier, Representation};
use crate::graph::{Graph, VertexId, Weight};
use crate::operators::{
    async_expand_loop, neighbors_expand, neighbors_expand_pull, parallel_for_each_vertex, uniquify,
    ExecutionPolicy, Mode, OperatorError, PullScan,
};

pub type DistanceMap = Vec<Weight>;
pub type PredecessorMap = Vec<Option<VertexId>>;

pub const UNREACHABLE: Weight = f64::INFINITY;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgorithmError {
    #[error("source {vertex} out of range for {num_vertices} vertices")]
    SourceOutOfRange { vertex: VertexId, num_vertices: usize },
    #[error("invalid configuration {config}: {reason}")]
    InvalidConfig { config: String, reason: &'static str },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// An `f64` cell supporting atomic minimum.
#[derive(Debug)]
pub struct AtomicWeight(AtomicU64);

impl AtomicWeight {
    pub fn new(value: Weight) -> Self {
        AtomicWeight(AtomicU64::new(value.to_bits()))
    }

    #[inline]
    pub fn load(&self) -> Weight {
        f64::from_bits(self.0.load(Ordering::Acquire))
    }

    #[inline]
    pub fn store(&self, value: Weight) {
        self.0.store(value.to_bits(), Ordering::Release)
    }

    /// Sets the cell to `min(cell, value)` and returns the previous value.
    #[inline]
    pub fn fetch_min(&self, value: Weight) -> Weight {
        let mut current = self.0.load(Ordering::Acquire);
        loop {
            let old = f64::from_bits(current);
            if value >= old {
                return old;
            }
            match self.0.compare_exchange_weak(
                current,
                value.to_bits(),
                Ordering::AcqRel,
                Ordering::Acquire,
            ) {
                Ok(_) => return old,
                Err(actual) => current = actual,
            }
        }
    }

    pub fn into_inner(self) -> Weight {
        f64::from_bits(self.0.into_inner())
    }
}

/// Atomically lowers `slot` to `value` if smaller; returns the prior value.
#[inline]
pub fn atomic_min(slot: &AtomicWeight, value: Weight) -> Weight {
    slot.fetch_min(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Push,
    Pull,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Push => "push",
            Direction::Pull => "pull",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SsspConfig {
    pub policy: ExecutionPolicy,
    pub direction: Direction,
    pub frontier: Representation,
    /// Deduplicate sparse frontiers after every superstep.
    pub uniquify: bool,
}

impl fmt::Display for SsspConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let repr = match self.frontier {
            Representation::Sparse => "sparse",
            Representation::Bitmap => "dense",
            Representation::Queue => "queue",
        };
        write!(f, "{}", self.policy.mode())?;
        if self.policy.mode() != Mode::Sequential {
            write!(f, "({})", self.policy.workers())?;
        }
        write!(f, "/{}/{}", self.direction, repr)
    }
}

impl SsspConfig {
    pub fn new(policy: ExecutionPolicy, direction: Direction, frontier: Representation) -> Self {
        SsspConfig {
            policy,
            direction,
            frontier,
            uniquify: false,
        }
    }

    pub fn validate(&self) -> Result<(), AlgorithmError> {
        let invalid = |reason| {
            Err(AlgorithmError::InvalidConfig {
                config: self.to_string(),
                reason,
            })
        };
        let is_async = self.policy.mode() == Mode::ParallelAsync;
        let is_queue = self.frontier == Representation::Queue;
        if is_queue && !is_async {
            return invalid("the queue frontier requires the par-nosync policy");
        }
        if is_async && !is_queue {
            return invalid("the par-nosync policy requires the queue frontier");
        }
        if is_queue && self.direction == Direction::Pull {
            return invalid("the queue frontier supports push traversal only");
        }
        Ok(())
    }

    /// Every valid combination: {seq, par} x {push, pull} x {sparse, dense}
    /// plus par-nosync with a push-driven queue.
    pub fn all_valid(workers: usize) -> Vec<SsspConfig> {
        let mut out = Vec::with_capacity(9);
        for policy in [ExecutionPolicy::seq(), ExecutionPolicy::par(workers)] {
            for direction in [Direction::Push, Direction::Pull] {
                for frontier in [Representation::Sparse, Representation::Bitmap] {
                    out.push(SsspConfig::new(policy, direction, frontier));
                }
            }
        }
        out.push(SsspConfig::new(
            ExecutionPolicy::par_nosync(workers),
            Direction::Push,
            Representation::Queue,
        ));
        out
    }
}

/// Counters collected while running an algorithm.
///
/// `supersteps` is the number of barrier-separated steps for synchronous
/// configurations and the number of processed messages for the queue.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub supersteps: usize,
    pub relaxations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPaths {
    pub dist: DistanceMap,
    pub pred: PredecessorMap,
    pub stats: RunStats,
}

fn check_source(g: &Graph, source: VertexId) -> Result<(), AlgorithmError> {
    if source >= g.num_vertices() {
        return Err(AlgorithmError::SourceOutOfRange {
            vertex: source,
            num_vertices: g.num_vertices(),
        });
    }
    Ok(())
}

/// Runs bulk-synchronous supersteps until the frontier is empty.
fn superstep_loop<C>(
    g: &Graph,
    source: VertexId,
    cfg: &SsspConfig,
    scan: PullScan,
    mut before_step: impl FnMut(usize),
    cond: C,
) -> Result<usize, AlgorithmError>
where
    C: Fn(VertexId, VertexId, usize, Weight) -> bool + Sync,
{
    let n = g.num_vertices();
    if cfg.direction == Direction::Pull {
        g.transpose();
    }
    let mut frontier = Frontier::new(cfg.frontier, n);
    frontier.add_vertex(source).expect("source checked");
    let mut supersteps = 0;
    while frontier.size() != 0 {
        before_step(supersteps);
        frontier = match cfg.direction {
            Direction::Push => neighbors_expand(&cfg.policy, g, &frontier, &cond)?,
            Direction::Pull => {
                let bits = match frontier.representation() {
                    Representation::Bitmap => frontier,
                    _ => frontier.convert(Representation::Bitmap, n),
                };
                let out = neighbors_expand_pull(&cfg.policy, g, &bits, scan, &cond)?;
                match cfg.frontier {
                    Representation::Bitmap => out,
                    _ => out.convert(Representation::Sparse, n),
                }
            }
        };
        if cfg.uniquify && frontier.representation() == Representation::Sparse {
            frontier = uniquify(&frontier)?;
        }
        supersteps += 1;
    }
    Ok(supersteps)
}

/// Single-source shortest paths by repeated parallel relaxation.
///
/// Distances are exact. Predecessors are rebuilt after convergence from the
/// tight edges (`dist[u] + w == dist[v]`) so that they always form a tree
/// rooted at `source`.
pub fn sssp(g: &Graph, source: VertexId, cfg: &SsspConfig) -> Result<ShortestPaths, AlgorithmError> {
    cfg.validate()?;
    check_source(g, source)?;
    let n = g.num_vertices();

    let dist: Vec<AtomicWeight> = (0..n).map(|_| AtomicWeight::new(UNREACHABLE)).collect();
    parallel_for_each_vertex(&cfg.policy, n, |v| dist[v].store(UNREACHABLE))?;
    dist[source].store(0.0);

    let relaxations = AtomicU64::new(0);
    let relax = |src: VertexId, dst: VertexId, _e: usize, w: Weight| {
        relaxations.fetch_add(1, Ordering::Relaxed);
        let new_d = dist[src].load() + w;
        let curr_d = atomic_min(&dist[dst], new_d);
        new_d < curr_d
    };

    let supersteps = if cfg.policy.mode() == Mode::ParallelAsync {
        let f = Frontier::queue(n);
        f.send(source).expect("source checked");
        async_expand_loop(&cfg.policy, g, &f, relax)?
    } else {
        superstep_loop(g, source, cfg, PullScan::Exhaustive, |_| {}, relax)?
    };

    let dist: DistanceMap = dist.into_iter().map(AtomicWeight::into_inner).collect();
    let pred = tight_tree(g, source, &dist);
    Ok(ShortestPaths {
        dist,
        pred,
        stats: RunStats {
            supersteps,
            relaxations: relaxations.into_inner(),
        },
    })
}

/// Breadth-first tree over tight edges, scanning out-edges in CSR order.
fn tight_tree(g: &Graph, source: VertexId, dist: &[Weight]) -> PredecessorMap {
    let n = g.num_vertices();
    let mut pred = vec![None; n];
    let mut seen = vec![false; n];
    seen[source] = true;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for e in g.edges_unchecked(u) {
            let v = g.column_indices()[e];
            if !seen[v] && dist[u] + g.values()[e] == dist[v] {
                seen[v] = true;
                pred[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    pred
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: Weight,
    vertex: VertexId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> CmpOrdering {
        // reversed for a min-heap
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<CmpOrdering> {
        Some(self.cmp(other))
    }
}

/// Textbook Dijkstra with a binary heap and lazy deletion.
pub fn reference_dijkstra(g: &Graph, source: VertexId) -> Result<ShortestPaths, AlgorithmError> {
    check_source(g, source)?;
    let n = g.num_vertices();
    let mut dist = vec![UNREACHABLE; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut relaxations = 0u64;
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        vertex: source,
    });
    let mut extracted = 0;
    while let Some(HeapEntry { dist: d, vertex: u }) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        extracted += 1;
        for e in g.edges_unchecked(u) {
            let v = g.column_indices()[e];
            let candidate = d + g.values()[e];
            relaxations += 1;
            if dist[v] > candidate {
                dist[v] = candidate;
                pred[v] = Some(u);
                heap.push(HeapEntry {
                    dist: candidate,
                    vertex: v,
                });
            }
        }
    }
    Ok(ShortestPaths {
        dist,
        pred,
        stats: RunStats {
            supersteps: extracted,
            relaxations,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfsResult {
    pub depth: Vec<Option<usize>>,
    /// The vertex whose expansion claimed each vertex.
    pub parent: PredecessorMap,
    pub stats: RunStats,
}

impl BfsResult {
    /// Depths as distances, with unreached vertices at infinity.
    pub fn distances(&self) -> DistanceMap {
        self.depth
            .iter()
            .map(|d| d.map_or(UNREACHABLE, |d| d as Weight))
            .collect()
    }
}

const UNVISITED: usize = usize::MAX;

/// Breadth-first search reusing the expand operators with a claim
/// condition: the first compare-exchange of `depth[dst]` away from the
/// sentinel wins, so every vertex has exactly one claimant.
pub fn bfs(g: &Graph, source: VertexId, cfg: &SsspConfig) -> Result<BfsResult, AlgorithmError> {
    cfg.validate()?;
    if cfg.frontier == Representation::Queue {
        return Err(AlgorithmError::InvalidConfig {
            config: cfg.to_string(),
            reason: "bfs needs supersteps to advance levels; the queue frontier has none",
        });
    }
    check_source(g, source)?;
    let n = g.num_vertices();

    let depth: Vec<AtomicUsize> = (0..n).map(|_| AtomicUsize::new(UNVISITED)).collect();
    let parent: Vec<AtomicUsize> = (0..n).map(|_| AtomicUsize::new(UNVISITED)).collect();
    parallel_for_each_vertex(&cfg.policy, n, |v| {
        depth[v].store(UNVISITED, Ordering::Relaxed);
        parent[v].store(UNVISITED, Ordering::Relaxed);
    })?;
    depth[source].store(0, Ordering::Release);

    let level = AtomicUsize::new(0);
    let relaxations = AtomicU64::new(0);
    let claim = |src: VertexId, dst: VertexId, _e: usize, _w: Weight| {
        relaxations.fetch_add(1, Ordering::Relaxed);
        let next = level.load(Ordering::Relaxed) + 1;
        let won = depth[dst]
            .compare_exchange(UNVISITED, next, Ordering::AcqRel, Ordering::Acquire)
            .is_ok();
        if won {
            parent[dst].store(src, Ordering::Release);
        }
        won
    };
    let supersteps = superstep_loop(
        g,
        source,
        cfg,
        PullScan::ShortCircuit,
        |step| level.store(step, Ordering::Relaxed),
        claim,
    )?;

    let unpack = |x: usize| (x != UNVISITED).then_some(x);
    Ok(BfsResult {
        depth: depth.into_iter().map(|d| unpack(d.into_inner())).collect(),
        parent: parent.into_iter().map(|p| unpack(p.into_inner())).collect(),
        stats: RunStats {
            supersteps,
            relaxations: relaxations.into_inner(),
        },
    })
}

/// Checks that `pred` is a shortest-path tree for `dist`: every reachable
/// non-source vertex has a predecessor joined by a tight edge, and following
/// predecessors reaches `source` without cycles.
pub fn check_predecessor_tree(
    g: &Graph,
    source: VertexId,
    dist: &[Weight],
    pred: &[Option<VertexId>],
) -> Result<(), String> {
    let n = g.num_vertices();
    if dist.len() != n || pred.len() != n {
        return Err("array lengths differ from |V|".into());
    }
    if dist[source] != 0.0 || pred[source].is_some() {
        return Err(format!("source {source} must have distance 0 and no predecessor"));
    }
    for v in (0..n).filter(|&v| v != source) {
        match (dist[v].is_finite(), pred[v]) {
            (false, None) => {}
            (false, Some(p)) => return Err(format!("unreachable vertex {v} has predecessor {p}")),
            (true, None) => return Err(format!("reachable vertex {v} has no predecessor")),
            (true, Some(p)) => {
                let tight = g
                    .edges_unchecked(p)
                    .into_iter()
                    .any(|e| g.column_indices()[e] == v && dist[p] + g.values()[e] == dist[v]);
                if !tight {
                    return Err(format!("no edge {p}->{v} realizes dist[{v}] = {}", dist[v]));
                }
            }
        }
    }
    // 0 = unvisited, 1 = on the current chain, 2 = known to reach the source
    let mut state = vec![0u8; n];
    state[source] = 2;
    for start in 0..n {
        if state[start] != 0 || !dist[start].is_finite() {
            continue;
        }
        let mut chain = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            chain.push(v);
            v = pred[v].expect("reachable vertices have predecessors");
        }
        if state[v] == 1 {
            return Err(format!("predecessor cycle through vertex {v}"));
        }
        for c in chain {
            state[c] = 2;
        }
    }
    Ok(())
}
