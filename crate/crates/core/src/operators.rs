//! Traversal and transformation operators parameterized by an execution
//! policy.
//!
//! The same operator runs sequentially on the calling thread, or split into
//! static chunks across scoped worker threads that are all joined before it
//! returns (the bulk-synchronous barrier). Asynchronous execution has no
//! barriers, so it is only offered fused with its loop in
//! [`async_expand_loop`].

use std::any::Any;
use std::fmt;
use std::ops::Range;
use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use thiserror::Error;

use crate::frontier::{BitmapFrontier, Frontier, Representation, SparseFrontier};
use crate::graph::{EdgeId, Graph, VertexId, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperatorError {
    #[error("{operation} does not accept a {repr:?} frontier")]
    UnsupportedFrontier {
        operation: &'static str,
        repr: Representation,
    },
    #[error("{operation} cannot run under the {mode} policy")]
    UnsupportedPolicy {
        operation: &'static str,
        mode: Mode,
    },
    #[error("pull traversal needs the transposed graph; build it first")]
    MissingTranspose,
    #[error("frontier capacity {frontier} does not match graph size {graph}")]
    CapacityMismatch { frontier: usize, graph: usize },
    #[error("parallel policies need at least one worker")]
    ZeroWorkers,
    #[error("worker panicked: {0}")]
    WorkerPanic(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Sequential,
    ParallelSync,
    ParallelAsync,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sequential => "seq",
            Mode::ParallelSync => "par",
            Mode::ParallelAsync => "par-nosync",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecutionPolicy {
    mode: Mode,
    workers: usize,
}

impl ExecutionPolicy {
    pub fn new(mode: Mode, workers: usize) -> Result<Self, OperatorError> {
        match mode {
            Mode::Sequential => Ok(Self::seq()),
            _ if workers == 0 => Err(OperatorError::ZeroWorkers),
            _ => Ok(ExecutionPolicy { mode, workers }),
        }
    }

    pub fn seq() -> Self {
        ExecutionPolicy {
            mode: Mode::Sequential,
            workers: 1,
        }
    }

    /// Parallel with a barrier at the end of every operator call.
    pub fn par(workers: usize) -> Self {
        ExecutionPolicy {
            mode: Mode::ParallelSync,
            workers: workers.max(1),
        }
    }

    /// Parallel without barriers.
    pub fn par_nosync(workers: usize) -> Self {
        ExecutionPolicy {
            mode: Mode::ParallelAsync,
            workers: workers.max(1),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// The barrier-synchronized equivalent, used where asynchrony buys nothing.
    pub fn synchronized(&self) -> Self {
        match self.mode {
            Mode::ParallelAsync => Self::par(self.workers),
            _ => *self,
        }
    }
}

/// How a pull traversal scans the in-edges of a destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PullScan {
    /// Stop at the first in-edge whose condition returns true.
    #[default]
    ShortCircuit,
    /// Invoke the condition on every in-edge from an active source.
    Exhaustive,
}

fn panic_message(payload: Box<dyn Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_owned()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_owned()
    }
}

/// Splits `0..len` into at most `workers` even chunks and runs `body` on
/// each, returning results in chunk order once every chunk is done.
fn run_chunked<T, F>(policy: &ExecutionPolicy, len: usize, body: F) -> Result<Vec<T>, OperatorError>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    if policy.mode == Mode::Sequential {
        return Ok(vec![body(0..len)]);
    }
    let chunks = policy.workers.min(len).max(1);
    if chunks == 1 {
        return panic::catch_unwind(AssertUnwindSafe(|| vec![body(0..len)]))
            .map_err(|p| OperatorError::WorkerPanic(panic_message(p)));
    }
    let size = len.div_ceil(chunks);
    let body = &body;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..chunks)
            .map(|i| {
                let range = (i * size).min(len)..((i + 1) * size).min(len);
                s.spawn(move || body(range))
            })
            .collect();
        let mut out = Vec::with_capacity(chunks);
        let mut failure = None;
        for h in handles {
            match h.join() {
                Ok(v) => out.push(v),
                Err(p) => failure = failure.or(Some(panic_message(p))),
            }
        }
        match failure {
            Some(msg) => Err(OperatorError::WorkerPanic(msg)),
            None => Ok(out),
        }
    })
}

fn check_capacity(g: &Graph, f: &Frontier) -> Result<(), OperatorError> {
    if f.capacity() != g.num_vertices() {
        return Err(OperatorError::CapacityMismatch {
            frontier: f.capacity(),
            graph: g.num_vertices(),
        });
    }
    Ok(())
}

fn collect_output(repr: Representation, capacity: usize, parts: Vec<Vec<VertexId>>) -> Frontier {
    match repr {
        Representation::Bitmap => {
            let mut bits = BitmapFrontier::new(capacity);
            for v in parts.into_iter().flatten() {
                bits.insert(v);
            }
            Frontier::from_bitmap(bits)
        }
        _ => {
            let mut list = SparseFrontier::default();
            list.extend(parts.into_iter().flatten());
            Frontier::from_sparse(list, capacity)
        }
    }
}

/// Push traversal: calls `cond(src, dst, edge, weight)` once for every
/// out-edge of every active vertex and returns the destinations for which
/// it returned true. Duplicates are kept in a sparse output.
///
/// All condition calls have finished by the time this returns.
pub fn neighbors_expand<C>(
    policy: &ExecutionPolicy,
    g: &Graph,
    f: &Frontier,
    cond: C,
) -> Result<Frontier, OperatorError>
where
    C: Fn(VertexId, VertexId, EdgeId, Weight) -> bool + Sync,
{
    if policy.mode == Mode::ParallelAsync {
        return Err(OperatorError::UnsupportedPolicy {
            operation: "neighbors_expand",
            mode: policy.mode,
        });
    }
    check_capacity(g, f)?;
    let collected;
    let active: &[VertexId] = match f.representation() {
        Representation::Sparse => f.as_sparse().expect("sparse").as_slice(),
        Representation::Bitmap => {
            collected = f.to_vec();
            &collected
        }
        Representation::Queue => {
            return Err(OperatorError::UnsupportedFrontier {
                operation: "neighbors_expand",
                repr: Representation::Queue,
            })
        }
    };

    let columns = g.column_indices();
    let values = g.values();
    let parts = run_chunked(policy, active.len(), |range| {
        let mut out = Vec::new();
        for &v in &active[range] {
            for e in g.edges_unchecked(v) {
                let n = columns[e];
                if cond(v, n, e, values[e]) {
                    out.push(n);
                }
            }
        }
        out
    })?;
    Ok(collect_output(f.representation(), f.capacity(), parts))
}

/// Pull traversal over the transposed graph: every vertex scans its
/// in-edges and calls `cond(src, dst, edge, weight)` for those whose source
/// is active in the bitmap `f`. `edge` is the original CSR edge id. A
/// destination joins the output at most once.
pub fn neighbors_expand_pull<C>(
    policy: &ExecutionPolicy,
    g: &Graph,
    f: &Frontier,
    scan: PullScan,
    cond: C,
) -> Result<Frontier, OperatorError>
where
    C: Fn(VertexId, VertexId, EdgeId, Weight) -> bool + Sync,
{
    if policy.mode == Mode::ParallelAsync {
        return Err(OperatorError::UnsupportedPolicy {
            operation: "neighbors_expand_pull",
            mode: policy.mode,
        });
    }
    let Some(active) = f.as_bitmap() else {
        return Err(OperatorError::UnsupportedFrontier {
            operation: "neighbors_expand_pull",
            repr: f.representation(),
        });
    };
    check_capacity(g, f)?;
    let csc = g.csc().ok_or(OperatorError::MissingTranspose)?;

    if active.is_empty() {
        return Ok(Frontier::bitmap(g.num_vertices()));
    }
    let parts = run_chunked(policy, g.num_vertices(), |range| {
        let mut out = Vec::new();
        for u in range {
            let mut activated = false;
            for k in csc.in_edges(u) {
                let v = csc.row_indices[k];
                if active.contains(v) && cond(v, u, csc.edge_ids[k], csc.values[k]) {
                    activated = true;
                    if scan == PullScan::ShortCircuit {
                        break;
                    }
                }
            }
            if activated {
                out.push(u);
            }
        }
        out
    })?;
    Ok(collect_output(Representation::Bitmap, f.capacity(), parts))
}

/// Asynchronous message-driven expansion.
///
/// `policy.workers()` threads pop vertices from the queue frontier `f`,
/// expand their out-edges, and send every destination whose condition
/// returned true back to the queue. There are no supersteps. Returns the
/// number of messages processed once the queue is empty and no worker holds
/// unfinished work.
///
/// `cond` must be monotone: applying it again must never undo progress.
pub fn async_expand_loop<C>(
    policy: &ExecutionPolicy,
    g: &Graph,
    f: &Frontier,
    cond: C,
) -> Result<usize, OperatorError>
where
    C: Fn(VertexId, VertexId, EdgeId, Weight) -> bool + Sync,
{
    if policy.mode != Mode::ParallelAsync {
        return Err(OperatorError::UnsupportedPolicy {
            operation: "async_expand_loop",
            mode: policy.mode,
        });
    }
    let Some(queue) = f.queue_handle() else {
        return Err(OperatorError::UnsupportedFrontier {
            operation: "async_expand_loop",
            repr: f.representation(),
        });
    };
    check_capacity(g, f)?;

    // Messages sent but not yet fully expanded. Only expanding workers send,
    // so once this reaches zero it stays zero.
    let pending = AtomicUsize::new(queue.in_flight());
    let processed = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let columns = g.column_indices();
    let values = g.values();

    let worker = || -> Result<(), String> {
        let mut idle_spins = 0u32;
        while !abort.load(Ordering::Acquire) {
            let Some(v) = queue.pop() else {
                if pending.load(Ordering::Acquire) == 0 {
                    return Ok(());
                }
                idle_spins += 1;
                if idle_spins < 64 {
                    std::hint::spin_loop();
                } else {
                    std::thread::yield_now();
                }
                continue;
            };
            idle_spins = 0;
            let expanded = panic::catch_unwind(AssertUnwindSafe(|| {
                for e in g.edges_unchecked(v) {
                    let n = columns[e];
                    if cond(v, n, e, values[e]) {
                        pending.fetch_add(1, Ordering::AcqRel);
                        queue.send(n);
                    }
                }
            }));
            processed.fetch_add(1, Ordering::Relaxed);
            pending.fetch_sub(1, Ordering::AcqRel);
            if let Err(p) = expanded {
                abort.store(true, Ordering::Release);
                return Err(panic_message(p));
            }
        }
        Ok(())
    };

    let results: Vec<Result<(), String>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..policy.workers).map(|_| s.spawn(&worker)).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| Err(panic_message(p))))
            .collect()
    });
    if let Some(Err(msg)) = results.into_iter().find(Result::is_err) {
        while queue.pop().is_some() {}
        return Err(OperatorError::WorkerPanic(msg));
    }
    Ok(processed.into_inner())
}

/// Keeps the elements satisfying `pred`, in the input representation.
/// Sequential mode preserves order.
pub fn filter<P>(policy: &ExecutionPolicy, f: &Frontier, pred: P) -> Result<Frontier, OperatorError>
where
    P: Fn(VertexId) -> bool + Sync,
{
    let repr = f.representation();
    if repr == Representation::Queue {
        return Err(OperatorError::UnsupportedFrontier {
            operation: "filter",
            repr,
        });
    }
    let elements = f.to_vec();
    let parts = run_chunked(&policy.synchronized(), elements.len(), |range| {
        elements[range]
            .iter()
            .copied()
            .filter(|&v| pred(v))
            .collect::<Vec<_>>()
    })?;
    Ok(collect_output(repr, f.capacity(), parts).with_kind(f.kind()))
}

/// Sorts a sparse frontier and drops duplicates.
pub fn uniquify(f: &Frontier) -> Result<Frontier, OperatorError> {
    let Some(list) = f.as_sparse() else {
        return Err(OperatorError::UnsupportedFrontier {
            operation: "uniquify",
            repr: f.representation(),
        });
    };
    let mut v = list.as_slice().to_vec();
    v.sort_unstable();
    v.dedup();
    let mut out = SparseFrontier::default();
    out.extend(v);
    Ok(Frontier::from_sparse(out, f.capacity()).with_kind(f.kind()))
}

/// Calls `body(v)` exactly once for every `v` in `0..n` and returns after
/// all calls finish. The asynchronous policy behaves like the synchronous one.
pub fn parallel_for_each_vertex<B>(
    policy: &ExecutionPolicy,
    n: usize,
    body: B,
) -> Result<(), OperatorError>
where
    B: Fn(VertexId) + Sync,
{
    run_chunked(&policy.synchronized(), n, |range| range.for_each(&body))?;
    Ok(())
}
