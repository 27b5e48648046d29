//! Active vertex (or edge) sets.
//!
//! Three representations sit behind [`Frontier`]:
//!
//! - [`SparseFrontier`]: a growable list; duplicates are kept, so `size`
//!   counts every occurrence.
//! - [`BitmapFrontier`]: one bit per element plus a cached population count;
//!   set semantics.
//! - [`QueueFrontier`]: a multi-producer multi-consumer queue. Adding an
//!   element is sending a message and is safe from any thread.
//!
//! Sparse and bitmap frontiers live in shared memory and are read by all
//! workers of a bulk-synchronous step. The queue carries messages between
//! asynchronous workers.

use std::sync::atomic::{AtomicUsize, Ordering};

use crossbeam_queue::SegQueue;
use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontierError {
    #[error("element {element} out of range for capacity {capacity}")]
    OutOfRange { element: usize, capacity: usize },
    #[error("index {index} out of range for frontier of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("{operation} is not supported by the {repr:?} representation")]
    Representation {
        operation: &'static str,
        repr: Representation,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    Sparse,
    Bitmap,
    Queue,
}

/// Whether the frontier holds vertex ids or edge ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrontierKind {
    #[default]
    Vertex,
    Edge,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseFrontier {
    elements: Vec<VertexId>,
}

impl SparseFrontier {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.elements
    }

    pub(crate) fn push(&mut self, v: VertexId) {
        self.elements.push(v);
    }

    pub(crate) fn extend<I: IntoIterator<Item = VertexId>>(&mut self, it: I) {
        self.elements.extend(it);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitmapFrontier {
    words: Vec<u64>,
    count: usize,
    capacity: usize,
}

impl BitmapFrontier {
    pub fn new(capacity: usize) -> Self {
        BitmapFrontier {
            words: vec![0; capacity.div_ceil(64)],
            count: 0,
            capacity,
        }
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        v < self.capacity && self.words[v / 64] & (1 << (v % 64)) != 0
    }

    /// Sets bit `v`; returns true if it was previously clear.
    #[inline]
    pub(crate) fn insert(&mut self, v: VertexId) -> bool {
        let word = &mut self.words[v / 64];
        let mask = 1u64 << (v % 64);
        let fresh = *word & mask == 0;
        *word |= mask;
        self.count += fresh as usize;
        fresh
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Set bits in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }

    /// The `i`-th set bit in ascending order.
    pub fn nth(&self, mut i: usize) -> Option<VertexId> {
        if i >= self.count {
            return None;
        }
        for (wi, &word) in self.words.iter().enumerate() {
            let ones = word.count_ones() as usize;
            if i < ones {
                let mut w = word;
                for _ in 0..i {
                    w &= w - 1;
                }
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
            i -= ones;
        }
        None
    }

    pub fn recount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Multi-producer multi-consumer message queue.
///
/// `in_flight` is `enqueued - dequeued`. It is exact only while no thread
/// is sending or popping.
#[derive(Debug, Default)]
pub struct QueueFrontier {
    queue: SegQueue<VertexId>,
    in_flight: AtomicUsize,
}

impl QueueFrontier {
    pub fn send(&self, v: VertexId) {
        self.in_flight.fetch_add(1, Ordering::AcqRel);
        self.queue.push(v);
    }

    pub fn pop(&self) -> Option<VertexId> {
        let v = self.queue.pop()?;
        self.in_flight.fetch_sub(1, Ordering::AcqRel);
        Some(v)
    }

    pub fn in_flight(&self) -> usize {
        self.in_flight.load(Ordering::Acquire)
    }

    /// Drains and re-enqueues every element. Requires quiescence.
    fn snapshot(&self) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.queue.len());
        while let Some(v) = self.queue.pop() {
            out.push(v);
        }
        for &v in &out {
            self.queue.push(v);
        }
        out
    }
}

#[derive(Debug)]
enum Storage {
    Sparse(SparseFrontier),
    Bitmap(BitmapFrontier),
    Queue(QueueFrontier),
}

/// A frontier over elements `0..capacity`.
#[derive(Debug)]
pub struct Frontier {
    storage: Storage,
    kind: FrontierKind,
    capacity: usize,
}

impl Frontier {
    pub fn new(repr: Representation, capacity: usize) -> Self {
        let storage = match repr {
            Representation::Sparse => Storage::Sparse(SparseFrontier::default()),
            Representation::Bitmap => Storage::Bitmap(BitmapFrontier::new(capacity)),
            Representation::Queue => Storage::Queue(QueueFrontier::default()),
        };
        Frontier {
            storage,
            kind: FrontierKind::Vertex,
            capacity,
        }
    }

    pub fn sparse(capacity: usize) -> Self {
        Self::new(Representation::Sparse, capacity)
    }

    pub fn bitmap(capacity: usize) -> Self {
        Self::new(Representation::Bitmap, capacity)
    }

    pub fn queue(capacity: usize) -> Self {
        Self::new(Representation::Queue, capacity)
    }

    pub fn with_kind(mut self, kind: FrontierKind) -> Self {
        self.kind = kind;
        self
    }

    pub(crate) fn from_sparse(list: SparseFrontier, capacity: usize) -> Self {
        Frontier {
            storage: Storage::Sparse(list),
            kind: FrontierKind::Vertex,
            capacity,
        }
    }

    pub(crate) fn from_bitmap(bits: BitmapFrontier) -> Self {
        Frontier {
            capacity: bits.capacity,
            storage: Storage::Bitmap(bits),
            kind: FrontierKind::Vertex,
        }
    }

    pub fn representation(&self) -> Representation {
        match self.storage {
            Storage::Sparse(_) => Representation::Sparse,
            Storage::Bitmap(_) => Representation::Bitmap,
            Storage::Queue(_) => Representation::Queue,
        }
    }

    pub fn kind(&self) -> FrontierKind {
        self.kind
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Number of active elements. For a queue this is the in-flight count.
    pub fn size(&self) -> usize {
        match &self.storage {
            Storage::Sparse(s) => s.len(),
            Storage::Bitmap(b) => b.len(),
            Storage::Queue(q) => q.in_flight(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    fn check(&self, v: VertexId) -> Result<(), FrontierError> {
        if v >= self.capacity {
            return Err(FrontierError::OutOfRange {
                element: v,
                capacity: self.capacity,
            });
        }
        Ok(())
    }

    pub fn add_vertex(&mut self, v: VertexId) -> Result<(), FrontierError> {
        self.check(v)?;
        match &mut self.storage {
            Storage::Sparse(s) => s.push(v),
            Storage::Bitmap(b) => {
                b.insert(v);
            }
            Storage::Queue(q) => q.send(v),
        }
        Ok(())
    }

    /// Sends `v` through a shared reference. Queue representation only.
    pub fn send(&self, v: VertexId) -> Result<(), FrontierError> {
        self.check(v)?;
        self.as_queue("send")?.send(v);
        Ok(())
    }

    pub fn get_active_vertex(&self, i: usize) -> Result<VertexId, FrontierError> {
        let size = self.size();
        let found = match &self.storage {
            Storage::Sparse(s) => s.as_slice().get(i).copied(),
            Storage::Bitmap(b) => b.nth(i),
            Storage::Queue(_) => {
                return Err(FrontierError::Representation {
                    operation: "get_active_vertex",
                    repr: Representation::Queue,
                })
            }
        };
        found.ok_or(FrontierError::IndexOutOfRange { index: i, size })
    }

    pub fn pop(&self) -> Result<Option<VertexId>, FrontierError> {
        Ok(self.as_queue("pop")?.pop())
    }

    pub fn as_sparse(&self) -> Option<&SparseFrontier> {
        match &self.storage {
            Storage::Sparse(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bitmap(&self) -> Option<&BitmapFrontier> {
        match &self.storage {
            Storage::Bitmap(b) => Some(b),
            _ => None,
        }
    }

    fn as_queue(&self, operation: &'static str) -> Result<&QueueFrontier, FrontierError> {
        match &self.storage {
            Storage::Queue(q) => Ok(q),
            _ => Err(FrontierError::Representation {
                operation,
                repr: self.representation(),
            }),
        }
    }

    pub fn queue_handle(&self) -> Option<&QueueFrontier> {
        self.as_queue("queue_handle").ok()
    }

    /// Active elements in storage order (ascending for a bitmap). The queue
    /// is drained and refilled, so it must be quiescent.
    pub fn to_vec(&self) -> Vec<VertexId> {
        match &self.storage {
            Storage::Sparse(s) => s.as_slice().to_vec(),
            Storage::Bitmap(b) => b.iter().collect(),
            Storage::Queue(q) => q.snapshot(),
        }
    }

    /// Sorted, duplicate-free contents.
    pub fn to_set(&self) -> Vec<VertexId> {
        let mut v = self.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Copies the active set into a new representation. Converting to a
    /// bitmap drops duplicates; converting from a bitmap yields ascending
    /// order. `self` must be quiescent.
    pub fn convert(&self, target: Representation, capacity: usize) -> Frontier {
        let elements = self.to_vec();
        let mut out = Frontier::new(target, capacity).with_kind(self.kind);
        match &mut out.storage {
            Storage::Sparse(s) => s.extend(elements),
            Storage::Bitmap(b) => {
                for v in elements {
                    b.insert(v);
                }
            }
            Storage::Queue(q) => {
                for v in elements {
                    q.send(v);
                }
            }
        }
        out
    }
}
