//! Immutable sparse graph storage.
//!
//! A [`Graph`] always carries its CSR (out-edge) arrays. The CSC (in-edge)
//! arrays used by pull traversals are built on first request and cached
//! next to the CSR, so graphs that are only traversed by push never pay
//! for them.

use std::ops::Range;
use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Weight = f64;
pub type PartitionId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {edge}: vertex {vertex} out of range for {num_vertices} vertices")]
    VertexOutOfRange {
        edge: usize,
        vertex: VertexId,
        num_vertices: usize,
    },
    #[error("edge {edge}: weight {weight} is negative or not finite")]
    InvalidWeight { edge: usize, weight: Weight },
    #[error("vertex {vertex} out of range for {num_vertices} vertices")]
    NoSuchVertex { vertex: VertexId, num_vertices: usize },
    #[error("edge {edge} out of range for {num_edges} edges")]
    NoSuchEdge { edge: EdgeId, num_edges: usize },
    #[error("partition count must be at least 1")]
    ZeroPartitions,
}

/// Half-open range of edge ids holding one vertex's out-edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRange {
    pub start: EdgeId,
    pub end: EdgeId,
}

impl EdgeRange {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.start <= e && e < self.end
    }
}

impl IntoIterator for EdgeRange {
    type Item = EdgeId;
    type IntoIter = Range<EdgeId>;

    fn into_iter(self) -> Range<EdgeId> {
        self.start..self.end
    }
}

/// Transposed (compressed sparse column) view of a graph.
///
/// `edge_ids[k]` maps the k-th CSC entry back to its id in the CSR arrays,
/// so callbacks invoked from a pull traversal see the same edge ids as a
/// push traversal would.
#[derive(Debug, Clone, PartialEq)]
pub struct Csc {
    pub col_offsets: Vec<EdgeId>,
    pub row_indices: Vec<VertexId>,
    pub values: Vec<Weight>,
    pub edge_ids: Vec<EdgeId>,
}

impl Csc {
    /// In-edges of `v` as a range into the CSC arrays.
    pub fn in_edges(&self, v: VertexId) -> Range<usize> {
        self.col_offsets[v]..self.col_offsets[v + 1]
    }
}

#[derive(Debug)]
pub struct Graph {
    num_vertices: usize,
    row_offsets: Vec<EdgeId>,
    column_indices: Vec<VertexId>,
    values: Vec<Weight>,
    csc: OnceLock<Csc>,
    partition: Option<Vec<PartitionId>>,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        let csc = OnceLock::new();
        if let Some(t) = self.csc.get() {
            let _ = csc.set(t.clone());
        }
        Graph {
            num_vertices: self.num_vertices,
            row_offsets: self.row_offsets.clone(),
            column_indices: self.column_indices.clone(),
            values: self.values.clone(),
            csc,
            partition: self.partition.clone(),
        }
    }
}

impl Graph {
    /// Builds the CSR representation from an edge list.
    ///
    /// Out-edges of each vertex are stored contiguously, sorted by
    /// destination and then weight. Parallel edges and self-loops are kept.
    pub fn from_edges(
        edges: &[(VertexId, VertexId, Weight)],
        num_vertices: usize,
    ) -> Result<Self, GraphError> {
        for (i, &(src, dst, w)) in edges.iter().enumerate() {
            for vertex in [src, dst] {
                if vertex >= num_vertices {
                    return Err(GraphError::VertexOutOfRange {
                        edge: i,
                        vertex,
                        num_vertices,
                    });
                }
            }
            if !w.is_finite() || w < 0.0 {
                return Err(GraphError::InvalidWeight { edge: i, weight: w });
            }
        }

        let mut sorted = edges.to_vec();
        sorted.sort_by(|a, b| {
            (a.0, a.1)
                .cmp(&(b.0, b.1))
                .then_with(|| a.2.total_cmp(&b.2))
        });

        let mut row_offsets = vec![0; num_vertices + 1];
        for &(src, _, _) in &sorted {
            row_offsets[src + 1] += 1;
        }
        for v in 0..num_vertices {
            row_offsets[v + 1] += row_offsets[v];
        }

        let graph = Graph {
            num_vertices,
            row_offsets,
            column_indices: sorted.iter().map(|e| e.1).collect(),
            values: sorted.iter().map(|e| e.2).collect(),
            csc: OnceLock::new(),
            partition: None,
        };
        debug_assert!(graph.check_invariants().is_ok());
        Ok(graph)
    }

    /// Returns the graph with its CSC populated.
    pub fn build_transpose(self) -> Self {
        self.transpose();
        self
    }

    /// The CSC view, built on first call and cached afterwards.
    pub fn transpose(&self) -> &Csc {
        self.csc.get_or_init(|| self.compute_csc())
    }

    /// The CSC view if it has already been built.
    pub fn csc(&self) -> Option<&Csc> {
        self.csc.get()
    }

    pub fn has_transpose(&self) -> bool {
        self.csc.get().is_some()
    }

    fn compute_csc(&self) -> Csc {
        let n = self.num_vertices;
        let m = self.num_edges();
        let mut col_offsets = vec![0; n + 1];
        for &dst in &self.column_indices {
            col_offsets[dst + 1] += 1;
        }
        for v in 0..n {
            col_offsets[v + 1] += col_offsets[v];
        }

        let mut cursor = col_offsets.clone();
        let mut row_indices = vec![0; m];
        let mut values = vec![0.0; m];
        let mut edge_ids = vec![0; m];
        // Scanning sources in ascending order keeps each column sorted by source.
        for src in 0..n {
            for e in self.row_offsets[src]..self.row_offsets[src + 1] {
                let dst = self.column_indices[e];
                let slot = cursor[dst];
                cursor[dst] += 1;
                row_indices[slot] = src;
                values[slot] = self.values[e];
                edge_ids[slot] = e;
            }
        }
        Csc {
            col_offsets,
            row_indices,
            values,
            edge_ids,
        }
    }

    /// A new graph with every edge reversed.
    pub fn reversed(&self) -> Graph {
        let csc = self.transpose();
        let mut edges = Vec::with_capacity(self.num_edges());
        for dst in 0..self.num_vertices {
            for k in csc.in_edges(dst) {
                edges.push((dst, csc.row_indices[k], csc.values[k]));
            }
        }
        Graph::from_edges(&edges, self.num_vertices).expect("reversed edges are valid")
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.column_indices.len()
    }

    pub fn row_offsets(&self) -> &[EdgeId] {
        &self.row_offsets
    }

    pub fn column_indices(&self) -> &[VertexId] {
        &self.column_indices
    }

    pub fn values(&self) -> &[Weight] {
        &self.values
    }

    pub fn partition(&self) -> Option<&[PartitionId]> {
        self.partition.as_deref()
    }

    pub fn get_edges(&self, v: VertexId) -> Result<EdgeRange, GraphError> {
        if v >= self.num_vertices {
            return Err(GraphError::NoSuchVertex {
                vertex: v,
                num_vertices: self.num_vertices,
            });
        }
        Ok(self.edges_unchecked(v))
    }

    #[inline]
    pub(crate) fn edges_unchecked(&self, v: VertexId) -> EdgeRange {
        EdgeRange {
            start: self.row_offsets[v],
            end: self.row_offsets[v + 1],
        }
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.row_offsets[v + 1] - self.row_offsets[v]
    }

    fn check_edge(&self, e: EdgeId) -> Result<(), GraphError> {
        if e >= self.num_edges() {
            return Err(GraphError::NoSuchEdge {
                edge: e,
                num_edges: self.num_edges(),
            });
        }
        Ok(())
    }

    pub fn get_dest_vertex(&self, e: EdgeId) -> Result<VertexId, GraphError> {
        self.check_edge(e)?;
        Ok(self.column_indices[e])
    }

    pub fn get_edge_weight(&self, e: EdgeId) -> Result<Weight, GraphError> {
        self.check_edge(e)?;
        Ok(self.values[e])
    }

    /// Source of edge `e`, found by binary search over the row offsets.
    pub fn get_source_vertex(&self, e: EdgeId) -> Result<VertexId, GraphError> {
        self.check_edge(e)?;
        // Last vertex whose first edge is <= e. Vertices with no out-edges share
        // an offset with their successor, so partition_point skips past them.
        Ok(self.row_offsets.partition_point(|&off| off <= e) - 1)
    }

    /// Iterates `(src, dst, weight)` in CSR order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, Weight)> + '_ {
        (0..self.num_vertices).flat_map(move |v| {
            self.edges_unchecked(v)
                .into_iter()
                .map(move |e| (v, self.column_indices[e], self.values[e]))
        })
    }

    /// Assigns every vertex to one of `k` partitions uniformly at random.
    pub fn random_partition(mut self, k: usize, seed: u64) -> Result<Self, GraphError> {
        if k == 0 {
            return Err(GraphError::ZeroPartitions);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parts = (0..self.num_vertices)
            .map(|_| rng.random_range(0..k) as PartitionId)
            .collect();
        self.partition = Some(parts);
        Ok(self)
    }

    /// Verifies the structural CSR (and CSC, when built) invariants.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.num_vertices;
        let m = self.num_edges();
        if self.row_offsets.len() != n + 1 {
            return Err(format!("row_offsets has length {}", self.row_offsets.len()));
        }
        if self.row_offsets[0] != 0 || self.row_offsets[n] != m {
            return Err("row_offsets must start at 0 and end at |E|".into());
        }
        if self.row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err("row_offsets is not monotone".into());
        }
        if self.values.len() != m {
            return Err("values length differs from |E|".into());
        }
        if let Some(c) = self.column_indices.iter().find(|&&c| c >= n) {
            return Err(format!("column index {c} out of range"));
        }
        if let Some(w) = self.values.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(format!("invalid weight {w}"));
        }
        if let Some(csc) = self.csc.get() {
            if csc.col_offsets.len() != n + 1 || csc.col_offsets[n] != m {
                return Err("csc offsets malformed".into());
            }
            for dst in 0..n {
                for k in csc.in_edges(dst) {
                    let e = csc.edge_ids[k];
                    let src = self.get_source_vertex(e).map_err(|e| e.to_string())?;
                    if src != csc.row_indices[k]
                        || self.column_indices[e] != dst
                        || self.values[e].to_bits() != csc.values[k].to_bits()
                    {
                        return Err(format!("csc entry {k} disagrees with edge {e}"));
                    }
                }
            }
        }
        if let Some(p) = &self.partition {
            if p.len() != n {
                return Err("partition length differs from |V|".into());
            }
        }
        Ok(())
    }
}
