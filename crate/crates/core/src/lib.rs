//! Frontier-based parallel graph analytics.
//!
//! A computation is assembled from four pieces:
//!
//! - a [`Graph`] in CSR form, with a CSC transpose for pull traversals;
//! - a [`Frontier`] of active vertices, stored as a sparse list, a dense
//!   bitmap, or a concurrent message queue;
//! - operators such as [`neighbors_expand`], each taking an
//!   [`ExecutionPolicy`] that selects sequential, bulk-synchronous
//!   parallel, or asynchronous execution;
//! - a loop that applies operators until a convergence condition holds,
//!   as in [`sssp`] and [`bfs`].
//!
//! ```
//! use native_graph::{sssp, Direction, ExecutionPolicy, Graph, Representation, SsspConfig};
//!
//! let g = Graph::from_edges(&[(0, 1, 1.0), (0, 2, 4.0), (1, 2, 2.0)], 3).unwrap();
//! let cfg = SsspConfig::new(ExecutionPolicy::par(4), Direction::Push, Representation::Sparse);
//! let paths = sssp(&g, 0, &cfg).unwrap();
//! assert_eq!(paths.dist, vec![0.0, 1.0, 3.0]);
//! ```

pub mod algorithms;
pub mod frontier;
pub mod graph;
pub mod io;
pub mod operators;

pub use algorithms::{
    atomic_min, bfs, check_predecessor_tree, reference_dijkstra, sssp, AlgorithmError,
    AtomicWeight, BfsResult, Direction, DistanceMap, PredecessorMap, RunStats, ShortestPaths,
    SsspConfig, UNREACHABLE,
};
pub use frontier::{Frontier, FrontierError, FrontierKind, Representation};
pub use graph::{EdgeId, EdgeRange, Graph, GraphError, VertexId, Weight};
pub use io::{
    parse_matrix_market, read_distances, write_distances, write_matrix_market, EdgeList,
    ParseError, ParseOptions,
};
pub use operators::{
    async_expand_loop, filter, neighbors_expand, neighbors_expand_pull, parallel_for_each_vertex,
    uniquify, ExecutionPolicy, Mode, OperatorError, PullScan,
};
