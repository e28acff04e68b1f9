//! Incremental cycle detection and topological order maintenance for
//! directed graphs under streaming edge insertions.
//!
//! The engine answers, after every inserted edge, whether the graph is
//! still acyclic — and while it is, maintains a total order of the nodes in
//! which every edge points forward. Both answers stay cheap because most
//! insertions never trigger a search: a randomized partition of the nodes
//! (by how many of a small sampled set reach / are reached by each node)
//! confines any possible cycle to a single partition cell, and a balanced
//! bidirectional search inside that cell settles the rest.
//!
//! # Architecture
//!
//! - [`order_list`]: the order-maintenance list — O(1) amortized ordered
//!   insertion, relocation, and comparison via two-level integer labels.
//! - [`levels`]: the sampled partition — per-sample reachability, cell
//!   coordinates, and the relocation pass that keeps cells contiguous in
//!   the order list.
//! - [`bisearch`]: the balanced bidirectional same-cell search and the
//!   local reorder that repairs the order after an accepted backward edge.
//! - [`engine`]: the public incremental API orchestrating the phases.
//! - [`graph_core`]: adjacency storage and the degree-splitting transform
//!   that bounds per-node degree in benchmark traces.
//! - [`trace`]: the line-oriented insertion-trace file format.
//! - [`oracle`]: brute-force reference implementations (static cycle
//!   check, topological validity, reachability closures) used as ground
//!   truth by the test and verification harnesses.
//!
//! # Example
//!
//! ```
//! use inctopo_core::{Engine, EngineConfig, InsertVerdict};
//!
//! let mut eng = Engine::new(EngineConfig::new(4)).unwrap();
//! for (u, v) in [(0, 1), (1, 2), (0, 3), (3, 2)] {
//!     assert_eq!(eng.insert_edge(u, v).unwrap().verdict, InsertVerdict::Acyclic);
//! }
//! // Every edge points forward in the maintained order.
//! let order = eng.current_order().unwrap();
//! let pos = |x: u32| order.iter().position(|&y| y == x).unwrap();
//! assert!(pos(0) < pos(1) && pos(1) < pos(2) && pos(3) < pos(2));
//! ```

pub mod bisearch;
pub mod engine;
pub mod graph_core;
pub mod levels;
pub mod oracle;
pub mod order_list;
pub mod trace;

pub use bisearch::{SearchOptions, SearchOutcome, Terminator, Verdict};
pub use engine::{
    CycleInfo, Engine, EngineConfig, EngineError, InsertResult, InsertVerdict, InsertionRow,
    Metrics, SearchStrategy,
};
pub use graph_core::{
    degree_split_trace, degree_split_trace_mapped, AddEdge, Graph, NodeId, NodeRangeError,
    SplitTrace,
};
pub use levels::{precedes_star, LevelIndex, LevelsError, OrderItem, Partition, SampleSet};
pub use order_list::{OrderError, OrderHandle, OrderList, PositionKey};
pub use trace::{Trace, TraceError};
