//! The naive baseline: a full static topological sort after every
//! insertion.
//!
//! Exists purely as a cost yardstick — its verdict sequence must match the
//! incremental engine's exactly, while its total work is quadratic in the
//! trace length. Work-phase columns are reported as zero because the
//! baseline has no phases; wall time is the honest number.

use std::time::Instant;

use inctopo_core::oracle;
use inctopo_core::{InsertVerdict, InsertionRow, NodeId, Trace};

/// Outcome of replaying a trace through the naive baseline.
pub struct NaiveRun {
    /// 1-based index of the first insertion whose prefix is cyclic.
    pub first_cycle: Option<u64>,
    /// One row per insertion, phases zeroed, wall clock measured.
    pub rows: Vec<InsertionRow>,
    /// A topological order of the final graph when it stayed acyclic.
    pub final_order: Option<Vec<NodeId>>,
}

/// Re-sort from scratch after every insertion; sticky after the first
/// cyclic prefix like the engine.
pub fn run(trace: &Trace) -> NaiveRun {
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(trace.events.len());
    let mut first_cycle = None;
    let mut rows = Vec::with_capacity(trace.events.len());
    let mut final_order = None;

    for (k, &(u, v)) in trace.events.iter().enumerate() {
        let idx = (k + 1) as u64;
        let started = Instant::now();
        let verdict = if first_cycle.is_some() {
            InsertVerdict::CycleDetected
        } else {
            edges.push((u, v));
            match oracle::static_topo_order(trace.n, &edges) {
                Some(order) => {
                    final_order = Some(order);
                    InsertVerdict::Acyclic
                }
                None => {
                    first_cycle = Some(idx);
                    final_order = None;
                    InsertVerdict::CycleDetected
                }
            }
        };
        rows.push(InsertionRow {
            idx,
            u,
            v,
            verdict,
            terminator: None,
            t: 0,
            phase1_work: 0,
            phase2_moves: 0,
            phase3_explored: 0,
            phase4_placed: 0,
            nanos: started.elapsed().as_nanos() as u64,
        });
    }
    NaiveRun {
        first_cycle,
        rows,
        final_order,
    }
}
