//! Directed-graph storage for streaming edge insertions, plus an offline
//! degree-splitting pass that rewrites a trace so no node exceeds a chosen
//! in- or out-degree cap.
//!
//! The store keeps both adjacency directions so forward and backward searches
//! iterate neighbors at equal cost, and it absorbs duplicate insertions:
//! re-inserting an existing edge cannot change reachability, so it must not
//! perturb any downstream accounting.

use std::collections::HashSet;

use thiserror::Error;

use crate::trace::Trace;

/// Dense node identity: a plain index below the graph's node count.
/// Nodes introduced by [`degree_split_trace`] get fresh indices above the
/// original range.
pub type NodeId = u32;

/// Outcome of an edge insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddEdge {
    /// The edge was new and is now stored in both adjacency directions.
    Added,
    /// The edge was already present; nothing changed.
    Duplicate,
}

/// A node id outside the graph's `0..n` range was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("node id {id} out of range for a graph with {n} nodes")]
pub struct NodeRangeError {
    pub id: NodeId,
    pub n: usize,
}

/// Directed multigraph under insertion-only updates.
///
/// Stores each distinct edge once, in both directions, with deterministic
/// neighbor order (insertion order) for a fixed insertion history.
#[derive(Debug, Clone)]
pub struct Graph {
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    edges: HashSet<(NodeId, NodeId)>,
}

impl Graph {
    /// Create an empty graph over nodes `0..n`.
    pub fn new(n: usize) -> Self {
        Graph {
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            edges: HashSet::new(),
        }
    }

    /// Node count.
    pub fn n(&self) -> usize {
        self.out_adj.len()
    }

    /// Count of distinct inserted edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// True if the edge `(u, v)` has been inserted.
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edges.contains(&(u, v))
    }

    /// Insert the edge `(u, v)`. Duplicates are absorbed without any state
    /// change. Self-loops are stored like any other edge; what a self-loop
    /// means for cyclicity is the caller's concern.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<AddEdge, NodeRangeError> {
        let n = self.n();
        for id in [u, v] {
            if id as usize >= n {
                return Err(NodeRangeError { id, n });
            }
        }
        if !self.edges.insert((u, v)) {
            return Ok(AddEdge::Duplicate);
        }
        self.out_adj[u as usize].push(v);
        self.in_adj[v as usize].push(u);
        Ok(AddEdge::Added)
    }

    /// Successors of `u`, in insertion order.
    ///
    /// # Panics
    /// Panics if `u` is out of range; neighbor iteration sits on hot paths,
    /// so range checking is the mutating API's job.
    pub fn out_neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.out_adj[u as usize]
    }

    /// Predecessors of `v`, in insertion order.
    ///
    /// # Panics
    /// Panics if `v` is out of range.
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_adj[v as usize]
    }

    /// All distinct edges, sorted, for oracle-style whole-graph checks.
    pub fn edges_sorted(&self) -> Vec<(NodeId, NodeId)> {
        let mut out: Vec<_> = self.edges.iter().copied().collect();
        out.sort_unstable();
        out
    }
}

/// A degree-split trace together with the prefix correspondence back to the
/// input trace.
#[derive(Debug, Clone)]
pub struct SplitTrace {
    /// The rewritten trace over the enlarged node set.
    pub trace: Trace,
    /// `group_end[k]` is the output prefix length that corresponds to the
    /// first `k + 1` input events: every input event expands to a contiguous
    /// run of output events ending at that offset.
    pub group_end: Vec<usize>,
}

/// Rewrite `input` so that every node's final in-degree and out-degree is at
/// most `cap`, returning only the rewritten trace.
///
/// See [`degree_split_trace_mapped`] for the variant that also reports the
/// input-to-output prefix correspondence.
pub fn degree_split_trace(input: &Trace, cap: usize) -> Trace {
    degree_split_trace_mapped(input, cap).trace
}

/// Rewrite `input` so that every node's final in-degree and out-degree is at
/// most `cap`, and report how input prefixes map to output prefixes.
///
/// Nodes whose total degree on one side stays within `cap` pass through
/// untouched. A node exceeding the cap on its out side is replaced, on that
/// side, by a chain of fresh relay nodes: each relay emits up to `cap - 1`
/// real arcs plus one arc extending the chain. The in side mirrors this with
/// relay chains pointing toward the original node. Relay arcs alone can never
/// close a cycle (every relay enters with one new arc), so the output prefix
/// ending at `group_end[k]` is cyclic exactly when the input prefix of length
/// `k + 1` is.
///
/// # Panics
/// Panics if `cap < 2`; one slot must always remain for a chain arc.
pub fn degree_split_trace_mapped(input: &Trace, cap: usize) -> SplitTrace {
    assert!(cap >= 2, "degree cap must be at least 2, got {cap}");
    let n = input.n;

    let mut tot_out = vec![0usize; n];
    let mut tot_in = vec![0usize; n];
    for &(u, v) in &input.events {
        tot_out[u as usize] += 1;
        tot_in[v as usize] += 1;
    }

    // Per original node and side: the relay currently accepting real arcs,
    // how many real arcs it has taken, and whether this side chains at all.
    let mut out_tail: Vec<NodeId> = (0..n as NodeId).collect();
    let mut in_tail: Vec<NodeId> = (0..n as NodeId).collect();
    let mut out_used = vec![0usize; n];
    let mut in_used = vec![0usize; n];
    let out_chained: Vec<bool> = tot_out.iter().map(|&d| d > cap).collect();
    let in_chained: Vec<bool> = tot_in.iter().map(|&d| d > cap).collect();

    let mut next_id = n as NodeId;
    let mut events = Vec::with_capacity(input.events.len());
    let mut group_end = Vec::with_capacity(input.events.len());

    for &(u, v) in &input.events {
        let (ui, vi) = (u as usize, v as usize);
        if out_chained[ui] && out_used[ui] == cap - 1 {
            let relay = next_id;
            next_id += 1;
            events.push((out_tail[ui], relay));
            out_tail[ui] = relay;
            out_used[ui] = 0;
        }
        if in_chained[vi] && in_used[vi] == cap - 1 {
            let relay = next_id;
            next_id += 1;
            events.push((relay, in_tail[vi]));
            in_tail[vi] = relay;
            in_used[vi] = 0;
        }
        events.push((out_tail[ui], in_tail[vi]));
        out_used[ui] += 1;
        in_used[vi] += 1;
        group_end.push(events.len());
    }

    SplitTrace {
        trace: Trace {
            n: next_id as usize,
            events,
        },
        group_end,
    }
}
