//! Brute-force reference implementations used as ground truth in tests and
//! acceptance runs.
//!
//! Everything here favors clarity over speed: static graph scans, fresh
//! closures per query, no incremental state. These functions define what
//! "correct" means for the engine; they are only ever run at sizes where
//! quadratic or cubic cost is irrelevant.

use std::collections::HashSet;

use crate::graph_core::NodeId;
use crate::trace::Trace;

fn build_adj(n: usize, edges: &[(NodeId, NodeId)]) -> Vec<Vec<NodeId>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v);
    }
    adj
}

/// True iff the edge set contains a directed cycle. A self-loop counts.
///
/// Iterative three-color depth-first search; duplicate edges are harmless.
pub fn has_cycle(n: usize, edges: &[(NodeId, NodeId)]) -> bool {
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;

    let adj = build_adj(n, edges);
    let mut color = vec![WHITE; n];
    // Stack entries are (node, index of the next out-neighbor to examine).
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if color[start] != WHITE {
            continue;
        }
        color[start] = GRAY;
        stack.push((start, 0));
        while let Some(&mut (x, ref mut next)) = stack.last_mut() {
            if *next < adj[x].len() {
                let y = adj[x][*next] as usize;
                *next += 1;
                match color[y] {
                    GRAY => return true,
                    WHITE => {
                        color[y] = GRAY;
                        stack.push((y, 0));
                    }
                    _ => {}
                }
            } else {
                color[x] = BLACK;
                stack.pop();
            }
        }
    }
    false
}

/// The 1-based length of the shortest cyclic prefix of the trace, or `None`
/// if the full trace never becomes cyclic.
///
/// `Some(k)` means the first `k` events contain a cycle and the first `k - 1`
/// do not.
pub fn first_cycle_index(trace: &Trace) -> Option<usize> {
    for k in 1..=trace.events.len() {
        if has_cycle(trace.n, &trace.events[..k]) {
            return Some(k);
        }
    }
    None
}

/// True iff `order` is a permutation of `0..order.len()` and every edge goes
/// left-to-right in it. A sequence that is not a permutation of the node set
/// is never a valid order.
pub fn is_valid_topo(order: &[NodeId], edges: &[(NodeId, NodeId)]) -> bool {
    let n = order.len();
    let mut pos = vec![usize::MAX; n];
    for (p, &x) in order.iter().enumerate() {
        let xi = x as usize;
        if xi >= n || pos[xi] != usize::MAX {
            return false;
        }
        pos[xi] = p;
    }
    edges.iter().all(|&(u, v)| {
        (u as usize) < n && (v as usize) < n && pos[u as usize] < pos[v as usize]
    })
}

/// A topological order of the edge set, or `None` exactly when it is cyclic.
///
/// Kahn peeling with a FIFO frontier; deterministic for a fixed edge list.
pub fn static_topo_order(n: usize, edges: &[(NodeId, NodeId)]) -> Option<Vec<NodeId>> {
    let mut distinct = HashSet::new();
    let mut adj = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(u, v) in edges {
        if distinct.insert((u, v)) {
            adj[u as usize].push(v);
            indeg[v as usize] += 1;
        }
    }

    let mut frontier: std::collections::VecDeque<NodeId> =
        (0..n as NodeId).filter(|&x| indeg[x as usize] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = frontier.pop_front() {
        order.push(x);
        for &y in &adj[x as usize] {
            indeg[y as usize] -= 1;
            if indeg[y as usize] == 0 {
                frontier.push_back(y);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Nodes reachable from `src` (including `src` itself) as a membership mask.
pub fn descendants(n: usize, edges: &[(NodeId, NodeId)], src: NodeId) -> Vec<bool> {
    let adj = build_adj(n, edges);
    let mut seen = vec![false; n];
    let mut stack = vec![src as usize];
    seen[src as usize] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y as usize] {
                seen[y as usize] = true;
                stack.push(y as usize);
            }
        }
    }
    seen
}

/// Nodes that reach `dst` (including `dst` itself) as a membership mask.
pub fn ancestors(n: usize, edges: &[(NodeId, NodeId)], dst: NodeId) -> Vec<bool> {
    let reversed: Vec<(NodeId, NodeId)> = edges.iter().map(|&(u, v)| (v, u)).collect();
    descendants(n, &reversed, dst)
}

/// All ordered pairs `(x, y)` with `x != y`, a path from `x` to `y`, at most
/// `tau` ancestors of `y` that are not ancestors of `x`, and at most `tau`
/// descendants of `x` that are not descendants of `y`. Sorted for
/// deterministic comparison.
///
/// Ancestor and descendant sets include the node itself, matching the
/// convention under which a node on a cycle shares closures with every other
/// node on that cycle.
pub fn tau_related_pairs(
    n: usize,
    edges: &[(NodeId, NodeId)],
    tau: usize,
) -> Vec<(NodeId, NodeId)> {
    // desc[x][z] = z is reachable from x. Ancestor masks fall out of the
    // same matrix transposed: x is an ancestor of y iff desc[x][y].
    let desc: Vec<Vec<bool>> = (0..n as NodeId).map(|x| descendants(n, edges, x)).collect();

    let mut pairs = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x == y || !desc[x][y] {
                continue;
            }
            // |A(y) \ A(x)|: nodes reaching y but not x.
            let extra_anc = (0..n).filter(|&z| desc[z][y] && !desc[z][x]).count();
            if extra_anc > tau {
                continue;
            }
            // |D(x) \ D(y)|: nodes reachable from x but not from y.
            let extra_desc = (0..n).filter(|&z| desc[x][z] && !desc[y][z]).count();
            if extra_desc > tau {
                continue;
            }
            pairs.push((x as NodeId, y as NodeId));
        }
    }
    pairs
}

/// Size of the union, over all prefixes of the trace, of
/// [`tau_related_pairs`] evaluated on that prefix.
pub fn sometime_tau_related_count(trace: &Trace, tau: usize) -> usize {
    let mut union: HashSet<(NodeId, NodeId)> = HashSet::new();
    for k in 1..=trace.events.len() {
        union.extend(tau_related_pairs(trace.n, &trace.events[..k], tau));
    }
    union.len()
}
