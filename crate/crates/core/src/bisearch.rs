//! Balanced bidirectional same-cell search and the subsequent local reorder.
//!
//! After an edge `(u, v)` lands with both endpoints in the same cell and `v`
//! ordered before `u`, the only way a cycle can exist is along a path from
//! `v` back to `u` that never leaves the cell. The search grows a forward
//! frontier from `v` (following out-edges) and a backward frontier from `u`
//! (following in-edges) in strict alternation, always expanding the
//! position-wise minimum of the forward frontier and the maximum of the
//! backward frontier. A cycle is reported the moment one side touches the
//! other. Acyclicity is reported when a side runs out, or when the frontiers
//! *pass* each other: once every unexplored forward node sits after every
//! settled backward node (or symmetrically), no forward path can reach `u`
//! anymore.
//!
//! Alternation keeps the two settled sets within one node of each other, so
//! the work is quadratic in the smaller obstruction rather than linear in
//! the cell — the balance is what the whole-run accounting leans on.
//!
//! On an acyclic outcome the settled nodes are spliced back around the new
//! edge: settled backward nodes (which all reach `u`) are packed, in their
//! existing relative order, immediately before `v`'s block, and settled
//! forward nodes immediately after — producing `…, b₁, …, u, v, …, f₁, …`
//! with every other node untouched.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::graph_core::{Graph, NodeId};
use crate::levels::LevelIndex;
use crate::order_list::{OrderHandle, OrderList, PositionKey};
use crate::OrderItem;

/// Outcome of one insertion's search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// No cycle through the new edge; the order has been (or can be)
    /// repaired locally.
    Acyclic,
    /// The new edge closes a cycle.
    Cycle,
}

/// What ended the search. Named for the event, not for any case numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminator {
    /// The forward frontier emptied: nothing reachable from `v` is left.
    ForwardExhausted,
    /// The backward frontier emptied: nothing reaching `u` is left.
    BackwardExhausted,
    /// A forward expansion stepped onto a settled or frontier backward node.
    MetForward,
    /// A backward expansion stepped onto a settled or frontier forward node.
    MetBackward,
    /// Every unexplored forward node now sits after every settled backward
    /// node, so no remaining forward path can reach `u`.
    ForwardFrontierPassed,
    /// Every unexplored backward node now sits before every settled forward
    /// node; symmetric to [`Terminator::ForwardFrontierPassed`].
    BackwardFrontierPassed,
}

impl Terminator {
    /// Short stable token for CSV output.
    pub fn token(self) -> &'static str {
        match self {
            Terminator::ForwardExhausted => "fwd_exhausted",
            Terminator::BackwardExhausted => "bwd_exhausted",
            Terminator::MetForward => "met_fwd",
            Terminator::MetBackward => "met_bwd",
            Terminator::ForwardFrontierPassed => "fwd_passed",
            Terminator::BackwardFrontierPassed => "bwd_passed",
        }
    }
}

/// Search tuning and instrumentation switches.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Check balance, disjointness, and separation invariants after every
    /// expansion (quadratic; test builds only).
    pub debug_checks: bool,
    /// Track parent pointers so a detected cycle can be reported as an
    /// explicit node path.
    pub record_parents: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            debug_checks: false,
            record_parents: false,
        }
    }
}

/// Everything the search learned, enough to drive the reorder and the
/// metrics without re-deriving anything.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    pub terminator: Terminator,
    /// Settled forward nodes, `v` included — the insertion's size class.
    pub t: u64,
    /// Total frontier pops plus edge scans.
    pub explored: u64,
    /// Settled forward nodes in settling order (`v` first).
    pub fwd_settled: Vec<NodeId>,
    /// Settled backward nodes in settling order (`u` first).
    pub bwd_settled: Vec<NodeId>,
    /// For a cycle: the edge that connected the two searches, as
    /// `(from, to)` in graph direction.
    pub meeting: Option<(NodeId, NodeId)>,
    /// For a cycle, when parent recording was on: the full path
    /// `v, …, u` whose closure by `(u, v)` is the cycle.
    pub cycle_path: Option<Vec<NodeId>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mark {
    FwdFrontier,
    FwdSettled,
    BwdFrontier,
    BwdSettled,
}

struct SearchState<'a> {
    order: &'a OrderList<OrderItem>,
    handles: &'a [OrderHandle],
    levels: &'a [LevelIndex],
    cell: LevelIndex,
    marks: HashMap<NodeId, Mark>,
    /// Forward frontier keyed ascending; lazy deletion is unnecessary
    /// because each node is pushed exactly once.
    fwd_frontier: BinaryHeap<Reverse<(PositionKey, NodeId)>>,
    bwd_frontier: BinaryHeap<(PositionKey, NodeId)>,
    fwd_settled: Vec<NodeId>,
    bwd_settled: Vec<NodeId>,
    /// Largest settled forward position, smallest settled backward position.
    max_fwd: Option<PositionKey>,
    min_bwd: Option<PositionKey>,
    parents: Option<HashMap<NodeId, NodeId>>,
    explored: u64,
}

impl<'a> SearchState<'a> {
    fn key(&self, x: NodeId) -> PositionKey {
        self.order
            .position_key(self.handles[x as usize])
            .expect("node handles are live")
    }

    fn check_invariants(&self) {
        for &x in &self.fwd_settled {
            assert_eq!(self.marks.get(&x), Some(&Mark::FwdSettled));
        }
        for &y in &self.bwd_settled {
            assert_eq!(self.marks.get(&y), Some(&Mark::BwdSettled));
        }
        let settled = self
            .marks
            .values()
            .filter(|&&m| m == Mark::FwdSettled || m == Mark::BwdSettled)
            .count();
        assert_eq!(
            settled,
            self.fwd_settled.len() + self.bwd_settled.len(),
            "each node is settled at most once and on one side only"
        );
        let fwd = self.fwd_settled.len() as i64;
        let bwd = self.bwd_settled.len() as i64;
        assert!(
            (fwd - bwd).abs() <= 1,
            "alternation keeps settled sides within one of each other \
             (fwd {fwd}, bwd {bwd})"
        );
        if let (Some(maxf), Some(minb)) = (self.max_fwd, self.min_bwd) {
            assert!(
                maxf < minb,
                "settled forward block stays strictly before settled backward block"
            );
        }
    }
}

/// Run the balanced bidirectional search for new edge `(u, v)`.
///
/// Preconditions (asserted in debug builds): `u != v`, both endpoints share
/// a cell, and `v` is currently ordered before `u`.
pub fn search(
    graph: &Graph,
    order: &OrderList<OrderItem>,
    handles: &[OrderHandle],
    levels: &[LevelIndex],
    u: NodeId,
    v: NodeId,
    opts: SearchOptions,
) -> SearchOutcome {
    debug_assert_ne!(u, v);
    debug_assert_eq!(levels[u as usize], levels[v as usize]);
    let mut st = SearchState {
        order,
        handles,
        levels,
        cell: levels[u as usize],
        marks: HashMap::new(),
        fwd_frontier: BinaryHeap::new(),
        bwd_frontier: BinaryHeap::new(),
        fwd_settled: Vec::new(),
        bwd_settled: Vec::new(),
        max_fwd: None,
        min_bwd: None,
        parents: if opts.record_parents {
            Some(HashMap::new())
        } else {
            None
        },
        explored: 0,
    };
    debug_assert!(
        order
            .compare(handles[v as usize], handles[u as usize])
            .expect("node handles are live"),
        "search only runs when v precedes u"
    );
    st.marks.insert(v, Mark::FwdFrontier);
    st.fwd_frontier.push(Reverse((st.key(v), v)));
    st.marks.insert(u, Mark::BwdFrontier);
    st.bwd_frontier.push((st.key(u), u));

    loop {
        // Forward step: give up, pass, meet, or settle the minimum.
        let Some(&Reverse((fmin, _))) = st.fwd_frontier.peek() else {
            return finish(st, Verdict::Acyclic, Terminator::ForwardExhausted, None);
        };
        if let Some(minb) = st.min_bwd {
            if fmin > minb {
                return finish(st, Verdict::Acyclic, Terminator::ForwardFrontierPassed, None);
            }
        }
        let Reverse((_, x)) = st.fwd_frontier.pop().expect("peeked above");
        st.marks.insert(x, Mark::FwdSettled);
        st.fwd_settled.push(x);
        let kx = st.key(x);
        if st.max_fwd.is_none_or(|m| kx > m) {
            st.max_fwd = Some(kx);
        }
        st.explored += 1;
        for &y in graph.out_neighbors(x) {
            st.explored += 1;
            if st.levels[y as usize] != st.cell {
                continue;
            }
            match st.marks.entry(y) {
                Entry::Occupied(e) => {
                    let m = *e.get();
                    if m == Mark::BwdFrontier || m == Mark::BwdSettled {
                        if let Some(p) = st.parents.as_mut() {
                            p.entry(y).or_insert(x);
                        }
                        return finish(st, Verdict::Cycle, Terminator::MetForward, Some((x, y)));
                    }
                }
                Entry::Vacant(e) => {
                    e.insert(Mark::FwdFrontier);
                    if let Some(p) = st.parents.as_mut() {
                        p.insert(y, x);
                    }
                    st.fwd_frontier.push(Reverse((st.key(y), y)));
                }
            }
        }
        if opts.debug_checks {
            st.check_invariants();
        }

        // Backward step, mirror image.
        let Some(&(bmax, _)) = st.bwd_frontier.peek() else {
            return finish(st, Verdict::Acyclic, Terminator::BackwardExhausted, None);
        };
        if let Some(maxf) = st.max_fwd {
            if bmax < maxf {
                return finish(st, Verdict::Acyclic, Terminator::BackwardFrontierPassed, None);
            }
        }
        let (_, y) = st.bwd_frontier.pop().expect("peeked above");
        st.marks.insert(y, Mark::BwdSettled);
        st.bwd_settled.push(y);
        let ky = st.key(y);
        if st.min_bwd.is_none_or(|m| ky < m) {
            st.min_bwd = Some(ky);
        }
        st.explored += 1;
        for &x in graph.in_neighbors(y) {
            st.explored += 1;
            if st.levels[x as usize] != st.cell {
                continue;
            }
            match st.marks.entry(x) {
                Entry::Occupied(e) => {
                    let m = *e.get();
                    if m == Mark::FwdFrontier || m == Mark::FwdSettled {
                        if let Some(p) = st.parents.as_mut() {
                            p.entry(x).or_insert(y);
                        }
                        return finish(st, Verdict::Cycle, Terminator::MetBackward, Some((x, y)));
                    }
                }
                Entry::Vacant(e) => {
                    e.insert(Mark::BwdFrontier);
                    if let Some(p) = st.parents.as_mut() {
                        p.insert(x, y);
                    }
                    st.bwd_frontier.push((st.key(x), x));
                }
            }
        }
        if opts.debug_checks {
            st.check_invariants();
        }
    }
}

fn finish(
    st: SearchState<'_>,
    verdict: Verdict,
    terminator: Terminator,
    meeting: Option<(NodeId, NodeId)>,
) -> SearchOutcome {
    let cycle_path = match (verdict, meeting, st.parents.as_ref()) {
        (Verdict::Cycle, Some((a, b)), Some(parents)) => {
            Some(assemble_path(parents, &st, a, b))
        }
        _ => None,
    };
    SearchOutcome {
        verdict,
        terminator,
        t: st.fwd_settled.len() as u64,
        explored: st.explored,
        fwd_settled: st.fwd_settled,
        bwd_settled: st.bwd_settled,
        meeting,
        cycle_path,
    }
}

/// Reconstruct `v, …, u` from the two parent maps joined at the meeting
/// edge `(a, b)`: `a` was reached forward from `v`, `b` backward from `u`
/// (or `a == v`, `b == u` themselves).
fn assemble_path(
    parents: &HashMap<NodeId, NodeId>,
    st: &SearchState<'_>,
    a: NodeId,
    b: NodeId,
) -> Vec<NodeId> {
    let v = st.fwd_settled.first().copied().unwrap_or(a);
    let u = st.bwd_settled.first().copied().unwrap_or(b);
    // Walk a back to v through forward parents.
    let mut front = vec![a];
    let mut cur = a;
    while cur != v {
        cur = parents[&cur];
        front.push(cur);
    }
    front.reverse();
    // Walk b forward to u through backward parents.
    let mut back = vec![b];
    let mut cur = b;
    while cur != u {
        cur = parents[&cur];
        back.push(cur);
    }
    front.extend(back);
    front
}

/// Splice the settled nodes back around the new edge after an acyclic
/// verdict, and return the number of repositioned nodes.
///
/// The target layout is `b₁ … b_q, u, v, f₁ … f_p` occupying a contiguous
/// stretch, where `b₁ … b_q, u` are the settled backward nodes in their
/// current relative order and `v, f₁ … f_p` the settled forward ones. Which
/// block anchors in place depends on how the search ended: when the
/// backward side finished (emptied or passed), the forward block keeps its
/// last element fixed and everything packs leftward onto it; when the
/// forward side finished, the backward block keeps its first element fixed
/// and everything packs rightward.
pub fn reorder(
    order: &mut OrderList<OrderItem>,
    handles: &[OrderHandle],
    outcome: &SearchOutcome,
    u: NodeId,
    v: NodeId,
) -> u64 {
    debug_assert_eq!(outcome.verdict, Verdict::Acyclic);
    let mut fwd = outcome.fwd_settled.clone();
    let mut bwd = outcome.bwd_settled.clone();
    // Snapshot position keys once; every move below only tightens the block
    // inward, and the snapshot is only used for this initial sort.
    let sort_key = |xs: &mut Vec<NodeId>| {
        xs.sort_by_key(|&x| {
            order
                .position_key(handles[x as usize])
                .expect("node handles are live")
        });
    };
    sort_key(&mut fwd);
    sort_key(&mut bwd);
    debug_assert_eq!(fwd.first(), Some(&v), "v is the forward minimum");
    debug_assert_eq!(bwd.last(), Some(&u), "u is the backward maximum");

    let mut placed = 0u64;
    match outcome.terminator {
        Terminator::BackwardExhausted | Terminator::BackwardFrontierPassed => {
            // Forward block compacts onto its last element, right to left.
            let mut anchor = handles[*fwd.last().expect("v is always settled") as usize];
            for &x in fwd[..fwd.len() - 1].iter().rev() {
                order
                    .move_before(anchor, handles[x as usize])
                    .expect("node handles are live");
                anchor = handles[x as usize];
                placed += 1;
            }
            // Backward block packs immediately before v, right to left.
            let mut before = handles[v as usize];
            for &y in bwd.iter().rev() {
                order
                    .move_before(before, handles[y as usize])
                    .expect("node handles are live");
                before = handles[y as usize];
                placed += 1;
            }
        }
        Terminator::ForwardExhausted | Terminator::ForwardFrontierPassed => {
            // Backward block compacts onto its first element, left to right.
            let mut anchor = handles[bwd[0] as usize];
            for &y in &bwd[1..] {
                order
                    .move_after(anchor, handles[y as usize])
                    .expect("node handles are live");
                anchor = handles[y as usize];
                placed += 1;
            }
            // Forward block packs immediately after u, left to right.
            let mut after = handles[u as usize];
            for &x in &fwd {
                order
                    .move_after(after, handles[x as usize])
                    .expect("node handles are live");
                after = handles[x as usize];
                placed += 1;
            }
        }
        Terminator::MetForward | Terminator::MetBackward => {
            unreachable!("reorder is only called on acyclic outcomes")
        }
    }
    placed
}

/// One-sided variant driven purely from `v`: expand the forward frontier in
/// position order until it empties, passes `u`'s position, or reaches `u`.
/// Used by the comparison strategy that skips backward search entirely.
pub fn search_forward_only(
    graph: &Graph,
    order: &OrderList<OrderItem>,
    handles: &[OrderHandle],
    levels: &[LevelIndex],
    u: NodeId,
    v: NodeId,
    opts: SearchOptions,
) -> SearchOutcome {
    debug_assert_ne!(u, v);
    let cell = levels[u as usize];
    let key = |x: NodeId| -> PositionKey {
        order
            .position_key(handles[x as usize])
            .expect("node handles are live")
    };
    let ku = key(u);
    let mut frontier: BinaryHeap<Reverse<(PositionKey, NodeId)>> = BinaryHeap::new();
    let mut seen: HashSet<NodeId> = HashSet::new();
    let mut parents: Option<HashMap<NodeId, NodeId>> = if opts.record_parents {
        Some(HashMap::new())
    } else {
        None
    };
    let mut settled = Vec::new();
    let mut explored = 0u64;
    seen.insert(v);
    frontier.push(Reverse((key(v), v)));

    loop {
        let Some(&Reverse((fmin, _))) = frontier.peek() else {
            return SearchOutcome {
                verdict: Verdict::Acyclic,
                terminator: Terminator::ForwardExhausted,
                t: settled.len() as u64,
                explored,
                fwd_settled: settled,
                bwd_settled: vec![u],
                meeting: None,
                cycle_path: None,
            };
        };
        if fmin > ku {
            return SearchOutcome {
                verdict: Verdict::Acyclic,
                terminator: Terminator::ForwardFrontierPassed,
                t: settled.len() as u64,
                explored,
                fwd_settled: settled,
                bwd_settled: vec![u],
                meeting: None,
                cycle_path: None,
            };
        }
        let Reverse((_, x)) = frontier.pop().expect("peeked above");
        settled.push(x);
        explored += 1;
        for &y in graph.out_neighbors(x) {
            explored += 1;
            if levels[y as usize] != cell {
                continue;
            }
            if y == u {
                let cycle_path = parents.as_ref().map(|p| {
                    let mut path = vec![x];
                    let mut cur = x;
                    while cur != v {
                        cur = p[&cur];
                        path.push(cur);
                    }
                    path.reverse();
                    path.push(u);
                    path
                });
                return SearchOutcome {
                    verdict: Verdict::Cycle,
                    terminator: Terminator::MetForward,
                    t: settled.len() as u64,
                    explored,
                    fwd_settled: settled,
                    bwd_settled: vec![u],
                    meeting: Some((x, y)),
                    cycle_path,
                };
            }
            if seen.insert(y) {
                if let Some(p) = parents.as_mut() {
                    p.insert(y, x);
                }
                frontier.push(Reverse((key(y), y)));
            }
        }
    }
}

/// Reorder for the one-sided strategy: settled forward nodes move, in their
/// current relative order, to immediately after `u` (so `v` lands right
/// after `u` and its settled successors follow).
pub fn reorder_forward_only(
    order: &mut OrderList<OrderItem>,
    handles: &[OrderHandle],
    outcome: &SearchOutcome,
    u: NodeId,
    v: NodeId,
) -> u64 {
    debug_assert_eq!(outcome.verdict, Verdict::Acyclic);
    let mut fwd = outcome.fwd_settled.clone();
    fwd.sort_by_key(|&x| {
        order
            .position_key(handles[x as usize])
            .expect("node handles are live")
    });
    debug_assert_eq!(fwd.first(), Some(&v));
    let mut after = handles[u as usize];
    let mut placed = 0u64;
    for &x in &fwd {
        order
            .move_after(after, handles[x as usize])
            .expect("node handles are live");
        after = handles[x as usize];
        placed += 1;
    }
    placed
}
