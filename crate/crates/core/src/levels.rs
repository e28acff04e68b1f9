//! Sampled-reachability level partition.
//!
//! A fixed random subset `S` of nodes is drawn once per run. Each node `x` is
//! classified by the pair `(i, j)` where `i` counts the sampled ancestors of
//! `x` and `j` its sampled descendants; the set of nodes sharing a pair forms
//! a *cell*. Cells carry a total order: fewer sampled ancestors first, ties
//! broken toward more sampled descendants. While the graph stays acyclic,
//! every edge crossing between two cells agrees with that cell order, so a
//! cycle can only ever close among nodes of a single cell — this is what lets
//! the per-insertion search stay inside one cell.
//!
//! The partition also owns the per-insertion maintenance: phase one updates
//! single-source reachability for every sampled node by frontier expansion
//! (each node and edge is charged at most once per sampled source per
//! direction over a whole run), and phase two relocates every node whose pair
//! changed into its new cell's bracket of dummy positions in the order list.
//! Each relocation only ever lands a node immediately inside its destination
//! cell's boundary, so relative order among nodes that do not move is
//! untouched.

use std::collections::BTreeMap;
use std::ops::Bound;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph_core::{Graph, NodeId};
use crate::order_list::{OrderHandle, OrderList};

/// Payload stored in the maintained order list: a real graph node, or one of
/// the two dummy positions bracketing a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderItem {
    /// A graph node.
    Node(NodeId),
    /// A cell boundary; never reported in node orders.
    Dummy,
}

/// Errors from partition construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LevelsError {
    /// The grouping parameter must satisfy `1 <= tau <= n`.
    #[error("grouping parameter {tau} outside [1, {n}]")]
    TauOutOfRange { tau: usize, n: usize },
}

/// The fixed sampled node set `S`.
///
/// Membership is drawn once, before any edge arrives, and never changes.
#[derive(Debug, Clone)]
pub struct SampleSet {
    members: Vec<bool>,
    list: Vec<NodeId>,
    /// Per-node inclusion probability used to draw the set; `NaN` for sets
    /// built from an explicit member list.
    pub p: f64,
    /// Seed the set was drawn from; 0 for explicit member lists.
    pub seed: u64,
}

impl SampleSet {
    /// Draw each of the `n` nodes independently with probability
    /// `min(1, c * ln(n) / tau)`, deterministically in `seed`.
    pub fn draw(n: usize, tau: usize, c: f64, seed: u64) -> Result<Self, LevelsError> {
        if tau < 1 || tau > n {
            return Err(LevelsError::TauOutOfRange { tau, n });
        }
        let p = (c * (n as f64).ln() / tau as f64).min(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut members = vec![false; n];
        let mut list = Vec::new();
        for x in 0..n {
            if rng.random::<f64>() < p {
                members[x] = true;
                list.push(x as NodeId);
            }
        }
        Ok(SampleSet {
            members,
            list,
            p,
            seed,
        })
    }

    /// Build a set with exactly the given members. Deterministic test and
    /// diagnostics plumbing; the probabilistic guarantees obviously do not
    /// apply to hand-picked sets.
    pub fn from_members(n: usize, members: impl IntoIterator<Item = NodeId>) -> Self {
        let mut mask = vec![false; n];
        for x in members {
            assert!((x as usize) < n, "sample member {x} out of range for n = {n}");
            mask[x as usize] = true;
        }
        let list = (0..n as NodeId).filter(|&x| mask[x as usize]).collect();
        SampleSet {
            members: mask,
            list,
            p: f64::NAN,
            seed: 0,
        }
    }

    /// True if `x` was sampled.
    pub fn contains(&self, x: NodeId) -> bool {
        self.members[x as usize]
    }

    /// Number of sampled nodes.
    pub fn len(&self) -> usize {
        self.list.len()
    }

    /// True if no node was sampled.
    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    /// Sampled nodes in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.list.iter().copied()
    }
}

/// A node's cell coordinates: `i` sampled ancestors, `j` sampled descendants.
///
/// Both counts include the node itself when it is sampled, so sampled nodes
/// never sit below `(1, 1)`. Counts only grow over a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LevelIndex {
    /// Number of sampled ancestors, the node itself included if sampled.
    pub i: u32,
    /// Number of sampled descendants, likewise.
    pub j: u32,
}

/// The total order on cells: true iff cell `a` comes strictly before cell
/// `b` — fewer sampled ancestors first, ties broken toward more sampled
/// descendants. Irreflexive.
pub fn precedes_star(a: LevelIndex, b: LevelIndex) -> bool {
    a.i < b.i || (a.i == b.i && a.j > b.j)
}

/// Key wrapper ordering cells by [`precedes_star`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CellKey(LevelIndex);

impl Ord for CellKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .i
            .cmp(&other.0.i)
            .then_with(|| other.0.j.cmp(&self.0.j))
    }
}

impl PartialOrd for CellKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// One node's cell change in a single insertion: recorded once, with the
/// final destination even if the counts stepped several times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveRecord {
    pub node: NodeId,
    pub from: LevelIndex,
    pub to: LevelIndex,
}

struct CellDummies {
    first: OrderHandle,
    last: OrderHandle,
}

/// The partition state: sampled set, per-source reachability, per-node cell
/// coordinates, and the materialized cells' dummy positions.
pub struct Partition {
    samples: SampleSet,
    /// Per sampled source: which nodes it reaches. Grows monotonically.
    desc: Vec<Vec<bool>>,
    /// Per sampled source: which nodes reach it. Grows monotonically.
    anc: Vec<Vec<bool>>,
    /// Per node: count of sampled ancestors (the `i` coordinate).
    anc_count: Vec<u32>,
    /// Per node: count of sampled descendants (the `j` coordinate).
    desc_count: Vec<u32>,
    levels: Vec<LevelIndex>,
    /// Materialized cells in cell order; cells are created on first
    /// occupancy and never destroyed.
    cells: BTreeMap<CellKey, CellDummies>,
    /// Scratch: nodes touched by the current phase-one pass.
    touched: Vec<NodeId>,
    touched_mark: Vec<bool>,
    init_moves: u64,
}

impl Partition {
    /// Build the partition over `n` nodes, seed the (empty) order list with
    /// the base cell's dummies and all real nodes inside them, and move the
    /// sampled nodes into their self-reachability cell.
    ///
    /// Returns the partition and one order-list handle per node; the handles
    /// stay valid for the engine's lifetime because relocations preserve
    /// them.
    pub fn new(
        n: usize,
        samples: SampleSet,
        order: &mut OrderList<OrderItem>,
    ) -> (Self, Vec<OrderHandle>) {
        assert!(order.is_empty(), "partition must seed a fresh order list");
        let base = LevelIndex { i: 0, j: 0 };
        let first = order.insert_first(OrderItem::Dummy);
        let last = order
            .insert_after(first, OrderItem::Dummy)
            .expect("dummy handle is live");
        let mut cells = BTreeMap::new();
        cells.insert(CellKey(base), CellDummies { first, last });

        let mut handles = Vec::with_capacity(n);
        for x in 0..n as NodeId {
            let h = order
                .insert_before(last, OrderItem::Node(x))
                .expect("dummy handle is live");
            handles.push(h);
        }

        let k = samples.len();
        let mut part = Partition {
            desc: vec![vec![false; n]; k],
            anc: vec![vec![false; n]; k],
            anc_count: vec![0; n],
            desc_count: vec![0; n],
            levels: vec![base; n],
            cells,
            touched: Vec::new(),
            touched_mark: vec![false; n],
            init_moves: 0,
            samples,
        };

        // Every sampled node reaches itself in both directions, so it starts
        // in cell (1, 1) rather than the base cell.
        let mut moves = Vec::with_capacity(k);
        for (idx, s) in part.samples.list.clone().into_iter().enumerate() {
            part.desc[idx][s as usize] = true;
            part.anc[idx][s as usize] = true;
            part.anc_count[s as usize] = 1;
            part.desc_count[s as usize] = 1;
            let to = LevelIndex { i: 1, j: 1 };
            part.levels[s as usize] = to;
            moves.push(MoveRecord {
                node: s,
                from: base,
                to,
            });
        }
        part.init_moves = part.apply_moves(order, &handles, &moves);
        (part, handles)
    }

    /// The sampled set.
    pub fn samples(&self) -> &SampleSet {
        &self.samples
    }

    /// The node's current cell coordinates.
    pub fn level_of(&self, x: NodeId) -> LevelIndex {
        self.levels[x as usize]
    }

    /// All nodes' current cell coordinates, indexed by node id.
    pub fn levels(&self) -> &[LevelIndex] {
        &self.levels
    }

    /// Relocations performed while seeding sampled nodes into their initial
    /// cell, before any edge arrived.
    pub fn init_moves(&self) -> u64 {
        self.init_moves
    }

    /// The dummy bracket of a materialized cell, for invariant checks.
    pub fn cell_bracket(&self, idx: LevelIndex) -> Option<(OrderHandle, OrderHandle)> {
        self.cells.get(&CellKey(idx)).map(|c| (c.first, c.last))
    }

    /// Phase one: the edge `(u, v)` was just added to `graph`. Re-establish
    /// every sampled source's reachability sets by frontier expansion and
    /// return the nodes whose cell coordinates changed (each once, with its
    /// final destination), plus the work performed (nodes marked plus edges
    /// scanned).
    pub fn phase1_update(
        &mut self,
        graph: &Graph,
        u: NodeId,
        v: NodeId,
    ) -> (Vec<MoveRecord>, u64) {
        let mut work = 0u64;
        let mut stack: Vec<NodeId> = Vec::new();

        for k in 0..self.samples.len() {
            // Forward: v just became reachable from source k through u.
            if self.desc[k][u as usize] && !self.desc[k][v as usize] {
                self.desc[k][v as usize] = true;
                self.anc_count[v as usize] += 1;
                self.touch(v);
                work += 1;
                stack.push(v);
                while let Some(x) = stack.pop() {
                    for &y in graph.out_neighbors(x) {
                        work += 1;
                        if !self.desc[k][y as usize] {
                            self.desc[k][y as usize] = true;
                            self.anc_count[y as usize] += 1;
                            self.touch(y);
                            stack.push(y);
                        }
                    }
                }
            }
            // Backward: u just started reaching source k through v.
            if self.anc[k][v as usize] && !self.anc[k][u as usize] {
                self.anc[k][u as usize] = true;
                self.desc_count[u as usize] += 1;
                self.touch(u);
                work += 1;
                stack.push(u);
                while let Some(x) = stack.pop() {
                    for &y in graph.in_neighbors(x) {
                        work += 1;
                        if !self.anc[k][y as usize] {
                            self.anc[k][y as usize] = true;
                            self.desc_count[y as usize] += 1;
                            self.touch(y);
                            stack.push(y);
                        }
                    }
                }
            }
        }

        let mut moves = Vec::with_capacity(self.touched.len());
        for &x in &self.touched {
            self.touched_mark[x as usize] = false;
            let from = self.levels[x as usize];
            let to = LevelIndex {
                i: self.anc_count[x as usize],
                j: self.desc_count[x as usize],
            };
            debug_assert_ne!(from, to, "touched nodes changed at least one count");
            self.levels[x as usize] = to;
            moves.push(MoveRecord { node: x, from, to });
        }
        self.touched.clear();
        (moves, work)
    }

    fn touch(&mut self, x: NodeId) {
        if !self.touched_mark[x as usize] {
            self.touched_mark[x as usize] = true;
            self.touched.push(x);
        }
    }

    /// Phase two: relocate every recorded node into its destination cell.
    /// Returns the number of relocations.
    ///
    /// Nodes entering a cell from an earlier cell are placed just inside the
    /// cell's first dummy (before all incumbents), latest-ordered first so
    /// the group keeps its relative order; nodes entering from a later cell
    /// are placed just inside the last dummy (after all incumbents),
    /// earliest-ordered first. All before-groups are applied, then all
    /// after-groups, each in cell order.
    pub fn phase2_apply(
        &mut self,
        order: &mut OrderList<OrderItem>,
        handles: &[OrderHandle],
        moves: &[MoveRecord],
    ) -> u64 {
        self.apply_moves(order, handles, moves)
    }

    fn apply_moves(
        &mut self,
        order: &mut OrderList<OrderItem>,
        handles: &[OrderHandle],
        moves: &[MoveRecord],
    ) -> u64 {
        let mut ups: BTreeMap<CellKey, Vec<NodeId>> = BTreeMap::new();
        let mut downs: BTreeMap<CellKey, Vec<NodeId>> = BTreeMap::new();
        for rec in moves {
            debug_assert!(
                precedes_star(rec.from, rec.to) || precedes_star(rec.to, rec.from),
                "a move must change the cell"
            );
            if precedes_star(rec.from, rec.to) {
                ups.entry(CellKey(rec.to)).or_default().push(rec.node);
            } else {
                downs.entry(CellKey(rec.to)).or_default().push(rec.node);
            }
        }

        let mut count = 0u64;
        for (key, mut group) in ups {
            self.materialize(key, order);
            // Sort by current position before any relocation in this group:
            // relabeling preserves relative order, so the snapshot stays
            // valid while the group is placed one node at a time.
            group.sort_by(|&a, &b| {
                let a_first = order
                    .compare(handles[a as usize], handles[b as usize])
                    .expect("node handles are live");
                if a_first {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            });
            let first = self.cells[&key].first;
            for &x in group.iter().rev() {
                order
                    .move_after(first, handles[x as usize])
                    .expect("cell dummies and node handles are live");
                count += 1;
            }
        }
        for (key, mut group) in downs {
            self.materialize(key, order);
            group.sort_by(|&a, &b| {
                let a_first = order
                    .compare(handles[a as usize], handles[b as usize])
                    .expect("node handles are live");
                if a_first {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            });
            let last = self.cells[&key].last;
            for &x in &group {
                order
                    .move_before(last, handles[x as usize])
                    .expect("cell dummies and node handles are live");
                count += 1;
            }
        }
        count
    }

    /// Create the cell's dummy bracket if it does not exist yet, splicing it
    /// between the nearest materialized neighbors in cell order. The gap
    /// between two adjacent materialized cells contains no live items, so
    /// the splice cannot straddle anything.
    fn materialize(&mut self, key: CellKey, order: &mut OrderList<OrderItem>) {
        if self.cells.contains_key(&key) {
            return;
        }
        let pred = self
            .cells
            .range((Bound::Unbounded, Bound::Excluded(key)))
            .next_back()
            .map(|(_, c)| c.last);
        let (first, last) = match pred {
            Some(anchor) => {
                let first = order
                    .insert_after(anchor, OrderItem::Dummy)
                    .expect("cell dummies are live");
                let last = order
                    .insert_after(first, OrderItem::Dummy)
                    .expect("cell dummies are live");
                (first, last)
            }
            None => {
                let succ = self
                    .cells
                    .range((Bound::Excluded(key), Bound::Unbounded))
                    .next()
                    .map(|(_, c)| c.first)
                    .expect("the base cell is always materialized");
                let first = order
                    .insert_before(succ, OrderItem::Dummy)
                    .expect("cell dummies are live");
                let last = order
                    .insert_after(first, OrderItem::Dummy)
                    .expect("cell dummies are live");
                (first, last)
            }
        };
        self.cells.insert(key, CellDummies { first, last });
    }
}
