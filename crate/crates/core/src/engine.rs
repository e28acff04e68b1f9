//! The incremental engine: orchestrates the per-insertion pipeline.
//!
//! Each accepted edge runs up to four phases. Phase one refreshes the
//! sampled-source reachability sets; phase two relocates nodes whose cell
//! changed; if the new edge still points backward in the maintained order,
//! phase three runs the balanced bidirectional search inside the endpoints'
//! (necessarily shared) cell; phase four splices the settled nodes back
//! around the edge. An edge that already points forward after phase two
//! needs no search at all — the cell order guarantees no cycle through it.
//!
//! The engine answers exactly one online question — "is the graph still
//! acyclic, and if so, give me a topological order" — and is *sticky*: once
//! a cycle is detected, every later insertion reports the cycle without
//! doing any work, and the maintained order is no longer available.
//!
//! The grouping parameter τ trades partition granularity against search
//! depth and wants the final edge count, which an online caller may not
//! know. The default policy derives τ from `m_hint` (falling back to
//! `m = n`); the opt-in restart-doubling mode instead rebuilds the engine
//! with a doubled hint whenever the observed edge count outgrows twice the
//! current one — the geometric series keeps total work within a constant
//! factor of a run that knew the final count, at the cost of folding the
//! replay work into the triggering insertion's metrics row.

use std::fmt;
use std::time::Instant;

use thiserror::Error;

use crate::bisearch::{self, SearchOptions, SearchOutcome, Terminator, Verdict};
use crate::graph_core::{AddEdge, Graph, NodeId};
use crate::levels::{LevelIndex, LevelsError, Partition, SampleSet};
use crate::order_list::{OrderHandle, OrderList};
use crate::OrderItem;

/// Which per-insertion search the engine runs when the new edge points
/// backward in the maintained order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    /// Balanced bidirectional search (the default).
    #[default]
    Balanced,
    /// One-sided forward search; kept as an instrumented comparison
    /// baseline. Verdicts are identical, costs are not.
    ForwardOnly,
}

/// Engine construction parameters. `new(n)` gives the defaults; override
/// fields as needed before passing to [`Engine::new`].
#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Number of nodes; ids are `0..n`.
    pub n: usize,
    /// Expected total number of insertions, used to derive τ. Defaults to
    /// `n` when absent.
    pub m_hint: Option<usize>,
    /// Explicit τ, bypassing the derivation. Must lie in `[1, n]`.
    pub tau_override: Option<usize>,
    /// Seed for the sampled-set draw.
    pub seed: u64,
    /// Multiplier in the sampling probability `min(1, c·ln n / τ)`.
    pub sampling_c: f64,
    /// Record one metrics row per insertion (aggregate counters are always
    /// maintained).
    pub collect_metrics: bool,
    /// Run the search's internal invariant checks after every expansion.
    /// Quadratic; for tests and verification runs.
    pub debug_checks: bool,
    /// Track search parents so a detected cycle carries an explicit path.
    pub record_cycle_path: bool,
    /// Which search runs in phase three.
    pub strategy: SearchStrategy,
    /// Rebuild with a doubled `m_hint` when the edge count exceeds twice
    /// the current hint. Off by default so metrics reflect a single τ.
    pub restart_doubling: bool,
    /// Exact sampled set, bypassing the seeded draw. Test plumbing.
    pub explicit_samples: Option<Vec<NodeId>>,
}

impl EngineConfig {
    /// Defaults: no hint (τ falls out of `m = n`), seed 0, sampling
    /// constant 2, metrics on, checks off, balanced search, no restarts.
    pub fn new(n: usize) -> Self {
        EngineConfig {
            n,
            m_hint: None,
            tau_override: None,
            seed: 0,
            sampling_c: 2.0,
            collect_metrics: true,
            debug_checks: false,
            record_cycle_path: false,
            strategy: SearchStrategy::default(),
            restart_doubling: false,
            explicit_samples: None,
        }
    }
}

/// Errors surfaced by the engine API.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EngineError {
    /// Engines need at least one node.
    #[error("node count must be at least 1")]
    InvalidNodeCount,
    /// An id at or above the configured node count.
    #[error("node id {id} out of range for n = {n}")]
    NodeOutOfRange { id: NodeId, n: usize },
    /// An explicit τ outside `[1, n]`.
    #[error("grouping parameter {tau} outside [1, {n}]")]
    TauOutOfRange { tau: usize, n: usize },
    /// The order was requested after a cycle was detected; there is no
    /// topological order to maintain anymore.
    #[error("no maintained order: a cycle has been detected")]
    NoMaintainedOrder,
}

impl From<LevelsError> for EngineError {
    fn from(e: LevelsError) -> Self {
        match e {
            LevelsError::TauOutOfRange { tau, n } => EngineError::TauOutOfRange { tau, n },
        }
    }
}

/// Per-insertion verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertVerdict {
    /// The graph is still acyclic and the maintained order is valid.
    Acyclic,
    /// The graph contains a cycle (not necessarily through this edge once
    /// the verdict is sticky).
    CycleDetected,
}

/// What one `insert_edge` call did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsertResult {
    pub verdict: InsertVerdict,
    /// How the search ended; `None` when no search ran.
    pub terminator: Option<Terminator>,
    /// Settled forward nodes of this insertion's search (0 when no search
    /// ran) — the quantity whose squares the accounting bounds.
    pub t: u64,
}

/// Details of the first detected cycle.
#[derive(Debug, Clone)]
pub struct CycleInfo {
    /// 1-based index of the insertion that closed the cycle.
    pub at_index: u64,
    /// The inserted edge `(u, v)` that closed it.
    pub edge: (NodeId, NodeId),
    /// The graph edge on which the two searches met, if a search ran.
    pub meeting: Option<(NodeId, NodeId)>,
    /// The path `v, …, u` closed into a cycle by `(u, v)`, when path
    /// recording was enabled.
    pub path: Option<Vec<NodeId>>,
}

/// One metrics row per `insert_edge` call (in call order, 1-based `idx`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsertionRow {
    pub idx: u64,
    pub u: NodeId,
    pub v: NodeId,
    pub verdict: InsertVerdict,
    pub terminator: Option<Terminator>,
    /// Settled forward nodes of this insertion's own search.
    pub t: u64,
    /// Reachability marks plus edge scans in phase one.
    pub phase1_work: u64,
    /// Cell relocations in phase two.
    pub phase2_moves: u64,
    /// Frontier pops plus edge scans in phase three.
    pub phase3_explored: u64,
    /// Order-list repositionings in phase four.
    pub phase4_placed: u64,
    /// Wall-clock for the whole call.
    pub nanos: u64,
}

/// Aggregate counters plus the optional per-insertion log.
///
/// Every aggregate equals the sum of the corresponding column over `rows`
/// whenever row collection is enabled. Wall-clock fields are measured and
/// therefore not deterministic; everything else is.
#[derive(Debug, Clone, Default)]
pub struct Metrics {
    /// Per-insertion log; populated only when `collect_metrics` is set.
    pub rows: Vec<InsertionRow>,
    /// Number of `insert_edge` calls with valid ids.
    pub insertions: u64,
    /// Number of phase-three searches that actually ran.
    pub searches: u64,
    /// Σ t over insertions and Σ t², the two accounting sums.
    pub sum_t: u64,
    pub sum_t2: u64,
    pub max_t: u64,
    pub phase1_work: u64,
    pub phase2_moves: u64,
    pub phase3_explored: u64,
    pub phase4_placed: u64,
    /// Wall-clock per phase, summed over insertions.
    pub phase1_nanos: u64,
    pub phase2_nanos: u64,
    pub phase3_nanos: u64,
    pub phase4_nanos: u64,
    /// Engine rebuilds performed by restart-doubling.
    pub restarts: u64,
}

/// Work counters of one trip through the pipeline (one edge, real or
/// replayed).
#[derive(Debug, Clone, Copy, Default)]
struct PhaseCounts {
    p1: u64,
    p2: u64,
    p3: u64,
    p4: u64,
    n1: u64,
    n2: u64,
    n3: u64,
    n4: u64,
}

impl PhaseCounts {
    fn absorb(&mut self, other: PhaseCounts) {
        self.p1 += other.p1;
        self.p2 += other.p2;
        self.p3 += other.p3;
        self.p4 += other.p4;
        self.n1 += other.n1;
        self.n2 += other.n2;
        self.n3 += other.n3;
        self.n4 += other.n4;
    }
}

struct PipelineOutcome {
    verdict: Verdict,
    terminator: Option<Terminator>,
    t: u64,
    counts: PhaseCounts,
    outcome: Option<SearchOutcome>,
}

/// Incremental cycle detection with topological order maintenance.
///
/// # Examples
///
/// ```
/// use inctopo_core::{Engine, EngineConfig, InsertVerdict};
///
/// let mut eng = Engine::new(EngineConfig::new(3)).unwrap();
/// assert_eq!(eng.insert_edge(0, 1).unwrap().verdict, InsertVerdict::Acyclic);
/// assert_eq!(eng.insert_edge(1, 2).unwrap().verdict, InsertVerdict::Acyclic);
/// assert!(eng.is_before(0, 2).unwrap());
///
/// // Closing the loop flips the verdict, permanently.
/// assert_eq!(eng.insert_edge(2, 0).unwrap().verdict, InsertVerdict::CycleDetected);
/// assert_eq!(eng.insert_edge(0, 1).unwrap().verdict, InsertVerdict::CycleDetected);
/// ```
pub struct Engine {
    cfg: EngineConfig,
    tau: usize,
    effective_hint: usize,
    graph: Graph,
    order: OrderList<OrderItem>,
    handles: Vec<OrderHandle>,
    partition: Partition,
    /// Edges actually added, in order, for restart replay.
    history: Vec<(NodeId, NodeId)>,
    op_index: u64,
    cycle: Option<CycleInfo>,
    metrics: Metrics,
    /// Relocations charged against the current partition: its seeding moves
    /// plus every phase-two move since the last (re)build.
    lifetime_moves: u64,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("n", &self.cfg.n)
            .field("m", &self.graph.m())
            .field("tau", &self.tau)
            .field("samples", &self.partition.samples().len())
            .field("cycle", &self.cycle.is_some())
            .finish_non_exhaustive()
    }
}

impl Engine {
    /// Build an engine: resolve τ, draw the sampled set, seed the order.
    pub fn new(cfg: EngineConfig) -> Result<Self, EngineError> {
        if cfg.n < 1 {
            return Err(EngineError::InvalidNodeCount);
        }
        if let Some(t) = cfg.tau_override {
            if t < 1 || t > cfg.n {
                return Err(EngineError::TauOutOfRange { tau: t, n: cfg.n });
            }
        }
        let effective_hint = cfg.m_hint.unwrap_or(cfg.n).max(1);
        let tau = match cfg.tau_override {
            Some(t) => t,
            None => derive_tau(cfg.n, effective_hint),
        };
        let (graph, order, handles, partition) = build_state(&cfg, tau, 0)?;
        let lifetime_moves = partition.init_moves();
        Ok(Engine {
            cfg,
            tau,
            effective_hint,
            graph,
            order,
            handles,
            partition,
            history: Vec::new(),
            op_index: 0,
            cycle: None,
            metrics: Metrics::default(),
            lifetime_moves,
        })
    }

    /// The resolved grouping parameter.
    pub fn tau(&self) -> usize {
        self.tau
    }

    /// Node count.
    pub fn n(&self) -> usize {
        self.cfg.n
    }

    /// Distinct non-loop edges currently stored.
    pub fn m(&self) -> usize {
        self.graph.m()
    }

    /// The sampled node set in force.
    pub fn samples(&self) -> &SampleSet {
        self.partition.samples()
    }

    /// The node's current cell coordinates.
    pub fn level_of(&self, x: NodeId) -> Result<LevelIndex, EngineError> {
        self.check_node(x)?;
        Ok(self.partition.level_of(x))
    }

    /// Details of the first detected cycle, if any.
    pub fn cycle_info(&self) -> Option<&CycleInfo> {
        self.cycle.as_ref()
    }

    /// Counter snapshot; `rows` is populated only when `collect_metrics`
    /// was set.
    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    /// Relocations charged against the current partition (its seeding plus
    /// all phase-two moves since the last rebuild). The accounting bounds
    /// this by `2·n·|S|`.
    pub fn total_moves(&self) -> u64 {
        self.lifetime_moves
    }

    /// Feed one edge. See the module docs for the pipeline; the verdict is
    /// sticky once a cycle is detected.
    pub fn insert_edge(&mut self, u: NodeId, v: NodeId) -> Result<InsertResult, EngineError> {
        self.check_node(u)?;
        self.check_node(v)?;
        let started = Instant::now();
        self.op_index += 1;
        self.metrics.insertions += 1;

        if self.cycle.is_some() {
            let res = InsertResult {
                verdict: InsertVerdict::CycleDetected,
                terminator: None,
                t: 0,
            };
            self.record_row(u, v, res, PhaseCounts::default(), started);
            return Ok(res);
        }

        if u == v {
            self.cycle = Some(CycleInfo {
                at_index: self.op_index,
                edge: (u, v),
                meeting: Some((u, v)),
                path: Some(vec![u]),
            });
            let res = InsertResult {
                verdict: InsertVerdict::CycleDetected,
                terminator: None,
                t: 0,
            };
            self.record_row(u, v, res, PhaseCounts::default(), started);
            return Ok(res);
        }

        if self.graph.has_edge(u, v) {
            let res = InsertResult {
                verdict: InsertVerdict::Acyclic,
                terminator: None,
                t: 0,
            };
            self.record_row(u, v, res, PhaseCounts::default(), started);
            return Ok(res);
        }

        let mut counts = PhaseCounts::default();
        if self.cfg.restart_doubling && self.graph.m() + 1 > 2 * self.effective_hint {
            self.restart_with_doubled_hint(&mut counts)?;
        }

        let done = self.run_pipeline(u, v);
        counts.absorb(done.counts);
        let res = match done.verdict {
            Verdict::Acyclic => InsertResult {
                verdict: InsertVerdict::Acyclic,
                terminator: done.terminator,
                t: done.t,
            },
            Verdict::Cycle => {
                let outcome = done.outcome.expect("a cycle verdict comes from a search");
                self.cycle = Some(CycleInfo {
                    at_index: self.op_index,
                    edge: (u, v),
                    meeting: outcome.meeting,
                    path: outcome.cycle_path,
                });
                InsertResult {
                    verdict: InsertVerdict::CycleDetected,
                    terminator: done.terminator,
                    t: done.t,
                }
            }
        };
        if done.terminator.is_some() {
            self.metrics.searches += 1;
        }
        self.metrics.sum_t += done.t;
        self.metrics.sum_t2 += done.t * done.t;
        self.metrics.max_t = self.metrics.max_t.max(done.t);
        self.record_row(u, v, res, counts, started);
        Ok(res)
    }

    /// True iff `x` currently precedes `y` in the maintained order. Errors
    /// once a cycle has been detected; `is_before(x, x)` is false.
    pub fn is_before(&self, x: NodeId, y: NodeId) -> Result<bool, EngineError> {
        self.check_node(x)?;
        self.check_node(y)?;
        if self.cycle.is_some() {
            return Err(EngineError::NoMaintainedOrder);
        }
        Ok(self
            .order
            .compare(self.handles[x as usize], self.handles[y as usize])
            .expect("node handles are live"))
    }

    /// All nodes in maintained order. Errors once a cycle has been
    /// detected.
    pub fn current_order(&self) -> Result<Vec<NodeId>, EngineError> {
        if self.cycle.is_some() {
            return Err(EngineError::NoMaintainedOrder);
        }
        Ok(self
            .order
            .iter()
            .filter_map(|(_, item)| match item {
                OrderItem::Node(x) => Some(*x),
                OrderItem::Dummy => None,
            })
            .collect())
    }

    fn check_node(&self, x: NodeId) -> Result<(), EngineError> {
        if (x as usize) < self.cfg.n {
            Ok(())
        } else {
            Err(EngineError::NodeOutOfRange {
                id: x,
                n: self.cfg.n,
            })
        }
    }

    /// Add the edge and run phases one through four. The caller decides how
    /// the counts land in the metrics.
    fn run_pipeline(&mut self, u: NodeId, v: NodeId) -> PipelineOutcome {
        let added = self
            .graph
            .add_edge(u, v)
            .expect("ids validated by the caller");
        debug_assert_eq!(added, AddEdge::Added, "duplicates are filtered earlier");
        self.history.push((u, v));

        let mut counts = PhaseCounts::default();
        let t1 = Instant::now();
        let (moves, work) = self.partition.phase1_update(&self.graph, u, v);
        counts.p1 = work;
        counts.n1 = t1.elapsed().as_nanos() as u64;

        let t2 = Instant::now();
        counts.p2 = self
            .partition
            .phase2_apply(&mut self.order, &self.handles, &moves);
        self.lifetime_moves += counts.p2;
        counts.n2 = t2.elapsed().as_nanos() as u64;

        let forward_already = self
            .order
            .compare(self.handles[u as usize], self.handles[v as usize])
            .expect("node handles are live");
        if forward_already {
            return PipelineOutcome {
                verdict: Verdict::Acyclic,
                terminator: None,
                t: 0,
                counts,
                outcome: None,
            };
        }

        // A backward edge whose endpoints sat in different cells would
        // contradict the cell-order invariant; that is an implementation
        // bug, never an input condition, hence a hard assert.
        assert_eq!(
            self.partition.level_of(u),
            self.partition.level_of(v),
            "backward edge endpoints must share a cell"
        );

        let opts = SearchOptions {
            debug_checks: self.cfg.debug_checks,
            record_parents: self.cfg.record_cycle_path,
        };
        let t3 = Instant::now();
        let outcome = match self.cfg.strategy {
            SearchStrategy::Balanced => bisearch::search(
                &self.graph,
                &self.order,
                &self.handles,
                self.partition.levels(),
                u,
                v,
                opts,
            ),
            SearchStrategy::ForwardOnly => bisearch::search_forward_only(
                &self.graph,
                &self.order,
                &self.handles,
                self.partition.levels(),
                u,
                v,
                opts,
            ),
        };
        counts.p3 = outcome.explored;
        counts.n3 = t3.elapsed().as_nanos() as u64;

        let (verdict, t) = (outcome.verdict, outcome.t);
        if verdict == Verdict::Acyclic {
            let t4 = Instant::now();
            counts.p4 = match self.cfg.strategy {
                SearchStrategy::Balanced => {
                    bisearch::reorder(&mut self.order, &self.handles, &outcome, u, v)
                }
                SearchStrategy::ForwardOnly => {
                    bisearch::reorder_forward_only(&mut self.order, &self.handles, &outcome, u, v)
                }
            };
            counts.n4 = t4.elapsed().as_nanos() as u64;
        }
        PipelineOutcome {
            verdict,
            terminator: Some(outcome.terminator),
            t,
            counts,
            outcome: Some(outcome),
        }
    }

    /// Rebuild with a doubled hint and replay the accepted edges. Replay
    /// work lands in `carry`, charged to the insertion that triggered the
    /// rebuild. A single doubling always suffices: the trigger fires at
    /// `m + 1 > 2·hint`, and `m + 1 ≤ 4·hint` holds from the previous bound.
    fn restart_with_doubled_hint(&mut self, carry: &mut PhaseCounts) -> Result<(), EngineError> {
        self.effective_hint *= 2;
        self.metrics.restarts += 1;
        self.tau = match self.cfg.tau_override {
            Some(t) => t,
            None => derive_tau(self.cfg.n, self.effective_hint),
        };
        let (graph, order, handles, partition) =
            build_state(&self.cfg, self.tau, self.metrics.restarts)?;
        self.graph = graph;
        self.order = order;
        self.handles = handles;
        self.partition = partition;
        self.lifetime_moves = self.partition.init_moves();

        let history = std::mem::take(&mut self.history);
        for &(a, b) in &history {
            let done = self.run_pipeline(a, b);
            assert_eq!(
                done.verdict,
                Verdict::Acyclic,
                "replaying an acyclic history stays acyclic"
            );
            carry.absorb(done.counts);
        }
        Ok(())
    }

    fn record_row(
        &mut self,
        u: NodeId,
        v: NodeId,
        res: InsertResult,
        counts: PhaseCounts,
        started: Instant,
    ) {
        self.metrics.phase1_work += counts.p1;
        self.metrics.phase2_moves += counts.p2;
        self.metrics.phase3_explored += counts.p3;
        self.metrics.phase4_placed += counts.p4;
        self.metrics.phase1_nanos += counts.n1;
        self.metrics.phase2_nanos += counts.n2;
        self.metrics.phase3_nanos += counts.n3;
        self.metrics.phase4_nanos += counts.n4;
        if self.cfg.collect_metrics {
            self.metrics.rows.push(InsertionRow {
                idx: self.op_index,
                u,
                v,
                verdict: res.verdict,
                terminator: res.terminator,
                t: res.t,
                phase1_work: counts.p1,
                phase2_moves: counts.p2,
                phase3_explored: counts.p3,
                phase4_placed: counts.p4,
                nanos: started.elapsed().as_nanos() as u64,
            });
        }
    }
}

/// `τ = clamp(round(n / hint^{1/3}), 1, n)`.
fn derive_tau(n: usize, hint: usize) -> usize {
    let raw = n as f64 / (hint as f64).cbrt();
    (raw.round() as usize).clamp(1, n)
}

/// Draw (or adopt) the sampled set and seed the order list. `round`
/// perturbs the seed so each restart draws a fresh set.
fn build_state(
    cfg: &EngineConfig,
    tau: usize,
    round: u64,
) -> Result<(Graph, OrderList<OrderItem>, Vec<OrderHandle>, Partition), EngineError> {
    let samples = match &cfg.explicit_samples {
        Some(list) => SampleSet::from_members(cfg.n, list.iter().copied()),
        None => SampleSet::draw(cfg.n, tau, cfg.sampling_c, mix_seed(cfg.seed, round))?,
    };
    let mut order = OrderList::new();
    let (partition, handles) = Partition::new(cfg.n, samples, &mut order);
    Ok((Graph::new(cfg.n), order, handles, partition))
}

/// Cheap seed derivation for restart rounds (splitmix-style finalizer).
fn mix_seed(seed: u64, round: u64) -> u64 {
    if round == 0 {
        return seed;
    }
    let mut z = seed ^ round.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
