//! The sampled partition: set drawing, the cell order, and the
//! reachability-count maintenance that phases one and two perform. The
//! reference for every check is a fresh closure computation by the oracle.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use inctopo_core::oracle::{descendants, has_cycle};
use inctopo_core::{
    precedes_star, Graph, LevelIndex, LevelsError, NodeId, OrderHandle, OrderItem, OrderList,
    Partition, SampleSet,
};

#[test]
fn drawing_is_deterministic_in_the_seed() {
    let a = SampleSet::draw(100, 20, 2.0, 42).unwrap();
    let b = SampleSet::draw(100, 20, 2.0, 42).unwrap();
    let c = SampleSet::draw(100, 20, 2.0, 43).unwrap();
    assert_eq!(a.iter().collect::<Vec<_>>(), b.iter().collect::<Vec<_>>());
    // p = 2·ln(100)/20 ≈ 0.46 over 100 nodes, so two seeds agreeing on
    // every node would be a 2^-100-grade collision.
    assert_ne!(a.iter().collect::<Vec<_>>(), c.iter().collect::<Vec<_>>());
}

#[test]
fn tight_grouping_samples_everyone() {
    // p = min(1, 2·ln n / τ) = 1 for τ = 1 at any n ≥ 2.
    let s = SampleSet::draw(16, 1, 2.0, 0).unwrap();
    assert_eq!(s.len(), 16);
    assert!((0..16).all(|x| s.contains(x)));
}

#[test]
fn single_node_universe_samples_nothing() {
    // ln(1) = 0 makes the inclusion probability zero.
    let s = SampleSet::draw(1, 1, 2.0, 9).unwrap();
    assert!(s.is_empty());
    assert!(!s.contains(0));
}

#[test]
fn grouping_parameter_is_validated() {
    assert_eq!(
        SampleSet::draw(8, 0, 2.0, 0).unwrap_err(),
        LevelsError::TauOutOfRange { tau: 0, n: 8 }
    );
    assert_eq!(
        SampleSet::draw(8, 9, 2.0, 0).unwrap_err(),
        LevelsError::TauOutOfRange { tau: 9, n: 8 }
    );
}

#[test]
fn explicit_member_sets_are_exact() {
    let s = SampleSet::from_members(6, [4, 1]);
    assert_eq!(s.len(), 2);
    assert!(s.contains(1) && s.contains(4));
    assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 4]);
}

#[test]
#[should_panic]
fn explicit_members_must_be_in_range() {
    let _ = SampleSet::from_members(3, [3]);
}

#[test]
fn cell_order_pins_the_tiebreak_direction() {
    let a = LevelIndex { i: 0, j: 5 };
    let b = LevelIndex { i: 1, j: 0 };
    assert!(precedes_star(a, b), "fewer sampled ancestors comes first");
    let c = LevelIndex { i: 1, j: 3 };
    let d = LevelIndex { i: 1, j: 1 };
    assert!(
        precedes_star(c, d),
        "more sampled descendants breaks the tie toward earlier"
    );
    assert!(!precedes_star(c, c), "irreflexive");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cell_order_is_a_strict_total_order(
        ai in 0u32..6, aj in 0u32..6,
        bi in 0u32..6, bj in 0u32..6,
        ci in 0u32..6, cj in 0u32..6,
    ) {
        let a = LevelIndex { i: ai, j: aj };
        let b = LevelIndex { i: bi, j: bj };
        let c = LevelIndex { i: ci, j: cj };
        // Totality + antisymmetry: exactly one of <, >, = holds.
        let ab = precedes_star(a, b) as u8 + precedes_star(b, a) as u8 + (a == b) as u8;
        prop_assert_eq!(ab, 1);
        // Transitivity.
        if precedes_star(a, b) && precedes_star(b, c) {
            prop_assert!(precedes_star(a, c));
        }
    }
}

/// Fresh BFS recomputation of every node's cell coordinates.
fn reference_levels(n: usize, edges: &[(NodeId, NodeId)], samples: &SampleSet) -> Vec<LevelIndex> {
    let mut levels = vec![LevelIndex { i: 0, j: 0 }; n];
    for s in samples.iter() {
        let reach = descendants(n, edges, s);
        for x in 0..n {
            if reach[x] {
                levels[x].i += 1;
            }
        }
        let back = descendants(
            n,
            &edges.iter().map(|&(u, v)| (v, u)).collect::<Vec<_>>(),
            s,
        );
        for x in 0..n {
            if back[x] {
                levels[x].j += 1;
            }
        }
    }
    levels
}

struct Fixture {
    graph: Graph,
    part: Partition,
    order: OrderList<OrderItem>,
    handles: Vec<OrderHandle>,
}

impl Fixture {
    fn new(n: usize, members: &[NodeId]) -> Self {
        let samples = SampleSet::from_members(n, members.iter().copied());
        let mut order = OrderList::new();
        let (part, handles) = Partition::new(n, samples, &mut order);
        Fixture {
            graph: Graph::new(n),
            part,
            order,
            handles,
        }
    }

    fn insert(&mut self, u: NodeId, v: NodeId) {
        self.graph.add_edge(u, v).unwrap();
        let (moves, _) = self.part.phase1_update(&self.graph, u, v);
        self.part
            .phase2_apply(&mut self.order, &self.handles, &moves);
    }

    /// Every node's stored coordinates equal the fresh recomputation.
    fn check_levels(&self) {
        let n = self.graph.n();
        let edges = self.graph.edges_sorted();
        let expect = reference_levels(n, &edges, self.part.samples());
        for x in 0..n {
            assert_eq!(
                self.part.level_of(x as NodeId),
                expect[x],
                "node {x} coordinates diverge from fresh recomputation"
            );
        }
    }

    /// Every node sits inside its cell's dummy bracket, and brackets of
    /// distinct cells appear in cell order without overlapping.
    fn check_brackets(&self) {
        let n = self.graph.n();
        for x in 0..n as NodeId {
            let cell = self.part.level_of(x);
            let (first, last) = self
                .part
                .cell_bracket(cell)
                .expect("occupied cells are materialized");
            let h = self.handles[x as usize];
            assert!(
                self.order.compare(first, h).unwrap() && self.order.compare(h, last).unwrap(),
                "node {x} escaped its cell bracket"
            );
        }
        let mut cells: Vec<LevelIndex> = (0..n as NodeId).map(|x| self.part.level_of(x)).collect();
        cells.sort_by(|&a, &b| {
            if precedes_star(a, b) {
                std::cmp::Ordering::Less
            } else if precedes_star(b, a) {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        });
        cells.dedup();
        for w in cells.windows(2) {
            let (_, last_a) = self.part.cell_bracket(w[0]).unwrap();
            let (first_b, _) = self.part.cell_bracket(w[1]).unwrap();
            assert!(
                self.order.compare(last_a, first_b).unwrap(),
                "brackets of {:?} and {:?} overlap or are misordered",
                w[0],
                w[1]
            );
        }
    }

    /// Edges whose endpoints sit in different cells must agree with the
    /// cell order.
    fn check_cross_edges(&self) {
        for (u, v) in self.graph.edges_sorted() {
            let lu = self.part.level_of(u);
            let lv = self.part.level_of(v);
            if lu != lv {
                assert!(
                    precedes_star(lu, lv),
                    "cross edge ({u}, {v}) points against the cell order: {lu:?} -> {lv:?}"
                );
            }
        }
    }
}

#[test]
fn fresh_partition_seeds_sampled_nodes_into_their_own_cell() {
    let fx = Fixture::new(5, &[1, 3]);
    for x in [0u32, 2, 4] {
        assert_eq!(fx.part.level_of(x), LevelIndex { i: 0, j: 0 });
    }
    for x in [1u32, 3] {
        assert_eq!(
            fx.part.level_of(x),
            LevelIndex { i: 1, j: 1 },
            "a sampled node is its own sampled ancestor and descendant"
        );
    }
    assert_eq!(
        fx.part.init_moves(),
        2,
        "seeding relocates exactly the sampled nodes"
    );
    fx.check_levels();
    fx.check_brackets();
}

#[test]
fn single_edge_updates_exactly_the_reachability_counts() {
    let mut fx = Fixture::new(4, &[0, 3]);
    fx.insert(0, 1);
    // 1 gains sampled ancestor 0; nothing else changes.
    assert_eq!(fx.part.level_of(1), LevelIndex { i: 1, j: 0 });
    assert_eq!(fx.part.level_of(0), LevelIndex { i: 1, j: 1 });
    fx.check_levels();
    fx.check_brackets();
    fx.check_cross_edges();

    fx.insert(1, 3);
    // Path 0→1→3: 1 now also reaches sampled 3; 0 reaches 3; 3 gains
    // sampled ancestor 0.
    assert_eq!(fx.part.level_of(1), LevelIndex { i: 1, j: 1 });
    assert_eq!(fx.part.level_of(0), LevelIndex { i: 1, j: 2 });
    assert_eq!(fx.part.level_of(3), LevelIndex { i: 2, j: 1 });
    fx.check_levels();
    fx.check_brackets();
    fx.check_cross_edges();
}

#[test]
fn random_acyclic_streams_stay_consistent_with_fresh_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..40 {
        let n = rng.random_range(2..=14);
        let sample_count = rng.random_range(0..=n);
        let mut ids: Vec<NodeId> = (0..n as NodeId).collect();
        for k in 0..n {
            let other = rng.random_range(0..n);
            ids.swap(k, other);
        }
        let members: Vec<NodeId> = ids.into_iter().take(sample_count).collect();
        let mut fx = Fixture::new(n, &members);
        let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
        let mut attempts = 0;
        while edges.len() < 3 * n && attempts < 20 * n {
            attempts += 1;
            let u = rng.random_range(0..n) as NodeId;
            let v = rng.random_range(0..n) as NodeId;
            if u == v || fx.graph.has_edge(u, v) {
                continue;
            }
            let mut probe = edges.clone();
            probe.push((u, v));
            if has_cycle(n, &probe) {
                continue;
            }
            edges.push((u, v));
            fx.insert(u, v);
            fx.check_levels();
            fx.check_brackets();
            fx.check_cross_edges();
        }
        assert!(!edges.is_empty(), "case {case} inserted nothing");
    }
}
