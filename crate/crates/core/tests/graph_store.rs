//! Adjacency storage and the degree-splitting trace transform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use inctopo_core::oracle::{first_cycle_index, has_cycle};
use inctopo_core::{degree_split_trace, degree_split_trace_mapped, AddEdge, Graph, NodeId, Trace};

#[test]
fn add_edge_reports_new_and_duplicate() {
    let mut g = Graph::new(3);
    assert_eq!(g.add_edge(0, 1).unwrap(), AddEdge::Added);
    assert_eq!(g.add_edge(0, 1).unwrap(), AddEdge::Duplicate);
    assert_eq!(g.m(), 1);
    assert!(g.has_edge(0, 1));
    assert!(!g.has_edge(1, 0));
}

#[test]
fn out_of_range_ids_are_rejected() {
    let mut g = Graph::new(2);
    assert!(g.add_edge(0, 2).is_err());
    assert!(g.add_edge(5, 0).is_err());
    assert_eq!(g.m(), 0);
}

#[test]
fn neighbors_accumulate_in_insertion_order() {
    let mut g = Graph::new(4);
    g.add_edge(0, 2).unwrap();
    g.add_edge(0, 1).unwrap();
    g.add_edge(3, 0).unwrap();
    assert_eq!(g.out_neighbors(0), &[2, 1]);
    assert_eq!(g.in_neighbors(0), &[3]);
    assert_eq!(g.edges_sorted(), vec![(0, 1), (0, 2), (3, 0)]);
}

#[test]
fn self_loops_are_storable() {
    // Storage is policy-free; the engine decides what a self-loop means.
    let mut g = Graph::new(2);
    assert_eq!(g.add_edge(1, 1).unwrap(), AddEdge::Added);
    assert_eq!(g.out_neighbors(1), &[1]);
    assert_eq!(g.in_neighbors(1), &[1]);
}

// --- degree splitting ---

fn degree_bounds(t: &Trace) -> (usize, usize) {
    let mut outs = vec![0usize; t.n];
    let mut ins = vec![0usize; t.n];
    for &(u, v) in &t.events {
        outs[u as usize] += 1;
        ins[v as usize] += 1;
    }
    (
        outs.into_iter().max().unwrap_or(0),
        ins.into_iter().max().unwrap_or(0),
    )
}

#[test]
fn low_degree_traces_pass_through_unchanged() {
    let t = Trace::new(4, vec![(0, 1), (1, 2), (2, 3)]);
    let split = degree_split_trace(&t, 3);
    assert_eq!(split.n, t.n);
    assert_eq!(split.events, t.events);
}

#[test]
fn hub_fanout_is_capped_by_relays() {
    // A star: node 0 points at everyone. With cap 3 the original node may
    // keep at most cap-1 real out-edges before chaining to a relay.
    let events: Vec<(NodeId, NodeId)> = (1..9).map(|v| (0, v as NodeId)).collect();
    let t = Trace::new(9, events);
    let split = degree_split_trace(&t, 3);
    let (max_out, max_in) = degree_bounds(&split);
    assert!(max_out <= 3, "out-degree {max_out} exceeds the cap");
    assert!(max_in <= 3, "in-degree {max_in} exceeds the cap");
    assert!(split.n > t.n, "a hub this wide needs relay nodes");
    assert!(!has_cycle(split.n, &split.events));
}

#[test]
fn hub_fanin_is_capped_by_relays() {
    let events: Vec<(NodeId, NodeId)> = (1..9).map(|u| (u as NodeId, 0)).collect();
    let t = Trace::new(9, events);
    let split = degree_split_trace(&t, 3);
    let (max_out, max_in) = degree_bounds(&split);
    assert!(max_out <= 3);
    assert!(max_in <= 3);
    assert!(!has_cycle(split.n, &split.events));
}

#[test]
fn split_preserves_per_prefix_cyclicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..60 {
        let n = rng.random_range(2..=16);
        let m = rng.random_range(1..=4 * n);
        let events: Vec<(NodeId, NodeId)> = (0..m)
            .map(|_| {
                (
                    rng.random_range(0..n) as NodeId,
                    rng.random_range(0..n) as NodeId,
                )
            })
            .filter(|(u, v)| u != v)
            .collect();
        let t = Trace::new(n, events);
        for cap in [2usize, 3, 5] {
            let split = degree_split_trace_mapped(&t, cap);
            assert_eq!(split.group_end.len(), t.events.len());
            for k in 0..t.events.len() {
                let orig_cyclic = has_cycle(t.n, &t.events[..k + 1]);
                let end = split.group_end[k];
                let split_cyclic = has_cycle(split.trace.n, &split.trace.events[..end]);
                assert_eq!(
                    orig_cyclic, split_cyclic,
                    "case {case} cap {cap}: prefix {} disagrees after splitting",
                    k + 1
                );
            }
            let (max_out, max_in) = degree_bounds(&split.trace);
            assert!(max_out <= cap && max_in <= cap, "case {case} cap {cap}");
        }
    }
}

#[test]
fn split_preserves_first_cycle_position_through_the_mapping() {
    let t = Trace::new(3, vec![(0, 1), (1, 2), (2, 0), (1, 0)]);
    let split = degree_split_trace_mapped(&t, 2);
    let orig = first_cycle_index(&t).unwrap();
    // The split trace becomes cyclic within the same event group.
    let end_before = if orig >= 2 {
        split.group_end[orig as usize - 2]
    } else {
        0
    };
    let end_at = split.group_end[orig as usize - 1];
    assert!(!has_cycle(split.trace.n, &split.trace.events[..end_before]));
    assert!(has_cycle(split.trace.n, &split.trace.events[..end_at]));
}

#[test]
#[should_panic]
fn cap_below_two_is_rejected() {
    let t = Trace::new(2, vec![(0, 1)]);
    let _ = degree_split_trace(&t, 1);
}
