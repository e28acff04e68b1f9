//! The order-maintenance list. Correctness here is load-bearing for every
//! other module, so besides the API contract (handles, errors, moves) the
//! suite drives randomized operation scripts against a plain-vector shadow
//! model and forces the internal relabeling paths (bucket splits, respacing,
//! full renumbering) that only show up under adversarial insertion points.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use inctopo_core::{OrderError, OrderHandle, OrderList};

/// Collect the list's values in order.
fn contents(list: &OrderList<u32>) -> Vec<u32> {
    list.iter().map(|(_, v)| *v).collect()
}

#[test]
fn insertion_primitives_build_the_expected_sequence() {
    let mut list = OrderList::new();
    let b = list.insert_first(1u32);
    let a = list.insert_before(b, 0).unwrap();
    let d = list.insert_after(b, 3).unwrap();
    let _c = list.insert_after(b, 2).unwrap();
    assert_eq!(contents(&list), vec![0, 1, 2, 3]);
    assert_eq!(list.len(), 4);
    assert!(list.compare(a, d).unwrap());
    assert!(!list.compare(d, a).unwrap());
    assert!(!list.compare(a, a).unwrap(), "no element precedes itself");
}

#[test]
fn insert_first_prepends_once_the_list_is_nonempty() {
    let mut list = OrderList::new();
    let x = list.insert_first(10u32);
    let y = list.insert_first(20);
    assert_eq!(contents(&list), vec![20, 10]);
    assert!(list.compare(y, x).unwrap());
}

#[test]
fn delete_returns_the_value_and_invalidates_the_handle() {
    let mut list = OrderList::new();
    let a = list.insert_first(7u32);
    let b = list.insert_after(a, 8).unwrap();
    assert_eq!(list.delete(a).unwrap(), 7);
    assert_eq!(contents(&list), vec![8]);
    assert_eq!(list.delete(a), Err(OrderError::StaleHandle));
    assert_eq!(list.compare(a, b), Err(OrderError::StaleHandle));
    assert_eq!(list.insert_before(a, 9), Err(OrderError::StaleHandle));
}

#[test]
fn slots_are_reused_without_resurrecting_old_handles() {
    let mut list = OrderList::new();
    let a = list.insert_first(1u32);
    list.delete(a).unwrap();
    let b = list.insert_first(2u32);
    // The new element may reuse the slot, but the dead handle stays dead.
    assert_eq!(list.get(a), Err(OrderError::StaleHandle));
    assert_eq!(list.get(b).copied().unwrap(), 2);
}

#[test]
fn handles_from_another_list_are_rejected() {
    let mut one = OrderList::new();
    let mut two = OrderList::new();
    let h1 = one.insert_first(1u32);
    let h2 = two.insert_first(2u32);
    assert_eq!(one.compare(h1, h2), Err(OrderError::ForeignList));
    assert_eq!(two.move_after(h2, h1), Err(OrderError::ForeignList));
}

#[test]
fn moves_relocate_while_preserving_the_handle() {
    let mut list = OrderList::new();
    let a = list.insert_first(0u32);
    let b = list.insert_after(a, 1).unwrap();
    let c = list.insert_after(b, 2).unwrap();
    let d = list.insert_after(c, 3).unwrap();

    list.move_before(a, d).unwrap();
    assert_eq!(contents(&list), vec![3, 0, 1, 2]);
    list.move_after(c, d).unwrap();
    assert_eq!(contents(&list), vec![0, 1, 2, 3]);
    // Self-moves are no-ops.
    list.move_after(b, b).unwrap();
    list.move_before(b, b).unwrap();
    assert_eq!(contents(&list), vec![0, 1, 2, 3]);
    assert_eq!(list.get(d).copied().unwrap(), 3);
}

#[test]
fn position_keys_sort_like_the_list() {
    let mut list = OrderList::new();
    let mut handles: Vec<OrderHandle> = Vec::new();
    let mut h = list.insert_first(0u32);
    handles.push(h);
    for i in 1..200u32 {
        h = list.insert_after(h, i).unwrap();
        handles.push(h);
    }
    let mut keyed: Vec<(u32, _)> = handles
        .iter()
        .map(|&h| (*list.get(h).unwrap(), list.position_key(h).unwrap()))
        .collect();
    keyed.sort_by_key(|&(_, k)| k);
    let by_key: Vec<u32> = keyed.into_iter().map(|(v, _)| v).collect();
    assert_eq!(by_key, contents(&list));
}

#[test]
fn head_insertion_storm_forces_relabeling() {
    // Repeatedly inserting at the very front burns through the label gap
    // at one point, forcing respacing/splitting; the order must survive.
    let mut list = OrderList::new();
    let mut front = list.insert_first(0u32);
    for i in 1..=2000u32 {
        front = list.insert_before(front, i).unwrap();
    }
    let got = contents(&list);
    assert_eq!(got.len(), 2001);
    for (idx, &v) in got.iter().enumerate() {
        assert_eq!(v, 2000 - idx as u32);
    }
}

#[test]
fn midpoint_insertion_storm_forces_bucket_splits() {
    // Always inserting after the same anchor exhausts its bucket's
    // sub-labels and keeps splitting the same region.
    let mut list = OrderList::new();
    let anchor = list.insert_first(u32::MAX);
    for i in 0..2000u32 {
        list.insert_after(anchor, i).unwrap();
    }
    let got = contents(&list);
    assert_eq!(got.len(), 2001);
    assert_eq!(got[0], u32::MAX);
    // Each later insertion lands closer to the anchor: reverse order.
    for (idx, &v) in got[1..].iter().enumerate() {
        assert_eq!(v, 1999 - idx as u32);
    }
}

#[test]
fn empty_and_single_element_edge_cases() {
    let mut list: OrderList<u32> = OrderList::new();
    assert!(list.is_empty());
    assert_eq!(list.len(), 0);
    assert_eq!(contents(&list), Vec::<u32>::new());
    let only = list.insert_first(42);
    assert_eq!(list.len(), 1);
    assert_eq!(list.delete(only).unwrap(), 42);
    assert!(list.is_empty());
    // The list is reusable after draining.
    let again = list.insert_first(7);
    assert_eq!(list.get(again).copied().unwrap(), 7);
}

// --- randomized scripts against a shadow vector ---

/// The shadow: element ids in order, plus the live handle of each id.
struct Shadow {
    order: Vec<u32>,
    handles: Vec<Option<OrderHandle>>,
}

impl Shadow {
    fn pos(&self, id: u32) -> usize {
        self.order.iter().position(|&x| x == id).expect("id is live")
    }
}

/// One scripted operation, chosen by (op, a, b) drawn from the RNG.
fn run_script(seed: u64, steps: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut list: OrderList<u32> = OrderList::new();
    let mut shadow = Shadow {
        order: Vec::new(),
        handles: Vec::new(),
    };
    let mut next_id: u32 = 0;

    for step in 0..steps {
        let live: Vec<u32> = shadow
            .handles
            .iter()
            .enumerate()
            .filter_map(|(id, h)| h.map(|_| id as u32))
            .collect();
        let op = rng.random_range(0..100);
        match op {
            // Insert somewhere.
            0..=44 => {
                let id = next_id;
                next_id += 1;
                let h = if live.is_empty() || rng.random_range(0..10) == 0 {
                    shadow.order.insert(0, id);
                    list.insert_first(id)
                } else {
                    let anchor = live[rng.random_range(0..live.len())];
                    let ah = shadow.handles[anchor as usize].unwrap();
                    let at = shadow.pos(anchor);
                    if rng.random::<bool>() {
                        shadow.order.insert(at, id);
                        list.insert_before(ah, id).unwrap()
                    } else {
                        shadow.order.insert(at + 1, id);
                        list.insert_after(ah, id).unwrap()
                    }
                };
                shadow.handles.push(Some(h));
                assert_eq!(shadow.handles.len() as u32, next_id);
            }
            // Move an element relative to another.
            45..=74 if live.len() >= 2 => {
                let x = live[rng.random_range(0..live.len())];
                let anchor = live[rng.random_range(0..live.len())];
                let xh = shadow.handles[x as usize].unwrap();
                let ah = shadow.handles[anchor as usize].unwrap();
                if rng.random::<bool>() {
                    list.move_before(ah, xh).unwrap();
                    if x != anchor {
                        let from = shadow.pos(x);
                        shadow.order.remove(from);
                        let to = shadow.pos(anchor);
                        shadow.order.insert(to, x);
                    }
                } else {
                    list.move_after(ah, xh).unwrap();
                    if x != anchor {
                        let from = shadow.pos(x);
                        shadow.order.remove(from);
                        let to = shadow.pos(anchor);
                        shadow.order.insert(to + 1, x);
                    }
                }
            }
            // Delete.
            75..=84 if !live.is_empty() => {
                let x = live[rng.random_range(0..live.len())];
                let xh = shadow.handles[x as usize].take().unwrap();
                let got = list.delete(xh).unwrap();
                assert_eq!(got, x);
                let at = shadow.pos(x);
                shadow.order.remove(at);
            }
            // Compare a random pair.
            _ if live.len() >= 2 => {
                let x = live[rng.random_range(0..live.len())];
                let y = live[rng.random_range(0..live.len())];
                let xh = shadow.handles[x as usize].unwrap();
                let yh = shadow.handles[y as usize].unwrap();
                let expect = x != y && shadow.pos(x) < shadow.pos(y);
                assert_eq!(
                    list.compare(xh, yh).unwrap(),
                    expect,
                    "step {step}: compare({x}, {y}) diverged"
                );
            }
            _ => {}
        }
        assert_eq!(list.len(), shadow.order.len());
    }
    assert_eq!(contents(&list), shadow.order, "final order diverged");
}

#[test]
fn scripted_operations_match_the_shadow_model() {
    for seed in 0..8 {
        run_script(seed, 4000);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_scripts_match_the_shadow_model(seed in 0u64..1_000_000) {
        run_script(seed, 600);
    }
}
