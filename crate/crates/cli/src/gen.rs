//! Deterministic trace generators for the benchmark workloads.
//!
//! Every generator is a pure function of `(kind, n, m, seed)`: the same
//! arguments produce byte-identical trace files. All kinds emit distinct
//! non-loop edges; duplicate-handling is exercised by hand-written corpus
//! traces instead.

use std::collections::HashSet;

use clap::ValueEnum;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use inctopo_core::{NodeId, Trace};

/// Workload shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceKind {
    /// Uniform distinct ordered pairs; cycles appear naturally.
    Random,
    /// Distinct pairs oriented along a hidden random permutation, so the
    /// trace never creates a cycle.
    RandomAcyclic,
    /// The identity-order chain 0→1→…, then uniform random extras.
    Path,
    /// A sparse random prefix over all nodes, then a dense suffix
    /// concentrated on a small node subset — stresses cell churn.
    DenseTail,
}

/// Generation errors. All map to usage errors at the CLI boundary.
#[derive(Debug, Clone, Error)]
pub enum GenError {
    #[error("cannot fit {m} distinct edges: {kind} capacity for n = {n} is {cap}")]
    TooManyEdges {
        kind: &'static str,
        n: usize,
        m: usize,
        cap: usize,
    },
    #[error("node count must be at least 1")]
    NoNodes,
}

/// Generate a trace of `m` distinct edges over `n` nodes.
pub fn generate(kind: TraceKind, n: usize, m: usize, seed: u64) -> Result<Trace, GenError> {
    if n == 0 {
        return Err(GenError::NoNodes);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        TraceKind::Random => {
            check_cap("random", n, m, n * (n - 1))?;
            let events = distinct_pairs(&mut rng, n, m, |u, v| (u, v));
            Ok(Trace::new(n, events))
        }
        TraceKind::RandomAcyclic => {
            check_cap("random_acyclic", n, m, n * (n - 1) / 2)?;
            // Hidden permutation: rank[x] is x's position; every emitted
            // edge goes from lower to higher rank, so no cycle can close.
            let mut perm: Vec<NodeId> = (0..n as NodeId).collect();
            perm.shuffle(&mut rng);
            let mut rank = vec![0usize; n];
            for (pos, &x) in perm.iter().enumerate() {
                rank[x as usize] = pos;
            }
            let events = distinct_pairs(&mut rng, n, m, |u, v| {
                if rank[u as usize] < rank[v as usize] {
                    (u, v)
                } else {
                    (v, u)
                }
            });
            Ok(Trace::new(n, events))
        }
        TraceKind::Path => {
            check_cap("path", n, m, n * (n - 1))?;
            let chain = m.min(n - 1);
            let mut events: Vec<(NodeId, NodeId)> = (0..chain)
                .map(|i| (i as NodeId, i as NodeId + 1))
                .collect();
            let taken: HashSet<(NodeId, NodeId)> = events.iter().copied().collect();
            let extra = distinct_pairs_excluding(&mut rng, n, m - chain, taken);
            events.extend(extra);
            Ok(Trace::new(n, events))
        }
        TraceKind::DenseTail => {
            // The tail subset is the first `s` ids; capacity is whatever
            // the subset holds plus the rest of the full pair space.
            check_cap("dense_tail", n, m, n * (n - 1))?;
            let s = (n / 8).max(2).min(n);
            let prefix_len = m / 2;
            let tail_cap = s * (s - 1);
            let mut events = distinct_pairs(&mut rng, n, prefix_len, |u, v| (u, v));
            let taken: HashSet<(NodeId, NodeId)> = events.iter().copied().collect();
            let in_tail = taken
                .iter()
                .filter(|(u, v)| (*u as usize) < s && (*v as usize) < s)
                .count();
            let want_tail = (m - prefix_len).min(tail_cap - in_tail);
            let tail = distinct_pairs_excluding_in(&mut rng, s, want_tail, taken.clone());
            events.extend(tail.iter().copied());
            let mut taken = taken;
            taken.extend(tail);
            // Spill whatever the subset could not absorb back onto the
            // full node set so the requested length is always met.
            let spill = m - events.len();
            events.extend(distinct_pairs_excluding(&mut rng, n, spill, taken));
            Ok(Trace::new(n, events))
        }
    }
}

fn check_cap(kind: &'static str, n: usize, m: usize, cap: usize) -> Result<(), GenError> {
    if m > cap {
        Err(GenError::TooManyEdges { kind, n, m, cap })
    } else {
        Ok(())
    }
}

/// Draw `m` distinct non-loop pairs, each mapped through `orient` before
/// dedup. Rejection sampling while the pair space is mostly free,
/// exhaustive shuffle once it gets crowded.
fn distinct_pairs(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    orient: impl Fn(NodeId, NodeId) -> (NodeId, NodeId),
) -> Vec<(NodeId, NodeId)> {
    let mut out = Vec::with_capacity(m);
    let mut seen: HashSet<(NodeId, NodeId)> = HashSet::new();
    let cap = n * (n - 1);
    while out.len() < m {
        if seen.len() * 2 >= cap {
            // Crowded: enumerate the leftovers and shuffle them.
            let mut rest: Vec<(NodeId, NodeId)> = Vec::new();
            for u in 0..n as NodeId {
                for v in 0..n as NodeId {
                    if u == v {
                        continue;
                    }
                    let e = orient(u, v);
                    if !seen.contains(&e) {
                        rest.push(e);
                    }
                }
            }
            rest.sort_unstable();
            rest.dedup();
            rest.shuffle(rng);
            for e in rest {
                if out.len() == m {
                    break;
                }
                seen.insert(e);
                out.push(e);
            }
            break;
        }
        let u = rng.random_range(0..n) as NodeId;
        let v = rng.random_range(0..n) as NodeId;
        if u == v {
            continue;
        }
        let e = orient(u, v);
        if seen.insert(e) {
            out.push(e);
        }
    }
    assert_eq!(out.len(), m, "capacity was checked up front");
    out
}

fn distinct_pairs_excluding(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    taken: HashSet<(NodeId, NodeId)>,
) -> Vec<(NodeId, NodeId)> {
    let mut seen = taken;
    let mut out = Vec::with_capacity(m);
    let cap = n * (n - 1);
    while out.len() < m {
        if seen.len() * 2 >= cap {
            let mut rest: Vec<(NodeId, NodeId)> = Vec::new();
            for u in 0..n as NodeId {
                for v in 0..n as NodeId {
                    if u != v && !seen.contains(&(u, v)) {
                        rest.push((u, v));
                    }
                }
            }
            rest.shuffle(rng);
            for e in rest {
                if out.len() == m {
                    break;
                }
                seen.insert(e);
                out.push(e);
            }
            break;
        }
        let u = rng.random_range(0..n) as NodeId;
        let v = rng.random_range(0..n) as NodeId;
        if u != v && seen.insert((u, v)) {
            out.push((u, v));
        }
    }
    assert_eq!(out.len(), m, "capacity was checked up front");
    out
}

/// Like [`distinct_pairs_excluding`] but drawing both endpoints from
/// `0..s` only.
fn distinct_pairs_excluding_in(
    rng: &mut ChaCha8Rng,
    s: usize,
    m: usize,
    taken: HashSet<(NodeId, NodeId)>,
) -> Vec<(NodeId, NodeId)> {
    let mut seen = taken;
    let mut out = Vec::with_capacity(m);
    let cap = s * (s - 1);
    let in_subset = seen
        .iter()
        .filter(|(u, v)| (*u as usize) < s && (*v as usize) < s)
        .count();
    assert!(m + in_subset <= cap, "caller sized the subset demand");
    while out.len() < m {
        let subset_used = in_subset + out.len();
        if subset_used * 2 >= cap {
            let mut rest: Vec<(NodeId, NodeId)> = Vec::new();
            for u in 0..s as NodeId {
                for v in 0..s as NodeId {
                    if u != v && !seen.contains(&(u, v)) {
                        rest.push((u, v));
                    }
                }
            }
            rest.shuffle(rng);
            for e in rest {
                if out.len() == m {
                    break;
                }
                seen.insert(e);
                out.push(e);
            }
            break;
        }
        let u = rng.random_range(0..s) as NodeId;
        let v = rng.random_range(0..s) as NodeId;
        if u != v && seen.insert((u, v)) {
            out.push((u, v));
        }
    }
    assert_eq!(out.len(), m, "capacity was checked up front");
    out
}
