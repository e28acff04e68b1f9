//! The `scaling` command: measure the whole-run search accounting across
//! instance sizes.
//!
//! For each requested node count and seed, a cycle-free trace with
//! `m = density · n` edges is generated and replayed through the engine,
//! and the two accounting sums are reported against their predicted
//! envelopes: Σt² against `n·τ` and Σt against `√(m·n·τ)`. If the engine
//! honors the theory, both ratio columns stay bounded by a constant as `n`
//! grows — that flatness is exactly what the acceptance suite checks.
//!
//! The workload is chosen to stress the bound, not to flatter it:
//!
//! * Cycle-free, because on a cyclic trace everything after the first
//!   cycle is a no-op, so large instances would mostly measure nothing.
//!   The accounting bound covers any insertion sequence for as long as
//!   the graph stays acyclic, so an all-acyclic workload is the one that
//!   actually exercises it.
//! * Anti-aligned and local: every edge points from a higher id to a
//!   lower one at most [`EDGE_GAP`] away, and edges arrive in shuffled
//!   order. The engine seeds its order by ascending id, so essentially
//!   every insertion points backward and keeps the search-and-reorder
//!   path busy at every instance size. A uniform random orientation
//!   instead leaves small instances with almost no same-cell backward
//!   edges, and the ratio columns would measure that sparsity rather
//!   than the engine.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use inctopo_core::{Engine, EngineConfig, NodeId};

/// Header of the scaling CSV (ASCII spellings of the formula columns).
pub const SCALING_CSV_HEADER: &str =
    "n,m,tau,seed,sum_t,sum_t2,n_tau,sqrt_mn_tau,ratio_t2,ratio_t";

/// One (n, seed) measurement.
#[derive(Debug, Clone, Copy)]
pub struct ScalingRow {
    pub n: usize,
    pub m: usize,
    pub tau: usize,
    pub seed: u64,
    pub sum_t: u64,
    pub sum_t2: u64,
    /// The Σt² envelope `n·τ`.
    pub n_tau: f64,
    /// The Σt envelope `√(m·n·τ)`.
    pub sqrt_mn_tau: f64,
    pub ratio_t2: f64,
    pub ratio_t: f64,
}

/// Engine seeds are decorrelated from trace seeds by a fixed xor: both
/// draw from the same stream cipher, and seeding them identically would
/// couple the sampled set to the edge choices.
const ENGINE_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Maximum id distance between the endpoints of a workload edge.
const EDGE_GAP: usize = 64;

/// The measurement workload: `m` distinct edges, each from a higher id to
/// a lower id at most [`EDGE_GAP`] away, in shuffled arrival order.
/// Deterministic in (n, m, seed); always cycle-free (all edges point down
/// the id scale).
fn descending_local_edges(n: usize, m: usize, seed: u64) -> Result<Vec<(NodeId, NodeId)>> {
    let g = EDGE_GAP.min(n.saturating_sub(1));
    // Distinct descending pairs with gap d exist n−d times each.
    let capacity = g * n - g * (g + 1) / 2;
    if n < 2 || m > capacity {
        anyhow::bail!("cannot place {m} distinct bounded-gap edges on {n} nodes");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events: Vec<(NodeId, NodeId)>;
    if m * 2 > capacity {
        // Crowded: rejection sampling would crawl, so enumerate instead.
        events = (1..n)
            .flat_map(|a| (a.saturating_sub(g)..a).map(move |b| (a as NodeId, b as NodeId)))
            .collect();
        events.shuffle(&mut rng);
        events.truncate(m);
    } else {
        let mut seen = HashSet::with_capacity(m * 2);
        events = Vec::with_capacity(m);
        while events.len() < m {
            let a = rng.random_range(0..n);
            let lo = a.saturating_sub(g);
            let hi = (a + g).min(n - 1);
            let b = rng.random_range(lo..=hi);
            if a == b {
                continue;
            }
            let e = (a.max(b) as NodeId, a.min(b) as NodeId);
            if seen.insert(e) {
                events.push(e);
            }
        }
    }
    events.shuffle(&mut rng);
    Ok(events)
}

/// Measure one (n, seed) cell: generate, replay, account.
pub fn measure(n: usize, density: usize, seed: u64) -> Result<ScalingRow> {
    let m = density * n;
    let events = descending_local_edges(n, m, seed)?;
    let mut cfg = EngineConfig::new(n);
    cfg.seed = seed ^ ENGINE_SEED_SALT;
    cfg.m_hint = Some(m.max(1));
    cfg.collect_metrics = false;
    let mut eng = Engine::new(cfg)?;
    for &(u, v) in &events {
        let res = eng.insert_edge(u, v)?;
        debug_assert_eq!(
            res.verdict,
            inctopo_core::InsertVerdict::Acyclic,
            "generated traces are cycle-free"
        );
    }
    let metrics = eng.metrics();
    let tau = eng.tau();
    let n_tau = (n * tau) as f64;
    let sqrt_mn_tau = ((m * n * tau) as f64).sqrt();
    Ok(ScalingRow {
        n,
        m,
        tau,
        seed,
        sum_t: metrics.sum_t,
        sum_t2: metrics.sum_t2,
        n_tau,
        sqrt_mn_tau,
        ratio_t2: metrics.sum_t2 as f64 / n_tau,
        ratio_t: metrics.sum_t as f64 / sqrt_mn_tau,
    })
}

/// Measure every (n, seed) cell in parallel; rows come back sorted by
/// (n, seed) regardless of completion order.
pub fn run_grid(ns: &[usize], density: usize, seeds: u64) -> Result<Vec<ScalingRow>> {
    let cells: Vec<(usize, u64)> = ns
        .iter()
        .flat_map(|&n| (0..seeds).map(move |s| (n, s)))
        .collect();
    let mut rows = cells
        .par_iter()
        .map(|&(n, seed)| measure(n, density, seed))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.seed));
    Ok(rows)
}

/// Serialize rows under the fixed header.
pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut s = String::from(SCALING_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{:.3},{:.3},{:.6},{:.6}",
            r.n,
            r.m,
            r.tau,
            r.seed,
            r.sum_t,
            r.sum_t2,
            r.n_tau,
            r.sqrt_mn_tau,
            r.ratio_t2,
            r.ratio_t
        );
    }
    s
}

/// The `scaling` subcommand body: run the grid, write or print the CSV.
pub fn cmd_scaling(
    ns: &[usize],
    density: usize,
    seeds: u64,
    out: Option<&Path>,
) -> Result<Vec<ScalingRow>> {
    let rows = run_grid(ns, density, seeds)?;
    let csv = scaling_csv(&rows);
    match out {
        Some(path) => fs::write(path, csv)
            .with_context(|| format!("writing scaling CSV {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(rows)
}
