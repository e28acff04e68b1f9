//! The `verify` command: cross-check the engine against the brute-force
//! oracle on one trace, across several seeds and τ regimes.
//!
//! Per seed, the trace is replayed twice in lockstep — once through the
//! engine (with its internal search checks enabled), once through the
//! oracle — and every divergence is reported: verdict mismatches, a stored
//! edge pointing backward in the maintained order, an invalid final order,
//! or a blown relocation budget. On the first divergence the offending
//! prefix is dumped next to the input trace as a standalone reproducer.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use inctopo_core::oracle;
use inctopo_core::{Engine, EngineConfig, InsertVerdict, NodeId, Trace};

/// One seed's divergence, if any.
#[derive(Debug, Clone)]
pub struct VerifyFailure {
    pub seed: u64,
    /// 1-based index of the first diverging insertion.
    pub at_index: u64,
    pub message: String,
    /// Where the reproducer prefix was written, when writing succeeded.
    pub repro_path: Option<PathBuf>,
}

/// Aggregate outcome across seeds.
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub seeds: u64,
    pub insertions_checked: u64,
    pub failures: Vec<VerifyFailure>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Human-readable report, one line per seed outcome.
    pub fn render(&self) -> String {
        let mut s = String::new();
        if self.passed() {
            let _ = writeln!(
                s,
                "verify: PASS ({} seeds, {} insertions checked)",
                self.seeds, self.insertions_checked
            );
        } else {
            for f in &self.failures {
                let _ = writeln!(
                    s,
                    "verify: FAIL seed={} at insertion {}: {}",
                    f.seed, f.at_index, f.message
                );
                if let Some(p) = &f.repro_path {
                    let _ = writeln!(s, "  reproducer written to {}", p.display());
                }
            }
            let _ = writeln!(
                s,
                "verify: FAIL ({} of {} seeds diverged)",
                self.failures.len(),
                self.seeds
            );
        }
        s
    }
}

/// Engine configuration for one verification seed. Seeds rotate through
/// three τ regimes — the default `m = n` derivation, τ derived from the
/// true trace length, and the coarsest τ = n — so partition behavior gets
/// exercised at several granularities.
fn config_for_seed(n: usize, m: usize, seed: u64) -> EngineConfig {
    let mut cfg = EngineConfig::new(n);
    cfg.seed = seed;
    cfg.debug_checks = true;
    cfg.record_cycle_path = true;
    cfg.m_hint = match seed % 3 {
        0 => None,
        1 => Some(m.max(1)),
        _ => Some(1),
    };
    cfg
}

/// Replay and cross-check under `seeds` distinct seeds.
pub fn cmd_verify(trace_path: &Path, seeds: u64) -> Result<VerifyOutcome> {
    let trace = Trace::read_file(trace_path)
        .with_context(|| format!("reading trace {}", trace_path.display()))?;
    let mut outcome = VerifyOutcome {
        seeds,
        insertions_checked: 0,
        failures: Vec::new(),
    };
    for seed in 0..seeds {
        if let Some((at_index, message)) =
            verify_one(&trace, config_for_seed(trace.n, trace.events.len(), seed))
        {
            let repro_path = dump_reproducer(trace_path, &trace, seed, at_index).ok();
            outcome.failures.push(VerifyFailure {
                seed,
                at_index,
                message,
                repro_path,
            });
        } else {
            outcome.insertions_checked += trace.events.len() as u64;
        }
    }
    Ok(outcome)
}

/// One seed's lockstep replay. Returns the first divergence as
/// `(1-based index, message)`, or `None` on a clean pass. Exposed so the
/// test suites can drive it on in-memory traces.
pub fn verify_one(trace: &Trace, cfg: EngineConfig) -> Option<(u64, String)> {
    let n = trace.n;
    let mut eng = match Engine::new(cfg) {
        Ok(e) => e,
        Err(e) => return Some((0, format!("engine construction failed: {e}"))),
    };
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut oracle_cyclic = false;

    for (k, &(u, v)) in trace.events.iter().enumerate() {
        let idx = (k + 1) as u64;
        let res = match eng.insert_edge(u, v) {
            Ok(r) => r,
            Err(e) => return Some((idx, format!("insert_edge({u}, {v}) failed: {e}"))),
        };
        edges.push((u, v));
        if !oracle_cyclic {
            oracle_cyclic = oracle::has_cycle(n, &edges);
        }
        let expect = if oracle_cyclic {
            InsertVerdict::CycleDetected
        } else {
            InsertVerdict::Acyclic
        };
        if res.verdict != expect {
            return Some((
                idx,
                format!("verdict mismatch on ({u}, {v}): engine {:?}, reference {expect:?}", res.verdict),
            ));
        }
        if oracle_cyclic {
            continue;
        }
        // The maintained order must keep every stored edge forward.
        for &(x, y) in &edges {
            match eng.is_before(x, y) {
                Ok(true) => {}
                Ok(false) => {
                    return Some((idx, format!("stored edge ({x}, {y}) points backward")))
                }
                Err(e) => return Some((idx, format!("is_before({x}, {y}) failed: {e}"))),
            }
        }
        let order = match eng.current_order() {
            Ok(o) => o,
            Err(e) => return Some((idx, format!("current_order failed: {e}"))),
        };
        if !oracle::is_valid_topo(&order, &edges) {
            return Some((idx, "maintained order fails the validity check".to_string()));
        }
        let budget = 2 * n as u64 * eng.samples().len() as u64;
        if eng.total_moves() > budget {
            return Some((
                idx,
                format!(
                    "relocation budget exceeded: {} > {budget}",
                    eng.total_moves()
                ),
            ));
        }
    }
    None
}

/// Write the failing prefix as `<trace>.repro-seed<seed>.trace` next to
/// the input.
fn dump_reproducer(
    trace_path: &Path,
    trace: &Trace,
    seed: u64,
    at_index: u64,
) -> Result<PathBuf> {
    let prefix = Trace::new(
        trace.n,
        trace.events[..at_index as usize].to_vec(),
    );
    let mut name = trace_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".to_string());
    let _ = write!(name, ".repro-seed{seed}.trace");
    let path = trace_path.with_file_name(name);
    prefix
        .write_file(&path)
        .with_context(|| format!("writing reproducer {}", path.display()))?;
    Ok(path)
}
