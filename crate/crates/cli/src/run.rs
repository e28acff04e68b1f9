//! The `run` command: replay one trace through a chosen algorithm, emit
//! per-insertion metrics as CSV, and print a summary report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;

use inctopo_core::{
    Engine, EngineConfig, InsertVerdict, InsertionRow, Metrics, SearchStrategy, Trace,
};

use crate::naive;

/// Exact column header of the per-insertion metrics CSV.
pub const METRICS_CSV_HEADER: &str =
    "idx,u,v,verdict,terminator,t_l,phase1_work,phase2_moves,phase3_explored,phase4_placed,nanos";

/// Which algorithm replays the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// The incremental engine with balanced bidirectional search.
    Sampled,
    /// Full static re-sort per insertion.
    Naive,
    /// The incremental engine with one-sided forward search.
    #[value(alias = "forward_only")]
    ForwardOnly,
}

/// Options shared by `run` and the harnesses that embed it.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub algo: Algo,
    /// Explicit grouping parameter; trumps `m_hint`.
    pub tau: Option<usize>,
    /// Expected insertion count for τ derivation; defaults to the trace
    /// length, which a benchmark harness always knows.
    pub m_hint: Option<usize>,
    pub seed: u64,
    /// Destination for the per-insertion CSV; omit to skip writing.
    pub csv: Option<PathBuf>,
}

impl RunOptions {
    pub fn new(algo: Algo) -> Self {
        RunOptions {
            algo,
            tau: None,
            m_hint: None,
            seed: 0,
            csv: None,
        }
    }
}

/// Run summary printed to stdout and consumed by tests.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub trace_path: String,
    pub n: usize,
    pub m: usize,
    /// Resolved grouping parameter; `None` for the naive baseline.
    pub tau: Option<usize>,
    pub seed: u64,
    pub algo: Algo,
    /// 1-based index of the first cycle verdict, if any.
    pub verdict_index: Option<u64>,
    pub sum_t: u64,
    pub sum_t2: u64,
    pub max_t: u64,
    pub phase1_work: u64,
    pub phase2_moves: u64,
    pub init_moves: u64,
    pub phase3_explored: u64,
    pub phase4_placed: u64,
    pub phase_nanos: [u64; 4],
    /// Phase-two moves (seeding included) against the `2·n·|S|` budget;
    /// `None` for the naive baseline.
    pub move_budget: Option<(u64, u64)>,
    pub rows: usize,
}

impl RunReport {
    /// Human-readable summary, one fact per line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "trace: {} (n={}, m={})",
            self.trace_path, self.n, self.m
        );
        let algo = match self.algo {
            Algo::Sampled => "sampled",
            Algo::Naive => "naive",
            Algo::ForwardOnly => "forward-only",
        };
        match self.tau {
            Some(tau) => {
                let _ = writeln!(s, "algo: {algo}  tau: {tau}  seed: {}", self.seed);
            }
            None => {
                let _ = writeln!(s, "algo: {algo}");
            }
        }
        match self.verdict_index {
            Some(idx) => {
                let _ = writeln!(s, "verdict: cycle at insertion {idx}");
            }
            None => {
                let _ = writeln!(s, "verdict: acyclic after {} insertions", self.rows);
            }
        }
        let _ = writeln!(
            s,
            "search: sum_t={} sum_t2={} max_t={}",
            self.sum_t, self.sum_t2, self.max_t
        );
        let _ = writeln!(
            s,
            "work: phase1={} phase2={} (+{} seeding) phase3={} phase4={}",
            self.phase1_work,
            self.phase2_moves,
            self.init_moves,
            self.phase3_explored,
            self.phase4_placed
        );
        let _ = writeln!(
            s,
            "nanos: phase1={} phase2={} phase3={} phase4={}",
            self.phase_nanos[0], self.phase_nanos[1], self.phase_nanos[2], self.phase_nanos[3]
        );
        if let Some((used, budget)) = self.move_budget {
            let verdict = if used <= budget { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "move_budget: {verdict} ({used} <= {budget})");
        }
        s
    }
}

/// Replay `trace` under `opts`; returns the report and, when requested,
/// writes the per-insertion CSV.
pub fn run_trace(trace: &Trace, trace_path: &str, opts: &RunOptions) -> Result<RunReport> {
    let report = match opts.algo {
        Algo::Naive => {
            let out = naive::run(trace);
            write_csv_if(&opts.csv, &out.rows)?;
            RunReport {
                trace_path: trace_path.to_string(),
                n: trace.n,
                m: trace.events.len(),
                tau: None,
                seed: opts.seed,
                algo: opts.algo,
                verdict_index: out.first_cycle,
                sum_t: 0,
                sum_t2: 0,
                max_t: 0,
                phase1_work: 0,
                phase2_moves: 0,
                init_moves: 0,
                phase3_explored: 0,
                phase4_placed: 0,
                phase_nanos: [0; 4],
                move_budget: None,
                rows: out.rows.len(),
            }
        }
        Algo::Sampled | Algo::ForwardOnly => {
            let mut cfg = EngineConfig::new(trace.n);
            cfg.seed = opts.seed;
            cfg.tau_override = opts.tau;
            cfg.m_hint = Some(
                opts.m_hint
                    .unwrap_or_else(|| trace.events.len().max(1)),
            );
            cfg.strategy = match opts.algo {
                Algo::ForwardOnly => SearchStrategy::ForwardOnly,
                _ => SearchStrategy::Balanced,
            };
            let mut eng = Engine::new(cfg)?;
            let mut verdict_index = None;
            for (k, &(u, v)) in trace.events.iter().enumerate() {
                let res = eng.insert_edge(u, v)?;
                if res.verdict == InsertVerdict::CycleDetected && verdict_index.is_none() {
                    verdict_index = Some((k + 1) as u64);
                }
            }
            let metrics: &Metrics = eng.metrics();
            write_csv_if(&opts.csv, &metrics.rows)?;
            let budget = 2 * trace.n as u64 * eng.samples().len() as u64;
            RunReport {
                trace_path: trace_path.to_string(),
                n: trace.n,
                m: trace.events.len(),
                tau: Some(eng.tau()),
                seed: opts.seed,
                algo: opts.algo,
                verdict_index,
                sum_t: metrics.sum_t,
                sum_t2: metrics.sum_t2,
                max_t: metrics.max_t,
                phase1_work: metrics.phase1_work,
                phase2_moves: metrics.phase2_moves,
                init_moves: eng.total_moves().saturating_sub(metrics.phase2_moves),
                phase3_explored: metrics.phase3_explored,
                phase4_placed: metrics.phase4_placed,
                phase_nanos: [
                    metrics.phase1_nanos,
                    metrics.phase2_nanos,
                    metrics.phase3_nanos,
                    metrics.phase4_nanos,
                ],
                move_budget: Some((eng.total_moves(), budget)),
                rows: metrics.rows.len(),
            }
        }
    };
    Ok(report)
}

/// Load the trace and run it; the `run` subcommand body.
pub fn cmd_run(trace_path: &Path, opts: &RunOptions) -> Result<RunReport> {
    let trace = Trace::read_file(trace_path)
        .with_context(|| format!("reading trace {}", trace_path.display()))?;
    run_trace(&trace, &trace_path.display().to_string(), opts)
}

/// Serialize rows under the fixed header.
pub fn metrics_csv(rows: &[InsertionRow]) -> String {
    let mut s = String::with_capacity(rows.len() * 48 + METRICS_CSV_HEADER.len() + 1);
    s.push_str(METRICS_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let verdict = match r.verdict {
            InsertVerdict::Acyclic => "acyclic",
            InsertVerdict::CycleDetected => "cycle",
        };
        let terminator = r.terminator.map_or("-", |t| t.token());
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.idx,
            r.u,
            r.v,
            verdict,
            terminator,
            r.t,
            r.phase1_work,
            r.phase2_moves,
            r.phase3_explored,
            r.phase4_placed,
            r.nanos
        );
    }
    s
}

fn write_csv_if(path: &Option<PathBuf>, rows: &[InsertionRow]) -> Result<()> {
    if let Some(path) = path {
        fs::write(path, metrics_csv(rows))
            .with_context(|| format!("writing metrics CSV {}", path.display()))?;
    }
    Ok(())
}
