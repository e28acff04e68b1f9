//! `inctopo` — incremental cycle detection benchmark harness.
//!
//! Exit codes: 0 success / verification pass, 1 verification failure,
//! 2 usage or I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use inctopo_cli::gen::{self, TraceKind};
use inctopo_cli::run::{self, Algo, RunOptions};
use inctopo_cli::scaling;
use inctopo_cli::verify;

#[derive(Parser)]
#[command(
    name = "inctopo",
    about = "Incremental cycle detection and topological ordering benchmark harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a deterministic edge-insertion trace.
    Gen {
        /// Workload shape.
        #[arg(long, value_enum, default_value = "random")]
        kind: TraceKind,
        /// Node count.
        #[arg(long)]
        n: usize,
        /// Edge count (all generators emit distinct edges).
        #[arg(long)]
        m: usize,
        /// Generator seed; same arguments give byte-identical files.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a trace through an algorithm and report metrics.
    Run {
        /// Trace file to replay.
        trace: PathBuf,
        /// Algorithm: the sampled engine, the naive re-sort baseline, or
        /// the one-sided search variant.
        #[arg(long, value_enum, default_value = "sampled")]
        algo: Algo,
        /// Explicit grouping parameter (trumps --m-hint).
        #[arg(long)]
        tau: Option<usize>,
        /// Expected insertion count for deriving the grouping parameter;
        /// defaults to the trace length.
        #[arg(long)]
        m_hint: Option<usize>,
        /// Sampling seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write one CSV row per insertion to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Cross-check the engine against the brute-force oracle.
    Verify {
        /// Trace file to check.
        trace: PathBuf,
        /// Number of sampling seeds to try (each also rotates the τ
        /// regime).
        #[arg(long, default_value_t = 4)]
        seeds: u64,
    },
    /// Measure the whole-run accounting sums across instance sizes.
    Scaling {
        /// Node counts, comma separated (e.g. 256,512,1024,2048).
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Edges per node: each run inserts density*n edges.
        #[arg(long, default_value_t = 4)]
        density: usize,
        /// Seeds per node count.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen {
            kind,
            n,
            m,
            seed,
            out,
        } => {
            let trace = gen::generate(kind, n, m, seed)?;
            match out {
                Some(path) => trace.write_file(&path)?,
                None => print!("{}", trace.to_text()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Run {
            trace,
            algo,
            tau,
            m_hint,
            seed,
            csv,
        } => {
            let mut opts = RunOptions::new(algo);
            opts.tau = tau;
            opts.m_hint = m_hint;
            opts.seed = seed;
            opts.csv = csv;
            let report = run::cmd_run(&trace, &opts)?;
            print!("{}", report.render());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { trace, seeds } => {
            let outcome = verify::cmd_verify(&trace, seeds)?;
            print!("{}", outcome.render());
            Ok(if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Scaling {
            n,
            density,
            seeds,
            out,
        } => {
            scaling::cmd_scaling(&n, density, seeds, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
