//! Benchmark and verification harness for the incremental
//! cycle-detection engine.
//!
//! Four commands, each usable as a library function so the test suites can
//! drive them in-process:
//!
//! - [`gen`]: deterministic trace generation (`random`, `random-acyclic`,
//!   `path`, `dense-tail`).
//! - [`run`]: replay a trace through the engine (balanced or forward-only
//!   search) or the naive re-sort baseline, with per-insertion CSV metrics.
//! - [`verify`]: lockstep engine-vs-oracle replay across seeds, dumping a
//!   reproducer prefix on the first divergence.
//! - [`scaling`]: the whole-run accounting measurement across instance
//!   sizes, emitting ratio columns that must stay flat as n grows.

pub mod gen;
pub mod naive;
pub mod run;
pub mod scaling;
pub mod verify;
