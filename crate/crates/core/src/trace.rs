//! Edge-insertion traces and their on-disk text format.
//!
//! A trace is the full input to one engine run: a node count and an ordered
//! list of edge-insertion events. The text format is line-oriented UTF-8:
//! the first content line is `n <node-count>`, every following content line
//! is one event `u v` with whitespace-separated decimal node ids, and lines
//! starting with `#` are comments. Events keep their file order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::graph_core::NodeId;

/// An ordered sequence of edge-insertion events over nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// Number of nodes; every event id is strictly below this.
    pub n: usize,
    /// Edge-insertion events in insertion order.
    pub events: Vec<(NodeId, NodeId)>,
}

/// Failure while reading or parsing a trace file.
#[derive(Debug, Error)]
pub enum TraceError {
    /// The file text does not follow the trace format; reports the offending
    /// 1-based line number.
    #[error("trace line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    /// Underlying filesystem failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Trace {
    /// Build a trace from parts, checking that every event id is below `n`.
    ///
    /// # Panics
    /// Panics if an event references a node id `>= n`; traces with undeclared
    /// nodes are never meaningful.
    pub fn new(n: usize, events: Vec<(NodeId, NodeId)>) -> Self {
        for &(u, v) in &events {
            assert!(
                (u as usize) < n && (v as usize) < n,
                "trace event ({u}, {v}) out of range for n = {n}"
            );
        }
        Trace { n, events }
    }

    /// Parse a trace from its text representation.
    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let mut n: Option<usize> = None;
        let mut events = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let mut tokens = content.split_whitespace();

            match n {
                None => {
                    if tokens.next() != Some("n") {
                        return Err(TraceError::Malformed {
                            line,
                            msg: "expected header `n <node-count>`".to_string(),
                        });
                    }
                    let count = tokens
                        .next()
                        .and_then(|t| t.parse::<usize>().ok())
                        .ok_or_else(|| TraceError::Malformed {
                            line,
                            msg: "expected a decimal node count after `n`".to_string(),
                        })?;
                    if tokens.next().is_some() {
                        return Err(TraceError::Malformed {
                            line,
                            msg: "trailing tokens after node count".to_string(),
                        });
                    }
                    n = Some(count);
                }
                Some(count) => {
                    let parse_id = |tok: Option<&str>| -> Result<NodeId, TraceError> {
                        let id = tok
                            .and_then(|t| t.parse::<NodeId>().ok())
                            .ok_or_else(|| TraceError::Malformed {
                                line,
                                msg: "expected two decimal node ids".to_string(),
                            })?;
                        if id as usize >= count {
                            return Err(TraceError::Malformed {
                                line,
                                msg: format!("node id {id} out of range for n = {count}"),
                            });
                        }
                        Ok(id)
                    };
                    let u = parse_id(tokens.next())?;
                    let v = parse_id(tokens.next())?;
                    if tokens.next().is_some() {
                        return Err(TraceError::Malformed {
                            line,
                            msg: "trailing tokens after event".to_string(),
                        });
                    }
                    events.push((u, v));
                }
            }
        }

        match n {
            Some(count) => Ok(Trace { n: count, events }),
            None => Err(TraceError::Malformed {
                line: text.lines().count() + 1,
                msg: "missing header `n <node-count>`".to_string(),
            }),
        }
    }

    /// Read and parse a trace file.
    pub fn read_file(path: impl AsRef<Path>) -> Result<Self, TraceError> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Render the trace in the text format; `parse` round-trips it exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 + self.events.len() * 8);
        let _ = writeln!(out, "n {}", self.n);
        for &(u, v) in &self.events {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Write the trace to a file in the text format.
    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<(), TraceError> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Number of events.
    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// True if the trace has no events.
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}
