//! Per-question event log.
//!
//! Every pipeline step appends one event. Events carry a logical tick
//! rather than wall-clock time so that runs with identical inputs and seeds
//! produce byte-identical trace files. Traces are written one JSON record
//! per line.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Why a document-level escalation happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EscalateReason {
    /// The current document's chunks were exhausted.
    ChunksExhausted,
    /// th2 chunk-level rejections accumulated.
    RethinkSchedule,
}

/// Why retrieval gave up on a sub-question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GiveUpReason {
    /// Sparse retrieval ran out of matching titles.
    DocumentsExhausted,
    /// The rethink budget th3 was spent.
    RethinkBudget,
    /// Online search produced nothing usable for the rewritten question.
    OnlineMiss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceEventKind {
    Decompose {
        raw: String,
    },
    Judge {
        solvable: bool,
    },
    Entity {
        question: String,
        entity: String,
    },
    SparseHit {
        entity: String,
        title: String,
        score: f64,
        rank: usize,
    },
    Ambiguity {
        entity: String,
        count: usize,
        threshold: usize,
        triggered: bool,
    },
    Rewrite {
        original: String,
        rewritten: String,
        supplement: String,
    },
    DenseHit {
        title: String,
        ordinal: usize,
        score: f64,
        rank: usize,
    },
    Filter {
        can_solve: bool,
        response: String,
    },
    Gate {
        t: usize,
        m: usize,
        probability: f64,
        fired: bool,
    },
    EscalateDoc {
        doc_rank: usize,
        reason: EscalateReason,
    },
    InternalAnswer {
        answer: String,
    },
    OnlineAnswer {
        url: String,
        accepted: bool,
        answer: String,
    },
    GiveUp {
        reason: GiveUpReason,
        rethinks: usize,
    },
    Summarize {
        answer: String,
        forced: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    /// Logical tick, monotonically increasing per question.
    pub ts: u64,
    #[serde(flatten)]
    pub event: TraceEventKind,
}

/// Append-only event log for one question.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceLog {
    events: Vec<TraceEvent>,
}

impl TraceLog {
    pub fn new() -> Self {
        TraceLog::default()
    }

    pub fn push(&mut self, event: TraceEventKind) {
        let ts = self.events.len() as u64;
        self.events.push(TraceEvent { ts, event });
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn into_events(self) -> Vec<TraceEvent> {
        self.events
    }

    pub fn count(&self, pred: impl Fn(&TraceEventKind) -> bool) -> usize {
        self.events.iter().filter(|e| pred(&e.event)).count()
    }

    /// Write one JSON record per line.
    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        write_events_jsonl(path, &self.events)
    }
}

/// Write an event slice as line-delimited JSON.
pub fn write_events_jsonl(path: &Path, events: &[TraceEvent]) -> Result<()> {
    let file =
        std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = std::io::BufWriter::new(file);
    for event in events {
        let line = serde_json::to_string(event).map_err(|e| Error::Json {
            path: path.display().to_string(),
            source: e,
        })?;
        writeln!(w, "{line}").map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}
