//! Batch evaluation: fan questions out over a worker pool, persist
//! predictions incrementally, score the run.
//!
//! Results are flushed to the predictions file in dataset order (a worker's
//! finished answer waits until all earlier ones have been written), so runs
//! with the same config and seed produce byte-identical outputs regardless
//! of scheduling, and an interrupted run leaves a clean prefix behind for
//! `--resume`. A question whose pipeline aborts is recorded as an empty
//! prediction and the run continues; the failure is reported in the
//! outcome.

use std::collections::{BTreeMap, HashMap};
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};

use super::{evaluate_run, ExampleScore, MetricsReport, QAExample};
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::pipeline::{answer_question, trace::write_events_jsonl, PipelineDeps};

pub const PREDICTIONS_FILE: &str = "predictions.jsonl";
pub const REPORT_FILE: &str = "report.json";
pub const TRACES_DIR: &str = "traces";

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub concurrency: usize,
    /// Skip questions already present in the run directory's predictions.
    pub resume: bool,
    pub write_traces: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            concurrency: 1,
            resume: false,
            write_traces: true,
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: MetricsReport,
    pub rows: Vec<ExampleScore>,
    /// Questions whose pipeline aborted, with the error text. They score
    /// as empty predictions.
    pub failures: Vec<(String, String)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PredictionRecord {
    id: String,
    answer: String,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    report: &'a MetricsReport,
    examples: &'a [ExampleScore],
}

/// Run the pipeline over `examples`, writing predictions, traces and the
/// report under `run_dir`.
pub fn run_batch<S: Scalar>(
    examples: &[QAExample],
    deps: &PipelineDeps<'_, S>,
    run_dir: &Path,
    options: &RunOptions,
) -> Result<RunOutcome> {
    std::fs::create_dir_all(run_dir).map_err(|e| Error::io(run_dir.display().to_string(), e))?;
    let traces_dir = run_dir.join(TRACES_DIR);
    if options.write_traces {
        std::fs::create_dir_all(&traces_dir)
            .map_err(|e| Error::io(traces_dir.display().to_string(), e))?;
    }

    let predictions_path = run_dir.join(PREDICTIONS_FILE);
    let mut predictions: HashMap<String, String> = HashMap::new();
    if options.resume && predictions_path.exists() {
        for (id, answer) in read_predictions(&predictions_path)? {
            predictions.insert(id, answer);
        }
        log::info!("resuming: {} predictions already present", predictions.len());
    } else if predictions_path.exists() {
        std::fs::remove_file(&predictions_path)
            .map_err(|e| Error::io(predictions_path.display().to_string(), e))?;
    }

    let pending: Vec<(usize, &QAExample)> = examples
        .iter()
        .enumerate()
        .filter(|(_, e)| !predictions.contains_key(&e.id))
        .collect();

    let mut failures: Vec<(String, String)> = Vec::new();
    if !pending.is_empty() {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&predictions_path)
            .map_err(|e| Error::io(predictions_path.display().to_string(), e))?;
        let mut out = std::io::BufWriter::new(file);

        let workers = options.concurrency.max(1).min(pending.len());
        let next = AtomicUsize::new(0);
        let (tx, rx) = mpsc::channel::<(usize, String, String, Option<String>)>();

        std::thread::scope(|scope| -> Result<()> {
            for _ in 0..workers {
                let tx = tx.clone();
                let next = &next;
                let pending = &pending;
                let traces_dir = &traces_dir;
                scope.spawn(move || loop {
                    let slot = next.fetch_add(1, Ordering::Relaxed);
                    if slot >= pending.len() {
                        break;
                    }
                    let (_, example) = pending[slot];
                    let (answer, failure) =
                        match answer_question(&example.id, &example.question, deps) {
                            Ok(result) => {
                                if options.write_traces {
                                    let path = traces_dir.join(format!("{}.jsonl", example.id));
                                    if let Err(e) = result.trace.write_jsonl(&path) {
                                        log::error!("failed to write trace for {}: {e}", example.id);
                                    }
                                }
                                (result.final_answer, None)
                            }
                            Err(e) => {
                                if options.write_traces {
                                    if let Error::PipelineAborted { trace, .. } = &e {
                                        let path =
                                            traces_dir.join(format!("{}.jsonl", example.id));
                                        let _ = write_events_jsonl(&path, trace);
                                    }
                                }
                                log::error!("question {} aborted: {e}", example.id);
                                (String::new(), Some(e.to_string()))
                            }
                        };
                    if tx.send((slot, example.id.clone(), answer, failure)).is_err() {
                        break;
                    }
                });
            }
            drop(tx);

            // Flush in dataset order: buffer out-of-order completions until
            // their turn.
            let mut buffered: BTreeMap<usize, (String, String, Option<String>)> = BTreeMap::new();
            let mut next_flush = 0usize;
            for (slot, id, answer, failure) in rx {
                buffered.insert(slot, (id, answer, failure));
                while let Some((id, answer, failure)) = buffered.remove(&next_flush) {
                    let record = PredictionRecord {
                        id: id.clone(),
                        answer: answer.clone(),
                    };
                    let line = serde_json::to_string(&record).map_err(|e| Error::Json {
                        path: predictions_path.display().to_string(),
                        source: e,
                    })?;
                    writeln!(out, "{line}")
                        .map_err(|e| Error::io(predictions_path.display().to_string(), e))?;
                    out.flush()
                        .map_err(|e| Error::io(predictions_path.display().to_string(), e))?;
                    predictions.insert(id.clone(), answer);
                    if let Some(message) = failure {
                        failures.push((id, message));
                    }
                    next_flush += 1;
                }
            }
            Ok(())
        })?;
    }

    let (report, rows) = evaluate_run(&predictions, examples);
    let report_path = run_dir.join(REPORT_FILE);
    crate::corpus::write_json_file(
        &report_path,
        &ReportFile {
            report: &report,
            examples: &rows,
        },
    )?;
    Ok(RunOutcome {
        report,
        rows,
        failures,
    })
}

pub fn read_predictions(path: &Path) -> Result<Vec<(String, String)>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PredictionRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                line: idx + 1,
                message: e.to_string(),
            })?;
        records.push((record.id, record.answer));
    }
    Ok(records)
}

pub fn predictions_path(run_dir: &Path) -> PathBuf {
    run_dir.join(PREDICTIONS_FILE)
}
