//! Answer normalization, EM / token-level F1 metrics, dataset loading and
//! report aggregation.
//!
//! Normalization follows the de-facto standard for these QA datasets:
//! lowercase, strip (ASCII) punctuation, drop the articles "a", "an",
//! "the", collapse whitespace. Token metrics use multiset overlap; with
//! several acceptable gold answers, each example scores against the gold
//! maximizing F1 (and EM against any).

pub mod runner;

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

/// One dataset entry: a question and its acceptable gold answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QAExample {
    pub id: String,
    pub question: String,
    pub gold_answers: Vec<String>,
}

/// Token-level precision/recall/F1 for one prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf<S> {
    pub precision: S,
    pub recall: S,
    pub f1: S,
}

impl<S: Scalar> Prf<S> {
    fn zero() -> Self {
        Prf {
            precision: S::zero(),
            recall: S::zero(),
            f1: S::zero(),
        }
    }
}

/// Aggregate metrics over a run, each a mean over examples scaled to
/// [0, 100].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub em: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Per-example scoring row kept in the report file for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleScore {
    pub id: String,
    pub prediction: String,
    pub em: u8,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Lowercase, strip punctuation, remove articles, collapse whitespace.
pub fn normalize_answer(s: &str) -> String {
    let lowered = s.to_lowercase();
    let no_punct: String = lowered
        .chars()
        .filter(|c| !c.is_ascii_punctuation())
        .collect();
    no_punct
        .split_whitespace()
        .filter(|tok| !matches!(*tok, "a" | "an" | "the"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn normalized_tokens(s: &str) -> Vec<String> {
    normalize_answer(s)
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

/// 1 iff the normalized prediction equals some normalized gold.
pub fn exact_match(prediction: &str, gold_answers: &[String]) -> u8 {
    let pred = normalize_answer(prediction);
    gold_answers
        .iter()
        .any(|g| normalize_answer(g) == pred) as u8
}

fn multiset_overlap(a: &[String], b: &[String]) -> usize {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for tok in a {
        *counts.entry(tok.as_str()).or_insert(0) += 1;
    }
    let mut overlap = 0;
    for tok in b {
        if let Some(c) = counts.get_mut(tok.as_str()) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    overlap
}

fn prf_single<S: Scalar>(pred_tokens: &[String], gold_tokens: &[String]) -> Prf<S> {
    if pred_tokens.is_empty() || gold_tokens.is_empty() {
        return Prf::zero();
    }
    let overlap = multiset_overlap(pred_tokens, gold_tokens);
    if overlap == 0 {
        return Prf::zero();
    }
    let overlap = S::from_usize_lossy(overlap);
    let precision = overlap / S::from_usize_lossy(pred_tokens.len());
    let recall = overlap / S::from_usize_lossy(gold_tokens.len());
    let two = S::from_usize_lossy(2);
    let f1 = two * precision * recall / (precision + recall);
    Prf {
        precision,
        recall,
        f1,
    }
}

/// Token-level precision/recall/F1 against the gold answer maximizing F1.
pub fn token_prf<S: Scalar>(prediction: &str, gold_answers: &[String]) -> Prf<S> {
    let pred_tokens = normalized_tokens(prediction);
    let mut best = Prf::zero();
    for gold in gold_answers {
        let gold_tokens = normalized_tokens(gold);
        let prf = prf_single::<S>(&pred_tokens, &gold_tokens);
        if prf.f1 > best.f1 {
            best = prf;
        }
    }
    best
}

/// Score a full run. Examples without a prediction score as the empty
/// string (counted, not dropped), so partial runs still produce comparable
/// tables.
pub fn evaluate_run(
    predictions: &HashMap<String, String>,
    examples: &[QAExample],
) -> (MetricsReport, Vec<ExampleScore>) {
    let mut rows = Vec::with_capacity(examples.len());
    let (mut em_sum, mut f1_sum, mut p_sum, mut r_sum) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for example in examples {
        let prediction = predictions
            .get(&example.id)
            .cloned()
            .unwrap_or_default();
        let em = exact_match(&prediction, &example.gold_answers);
        let prf = token_prf::<f64>(&prediction, &example.gold_answers);
        em_sum += em as f64;
        f1_sum += prf.f1;
        p_sum += prf.precision;
        r_sum += prf.recall;
        rows.push(ExampleScore {
            id: example.id.clone(),
            prediction,
            em,
            f1: prf.f1,
            precision: prf.precision,
            recall: prf.recall,
        });
    }
    let n = examples.len();
    let scale = if n == 0 { 0.0 } else { 100.0 / n as f64 };
    let report = MetricsReport {
        n,
        em: em_sum * scale,
        f1: f1_sum * scale,
        precision: p_sum * scale,
        recall: r_sum * scale,
    };
    (report, rows)
}

/// Supported dataset file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    /// Line-delimited JSON records {id, question, answer}.
    Generic,
    /// JSON array of records with `_id`, `question`, `answer`.
    HotpotQA,
    /// JSON array of records with `_id`, `question`, `answer` (same wire
    /// shape as HotpotQA's dev split).
    #[serde(rename = "2wiki")]
    TwoWiki,
    /// Line-delimited JSON with `id`, `question`, `answer` and optional
    /// `answer_aliases`.
    MuSiQue,
    /// CSV with `Question` and `Answer` columns.
    Bamboogle,
}

impl DatasetFormat {
    pub fn parse(name: &str) -> Option<Self> {
        match name.to_lowercase().as_str() {
            "generic" => Some(DatasetFormat::Generic),
            "hotpotqa" => Some(DatasetFormat::HotpotQA),
            "2wiki" | "2wikimultihopqa" => Some(DatasetFormat::TwoWiki),
            "musique" => Some(DatasetFormat::MuSiQue),
            "bamboogle" => Some(DatasetFormat::Bamboogle),
            _ => None,
        }
    }
}

#[derive(Debug, Deserialize)]
struct GenericRecord {
    id: String,
    question: String,
    #[serde(default)]
    answer: Option<String>,
    #[serde(default)]
    answers: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
struct ArrayRecord {
    #[serde(rename = "_id")]
    id: String,
    question: String,
    answer: String,
}

#[derive(Debug, Deserialize)]
struct MusiqueRecord {
    id: String,
    question: String,
    answer: String,
    #[serde(default)]
    answer_aliases: Vec<String>,
}

/// Load a dataset, keeping only id, question and gold answers. Supporting
/// contexts in the source files are ignored: all external knowledge comes
/// from retrieval.
pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<Vec<QAExample>> {
    match format {
        DatasetFormat::Generic => load_jsonl(path, |line, record: GenericRecord| {
            let mut golds = Vec::new();
            if let Some(a) = record.answer {
                golds.push(a);
            }
            if let Some(more) = record.answers {
                golds.extend(more);
            }
            if golds.is_empty() {
                return Err(Error::MalformedRecord {
                    line,
                    message: "record has neither `answer` nor `answers`".to_string(),
                });
            }
            Ok(QAExample {
                id: record.id,
                question: record.question,
                gold_answers: golds,
            })
        }),
        DatasetFormat::HotpotQA | DatasetFormat::TwoWiki => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::io(path.display().to_string(), e))?;
            let records: Vec<ArrayRecord> =
                serde_json::from_str(&text).map_err(|e| Error::Json {
                    path: path.display().to_string(),
                    source: e,
                })?;
            let examples = records
                .into_iter()
                .map(|r| QAExample {
                    id: r.id,
                    question: r.question,
                    gold_answers: vec![r.answer],
                })
                .collect();
            check_unique_ids(examples)
        }
        DatasetFormat::MuSiQue => load_jsonl(path, |_, record: MusiqueRecord| {
            let mut golds = vec![record.answer];
            golds.extend(record.answer_aliases);
            Ok(QAExample {
                id: record.id,
                question: record.question,
                gold_answers: golds,
            })
        }),
        DatasetFormat::Bamboogle => {
            let mut reader = csv::Reader::from_path(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let headers = reader
                .headers()
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
                .clone();
            let q_col = headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case("question"))
                .ok_or_else(|| Error::Config(format!("{}: no Question column", path.display())))?;
            let a_col = headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case("answer"))
                .ok_or_else(|| Error::Config(format!("{}: no Answer column", path.display())))?;
            let mut examples = Vec::new();
            for (idx, row) in reader.records().enumerate() {
                let row = row.map_err(|e| Error::MalformedRecord {
                    line: idx + 2,
                    message: e.to_string(),
                })?;
                let question = row.get(q_col).unwrap_or_default().to_string();
                let answer = row.get(a_col).unwrap_or_default().to_string();
                if question.is_empty() || answer.is_empty() {
                    return Err(Error::MalformedRecord {
                        line: idx + 2,
                        message: "empty question or answer".to_string(),
                    });
                }
                examples.push(QAExample {
                    id: format!("bamboogle-{idx}"),
                    question,
                    gold_answers: vec![answer],
                });
            }
            check_unique_ids(examples)
        }
    }
}

fn load_jsonl<R: for<'de> Deserialize<'de>>(
    path: &Path,
    map: impl Fn(usize, R) -> Result<QAExample>,
) -> Result<Vec<QAExample>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let reader = std::io::BufReader::new(file);
    let mut examples = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let record: R = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            line: lineno,
            message: e.to_string(),
        })?;
        examples.push(map(lineno, record)?);
    }
    check_unique_ids(examples)
}

fn check_unique_ids(examples: Vec<QAExample>) -> Result<Vec<QAExample>> {
    let mut seen = std::collections::HashSet::new();
    for e in &examples {
        if !seen.insert(e.id.as_str()) {
            return Err(Error::DuplicateTitle {
                title: e.id.clone(),
            });
        }
    }
    Ok(examples)
}

/// Deterministic seeded sample of `n` examples without replacement,
/// original order preserved. Saturates to the identity when `n` covers the
/// whole dataset.
pub fn subsample(examples: &[QAExample], n: usize, seed: u64) -> Vec<QAExample> {
    if n >= examples.len() {
        return examples.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices = rand::seq::index::sample(&mut rng, examples.len(), n).into_vec();
    indices.sort_unstable();
    indices.into_iter().map(|i| examples[i].clone()).collect()
}
