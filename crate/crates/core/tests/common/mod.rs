//! Shared fixtures and independent oracles for the integration and
//! acceptance suites.
//!
//! The oracles here deliberately avoid the implementation's data
//! structures: BM25 is recomputed by scanning raw titles, metrics are
//! rescored with a separate normalizer and a two-pointer overlap, and the
//! rethink schedule is replayed by a literal transcription of the
//! published control flow.

#![allow(dead_code)]

use std::collections::HashMap;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use hirag_core::corpus::{ingest, CorpusHandle};
use hirag_core::eval::QAExample;
use hirag_core::index::{EmbedderHandle, SparseIndex};
use hirag_core::llm::{LlmClient, PromptRole, ScriptEntry, ScriptedBackend};
use hirag_core::pipeline::{Mode, PipelineConfig, PipelineDeps, TraceEvent, TraceEventKind};
use hirag_core::search::SearchClient;
use hirag_core::Score;

pub fn filter_yes(answer: &str) -> String {
    format!("solvable: yes\nanswer: {answer}")
}

pub fn filter_no() -> String {
    "solvable: no\nanswer:".to_string()
}

/// Write (title, body) pairs as record files and ingest them.
pub fn build_corpus(docs: &[(String, String)], profiles: &[(String, String)]) -> CorpusHandle {
    let dir = tempfile::tempdir().unwrap();
    let docs_path = dir.path().join("docs.jsonl");
    let mut f = std::fs::File::create(&docs_path).unwrap();
    for (title, body) in docs {
        writeln!(f, "{}", serde_json::json!({"title": title, "text": body})).unwrap();
    }
    drop(f);
    let profiles_path = if profiles.is_empty() {
        None
    } else {
        let path = dir.path().join("profiles.jsonl");
        let mut f = std::fs::File::create(&path).unwrap();
        for (title, text) in profiles {
            writeln!(f, "{}", serde_json::json!({"title": title, "profile": text})).unwrap();
        }
        Some(path)
    };
    ingest(&docs_path, profiles_path.as_deref()).unwrap()
}

pub fn owned(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

// --- BM25 oracle -----------------------------------------------------------

fn oracle_tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// Brute-force BM25 ranking over raw titles: term and document frequencies
/// are recounted by scanning every title on every call, no inverted index.
pub fn bm25_oracle(titles: &[String], query: &str, k1: f64, b: f64) -> Vec<(String, f64)> {
    let tokenized: Vec<Vec<String>> = titles.iter().map(|t| oracle_tokenize(t)).collect();
    let n = titles.len() as f64;
    if n == 0.0 {
        return Vec::new();
    }
    let avgdl = tokenized.iter().map(|t| t.len() as f64).sum::<f64>() / n;
    let mut results = Vec::new();
    for (i, title_tokens) in tokenized.iter().enumerate() {
        let mut score = 0.0;
        for term in oracle_tokenize(query) {
            let tf = title_tokens.iter().filter(|t| **t == term).count() as f64;
            if tf == 0.0 {
                continue;
            }
            let df = tokenized
                .iter()
                .filter(|doc| doc.iter().any(|t| *t == term))
                .count() as f64;
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            let dl = title_tokens.len() as f64;
            score += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / avgdl));
        }
        if score > 0.0 {
            results.push((titles[i].clone(), score));
        }
    }
    results.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    results
}

// --- Metrics oracle --------------------------------------------------------

const PUNCTUATION: &str = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

/// Independent normalizer: explicit punctuation set, retain-loop article
/// removal.
pub fn ref_tokens(s: &str) -> Vec<String> {
    let mut cleaned = String::with_capacity(s.len());
    for ch in s.chars() {
        let lower = ch.to_lowercase();
        for lc in lower {
            if !PUNCTUATION.contains(lc) {
                cleaned.push(lc);
            }
        }
    }
    let mut tokens: Vec<String> = cleaned.split_whitespace().map(str::to_string).collect();
    tokens.retain(|t| t != "a" && t != "an" && t != "the");
    tokens
}

/// Reference scorer: EM plus token precision/recall/F1, max-F1 over golds,
/// overlap via sorted two-pointer intersection.
pub fn ref_metrics(prediction: &str, golds: &[String]) -> (f64, f64, f64, f64) {
    let pred = ref_tokens(prediction);
    let mut em = 0.0;
    let (mut best_f1, mut best_p, mut best_r) = (0.0, 0.0, 0.0);
    for gold in golds {
        let gold_tokens = ref_tokens(gold);
        if pred == gold_tokens {
            em = 1.0;
        }
        if pred.is_empty() || gold_tokens.is_empty() {
            continue;
        }
        let mut a = pred.clone();
        let mut b = gold_tokens.clone();
        a.sort();
        b.sort();
        let (mut i, mut j, mut overlap) = (0, 0, 0usize);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    overlap += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        if overlap == 0 {
            continue;
        }
        let p = overlap as f64 / a.len() as f64;
        let r = overlap as f64 / b.len() as f64;
        let f1 = 2.0 * p * r / (p + r);
        if f1 > best_f1 {
            best_f1 = f1;
            best_p = p;
            best_r = r;
        }
    }
    (em, best_p, best_r, best_f1)
}

// --- Rethink reference simulation -------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefAttempt {
    /// Rethink rounds completed before this attempt.
    pub t_before: usize,
    pub doc_rank: usize,
    pub chunk_rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefOutcome {
    Accepted { rethinks: usize },
    Internal { t: usize },
    Exhausted { rethinks: usize },
}

/// Literal transcription of the published rethink loop: chunk-level
/// advance on rejection, document-level escalation every th2 rejections,
/// the gate after each rejection (outcomes injected), empty result at th3.
pub fn reference_rethink(
    rejections_before_accept: Option<usize>,
    th2: usize,
    th3: usize,
    gate_fires: &[bool],
) -> (Vec<RefAttempt>, RefOutcome) {
    let mut t = 0usize;
    let mut doc_rank = 0usize;
    let mut chunk_rank = 0usize;
    let mut attempts = Vec::new();
    loop {
        attempts.push(RefAttempt {
            t_before: t,
            doc_rank,
            chunk_rank,
        });
        let rejected = match rejections_before_accept {
            Some(k) => attempts.len() <= k,
            None => true,
        };
        if !rejected {
            return (attempts, RefOutcome::Accepted { rethinks: t });
        }
        t += 1;
        if gate_fires.get(t - 1).copied().unwrap_or(false) {
            return (attempts, RefOutcome::Internal { t });
        }
        if t >= th3 {
            return (attempts, RefOutcome::Exhausted { rethinks: t });
        }
        if t % th2 == 0 {
            doc_rank += 1;
            chunk_rank = 0;
        } else {
            chunk_rank += 1;
        }
    }
}

/// Reconstruct the attempt schedule and gate outcomes from an
/// implementation trace.
pub fn attempts_from_trace(events: &[TraceEvent]) -> (Vec<RefAttempt>, Vec<bool>) {
    let mut attempts = Vec::new();
    let mut gate_fires = Vec::new();
    let mut doc_rank = 0usize;
    let mut rejections = 0usize;
    for event in events {
        match &event.event {
            TraceEventKind::SparseHit { rank, .. } => doc_rank = *rank,
            TraceEventKind::DenseHit { rank, .. } => attempts.push(RefAttempt {
                t_before: rejections,
                doc_rank,
                chunk_rank: *rank,
            }),
            TraceEventKind::Filter { can_solve, .. } => {
                if !can_solve {
                    rejections += 1;
                }
            }
            TraceEventKind::Gate { fired, .. } => gate_fires.push(*fired),
            _ => {}
        }
    }
    (attempts, gate_fires)
}

pub fn outcome_from_trace(events: &[TraceEvent]) -> Option<RefOutcome> {
    let mut rejections = 0usize;
    for event in events {
        match &event.event {
            TraceEventKind::Filter { can_solve, .. } => {
                if *can_solve {
                    return Some(RefOutcome::Accepted {
                        rethinks: rejections,
                    });
                }
                rejections += 1;
            }
            TraceEventKind::Gate { fired: true, t, .. } => {
                return Some(RefOutcome::Internal { t: *t })
            }
            TraceEventKind::GiveUp { rethinks, .. } => {
                return Some(RefOutcome::Exhausted {
                    rethinks: *rethinks,
                })
            }
            _ => {}
        }
    }
    None
}

// --- Rethink test corpus -----------------------------------------------------

/// Eight documents whose titles all share one token, each body long enough
/// for several chunks, so any (doc_rank, chunk_rank) the schedule can
/// reach exists.
pub fn rethink_corpus() -> CorpusHandle {
    let names = [
        "Alpha", "Bravo", "Charlie", "Delta", "Echo", "Foxtrot", "Golf", "Hotel",
    ];
    let docs: Vec<(String, String)> = names
        .iter()
        .map(|name| {
            let title = format!("Target {name}");
            let body = (0..50)
                .map(|w| format!("{}w{w}", name.to_lowercase()))
                .collect::<Vec<_>>()
                .join(" ");
            (title, body)
        })
        .collect();
    build_corpus(&docs, &[])
}

/// Config for schedule-conformance runs: ambiguity disabled via a huge
/// th1, gate practically disabled via a huge m (observed gate outcomes are
/// fed to the reference anyway).
pub fn conformance_config(th2: usize, th3: usize) -> PipelineConfig {
    PipelineConfig {
        th1: 1000,
        th2,
        th3,
        m: 1_000_000,
        max_turns: 5,
        epsilon: 0.05,
        chunk_size: 10,
        mode: Mode::Local,
        seed: 0,
    }
}

/// Scripted client for one sub-question against [`rethink_corpus`]:
/// extracts entity "Target", rejects `rejections` times, then accepts
/// (or rejects forever when `rejections` is `None`).
pub fn rethink_client(rejections: Option<usize>) -> LlmClient {
    let mut entries = vec![ScriptEntry::new(
        PromptRole::EntityExtractor,
        None,
        &["Target"],
    )];
    match rejections {
        Some(k) => {
            let mut completions: Vec<String> = std::iter::repeat(filter_no()).take(k).collect();
            completions.push(filter_yes("Found it"));
            let refs: Vec<&str> = completions.iter().map(String::as_str).collect();
            entries.push(ScriptEntry::new(PromptRole::Filter, None, &refs));
        }
        None => {
            entries.push(ScriptEntry::repeating(
                PromptRole::Filter,
                None,
                &filter_no(),
            ));
        }
    }
    entries.push(ScriptEntry::repeating(
        PromptRole::InternalAnswer,
        None,
        "internal guess",
    ));
    LlmClient::scripted(Arc::new(ScriptedBackend::new(entries)))
}

// --- The 25-question two-hop fixture -----------------------------------------

pub struct Fixture {
    pub corpus: CorpusHandle,
    pub index: SparseIndex<Score>,
    pub embedder: EmbedderHandle,
    pub llm: LlmClient,
    pub backend: Arc<ScriptedBackend>,
    pub search: SearchClient,
    pub config: PipelineConfig,
    pub dataset: Vec<QAExample>,
}

impl Fixture {
    pub fn deps(&self) -> PipelineDeps<'_, Score> {
        PipelineDeps {
            corpus: &self.corpus,
            index: &self.index,
            embedder: &self.embedder,
            llm: &self.llm,
            search: Some(&self.search),
            config: &self.config,
        }
    }
}

fn year(i: usize) -> usize {
    1990 + i
}

fn film(i: usize) -> String {
    format!("Quorvax{i} Saga")
}

fn director(i: usize) -> String {
    format!("Malvek{i} Orren")
}

struct ScriptBuilder {
    entries: Vec<ScriptEntry>,
}

impl ScriptBuilder {
    fn new() -> Self {
        ScriptBuilder {
            entries: Vec::new(),
        }
    }

    fn add(&mut self, role: PromptRole, pattern: &str, completions: &[&str]) {
        self.entries
            .push(ScriptEntry::new(role, Some(pattern), completions));
    }

    fn add_repeating(&mut self, role: PromptRole, pattern: &str, completion: &str) {
        self.entries
            .push(ScriptEntry::repeating(role, Some(pattern), completion));
    }

    /// One question's decomposer chain plus its summarizer gold.
    fn question(&mut self, x: &str, sub_questions: &[&str], gold: &str) {
        let mut completions: Vec<&str> = sub_questions.to_vec();
        completions.push("That's enough");
        self.add(PromptRole::Decomposer, x, &completions);
        self.add(PromptRole::Summarizer, x, &[gold]);
    }

    /// A sub-question answered on the first verified chunk.
    fn hop(&mut self, sub_question: &str, entity: &str, answer: &str) {
        self.add(PromptRole::EntityExtractor, sub_question, &[entity]);
        self.add(
            PromptRole::Filter,
            sub_question,
            &[filter_yes(answer).as_str()],
        );
    }
}

/// A 50-document corpus, a 25-question 2-hop dataset, and scripts that
/// exercise every branch: plain hierarchical retrieval, a chunk-level
/// rethink, a document-level escalation, an ambiguity rewrite answered
/// online, an internal-gate firing, a 3-hop chain, an immediate
/// termination, and a duplicate-sub-question exit.
///
/// Gate draws are frozen facts of (seed 0, question id) under the
/// per-question RNG: q11's first draw and q12's first two draws stay below
/// nothing (no firing at t=1 resp. t=1,2), while q03 fires at t=3. The
/// branch scenarios are assigned to those ids accordingly.
pub fn two_hop_fixture() -> Fixture {
    // Corpus: 10 year registries, 10 films, 10 directors, 5 ambiguous
    // stations, 2 background articles, 13 filler compendia = 50.
    let mut docs: Vec<(String, String)> = Vec::new();
    let mut profiles: Vec<(String, String)> = Vec::new();
    for i in 1..=10 {
        let y = year(i);
        docs.push((
            format!("{y} in film"),
            format!(
                "The saga film of {y} was {f}. It premiered on the first day of {y} \
                 and drew large crowds across the region for many weeks.",
                f = film(i)
            ),
        ));
        docs.push((
            film(i),
            format!(
                "{f} is a saga film released in {y}. The film was directed by {d} and \
                 produced at the Port Vexley studios. Critics praised the film for its \
                 scale and for its patient pacing across three long acts.",
                f = film(i),
                d = director(i)
            ),
        ));
        docs.push((
            director(i),
            format!(
                "{d} is a film director born in Port Vexley. {d} directed {f} and \
                 several short features before retiring from public life.",
                d = director(i),
                f = film(i)
            ),
        ));
        profiles.push((
            film(i),
            format!("{f} is a saga film by {d}.", f = film(i), d = director(i)),
        ));
        profiles.push((
            director(i),
            format!("{d} is a film director from Port Vexley.", d = director(i)),
        ));
    }
    for greek in ["Alpha", "Beta", "Gamma", "Delta", "Epsilon"] {
        docs.push((
            format!("Nerion Station {greek}"),
            format!(
                "Nerion Station {greek} is an orbital research facility. The station \
                 supports long duration studies and a small resident crew."
            ),
        ));
    }
    docs.push((
        "Saga (genre)".to_string(),
        "A saga is a long form of narrative that follows families or heroes across \
         many years and many lands, often told in several connected parts with a \
         steady widening of scope."
            .to_string(),
    ));
    docs.push((
        "Port Vexley".to_string(),
        "Port Vexley is a coastal city known for its film studios and its deep \
         natural harbor."
            .to_string(),
    ));
    for j in 1..=13 {
        docs.push((
            format!("Topic{j} Compendium"),
            format!(
                "Topic{j} Compendium collects reference notes about subject number {j} \
                 for readers who want a concise overview."
            ),
        ));
    }
    assert_eq!(docs.len(), 50);

    let corpus = build_corpus(&docs, &profiles);
    let index: SparseIndex<Score> = SparseIndex::build(&corpus).unwrap();
    let embedder = EmbedderHandle::hashed(256);

    let mut script = ScriptBuilder::new();
    let mut dataset: Vec<QAExample> = Vec::new();
    let mut push_example = |id: &str, question: &str, gold: &str| {
        dataset.push(QAExample {
            id: id.to_string(),
            question: question.to_string(),
            gold_answers: vec![gold.to_string()],
        });
    };

    // Plain two-hop questions: q01, q02, q04..q10, q14 over films 1..10.
    let straight_ids = ["q01", "q02", "q04", "q05", "q06", "q07", "q08", "q09", "q10", "q14"];
    for (slot, id) in straight_ids.iter().enumerate() {
        let i = slot + 1;
        let y = year(i);
        let x = format!("Who directed the saga film released in {y}?");
        let sub1 = format!("Which saga film was released in {y}?");
        let sub2 = format!("Who directed {}?", film(i));
        script.question(&x, &[&sub1, &sub2], &director(i));
        script.hop(&sub1, &format!("{y} in film"), &film(i));
        script.hop(&sub2, &film(i), &director(i));
        push_example(id, &x, &director(i));
    }

    // Variant phrasings: q18..q25 over films 1..8.
    for (slot, id) in ["q18", "q19", "q20", "q21", "q22", "q23", "q24", "q25"]
        .iter()
        .enumerate()
    {
        let i = slot + 1;
        let y = year(i);
        let x = format!("What is the name of the director of the saga film from {y}?");
        let sub1 = format!("Which saga film came out in {y}?");
        let sub2 = format!("Which director made {}?", film(i));
        script.question(&x, &[&sub1, &sub2], &director(i));
        script.hop(&sub1, &format!("{y} in film"), &film(i));
        script.hop(&sub2, &film(i), &director(i));
        push_example(id, &x, &director(i));
    }

    // q11: chunk-level rethink on the second hop (reject once, accept the
    // rank-1 chunk). Its first gate draw stays quiet at t=1.
    {
        let x = "Which person directed the saga film of 1991?";
        let sub1 = "What saga film was released during 1991?";
        let sub2 = "Who was the director of Quorvax1 Saga?";
        script.question(x, &[sub1, sub2], &director(1));
        script.hop(sub1, "1991 in film", &film(1));
        script.add(PromptRole::EntityExtractor, sub2, &[&film(1)]);
        script.add(
            PromptRole::Filter,
            sub2,
            &[&filter_no(), &filter_yes(&director(1))],
        );
        push_example("q11", x, &director(1));
    }

    // q12: document-level escalation on the second hop (reject twice with
    // th2 = 2, accept on the next document). Gate quiet at t=1,2.
    {
        let x = "Which filmmaker created the saga film of 1992?";
        let sub1 = "What saga film premiered during 1992?";
        let sub2 = "Which filmmaker created Quorvax2 Saga?";
        script.question(x, &[sub1, sub2], &director(2));
        script.hop(sub1, "1992 in film", &film(2));
        script.add(PromptRole::EntityExtractor, sub2, &[&film(2)]);
        script.add(
            PromptRole::Filter,
            sub2,
            &[&filter_no(), &filter_no(), &filter_yes(&director(2))],
        );
        push_example("q12", x, &director(2));
    }

    // q03: the filter never accepts and the internal-knowledge gate fires
    // at t=3 under this question's RNG stream.
    {
        let x = "What was the production budget of Quorvax3 Saga?";
        let sub1 = "How large was the budget of Quorvax3 Saga?";
        script.question(x, &[sub1], "12 million credits");
        script.add(PromptRole::EntityExtractor, sub1, &[&film(3)]);
        script.add_repeating(PromptRole::Filter, sub1, &filter_no());
        script.add(PromptRole::InternalAnswer, sub1, &["12 million credits"]);
        push_example("q03", x, "12 million credits");
    }

    // q13: ambiguous entity (five near-tied stations) triggers the rewrite
    // path; online mode answers from the scripted search snippet.
    let rewritten_q13 = "Which Nerion Station facility hosts the deep space relay instrument?";
    {
        let x = "Which Nerion Station facility hosts the deep space relay?";
        let sub1 = "Which Nerion Station hosts the deep relay?";
        script.question(x, &[sub1], "Nerion Station Gamma");
        script.add(PromptRole::EntityExtractor, sub1, &["Nerion Station"]);
        script.add(PromptRole::Rewriter, sub1, &[rewritten_q13]);
        script.add(
            PromptRole::Filter,
            sub1,
            &[&filter_yes("Nerion Station Gamma")],
        );
        push_example("q13", x, "Nerion Station Gamma");
    }

    // q15: three hops ending at the director's birthplace.
    {
        let x = "In which city was the director of the saga film of 1994 born?";
        let sub1 = "Which saga film premiered in the year 1994?";
        let sub2 = "Who directed the saga film Quorvax4 Saga?";
        let sub3 = "Where was Malvek4 Orren born?";
        script.question(x, &[sub1, sub2, sub3], "Port Vexley");
        script.hop(sub1, "1994 in film", &film(4));
        script.hop(sub2, &film(4), &director(4));
        script.hop(sub3, &director(4), "Port Vexley");
        push_example("q15", x, "Port Vexley");
    }

    // q16: the decomposer terminates immediately; summarization runs with
    // no sub-answers.
    {
        let x = "What is the capital city of Vexlandia?";
        script.question(x, &[], "Port Vexley");
        push_example("q16", x, "Port Vexley");
    }

    // q17: the decomposer repeats its sub-question verbatim, which exits
    // the loop by the duplicate rule.
    {
        let x = "What saga film was released in the year 1991, the first year of the series?";
        let sub1 = "Which saga film started the series in 1991?";
        script.add(PromptRole::Decomposer, x, &[sub1, sub1]);
        script.add(PromptRole::Summarizer, x, &[&film(1)]);
        script.hop(sub1, "1991 in film", &film(1));
        push_example("q17", x, &film(1));
    }

    dataset.sort_by(|a, b| a.id.cmp(&b.id));
    assert_eq!(dataset.len(), 25);

    let backend = Arc::new(ScriptedBackend::new(script.entries));
    let llm = LlmClient::scripted(backend.clone());
    let search = SearchClient::scripted_snippets(&[(
        rewritten_q13,
        "Nerion Station Gamma hosts the deep space relay instrument on its outer ring.",
    )]);

    let config = PipelineConfig {
        th1: 3,
        th2: 2,
        th3: 4,
        m: 5,
        max_turns: 5,
        epsilon: 0.05,
        chunk_size: 12,
        mode: Mode::Online,
        seed: 0,
    };

    Fixture {
        corpus,
        index,
        embedder,
        llm,
        backend,
        search,
        config,
        dataset,
    }
}

/// Count trace events matching a predicate across a set of trace files.
pub fn count_events_in_dir(dir: &Path, pred: impl Fn(&TraceEventKind) -> bool) -> usize {
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        for line in text.lines() {
            let event: TraceEvent = serde_json::from_str(line).unwrap();
            if pred(&event.event) {
                count += 1;
            }
        }
    }
    count
}

/// Deterministic word pool for random-corpus generators.
pub fn word_pool() -> Vec<&'static str> {
    vec![
        "mercury", "station", "alpha", "river", "bridge", "castle", "opera", "garden", "north",
        "harbor", "light", "stone", "film", "records", "planet", "element", "nova", "silver",
        "summit", "valley", "delta", "union", "park", "tower", "museum", "east", "west", "royal",
        "grand", "little",
    ]
}

pub fn deps_for<'a>(
    corpus: &'a CorpusHandle,
    index: &'a SparseIndex<Score>,
    embedder: &'a EmbedderHandle,
    llm: &'a LlmClient,
    search: Option<&'a SearchClient>,
    config: &'a PipelineConfig,
) -> PipelineDeps<'a, Score> {
    PipelineDeps {
        corpus,
        index,
        embedder,
        llm,
        search,
        config,
    }
}

pub type ScriptedSearch = HashMap<String, String>;
