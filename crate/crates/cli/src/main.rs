//! Operator CLI: corpus ingestion, index building, single-question
//! answering, batch evaluation and plug-in single-hop retrieval.
//!
//! Exit codes: 0 success, 2 usage/config error, 3 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hirag_core::config::{FileConfig, Runtime};
use hirag_core::corpus::{self, CorpusHandle};
use hirag_core::error::Error;
use hirag_core::eval::runner::{run_batch, RunOptions};
use hirag_core::eval::{load_dataset, subsample, DatasetFormat, MetricsReport};
use hirag_core::index::SparseIndex;
use hirag_core::pipeline::{answer_question, retrieve_single, AnswerSource, Mode};
use hirag_core::Score;

#[derive(Parser)]
#[command(name = "hirag", version, about = "Multi-hop QA over an entity-indexed corpus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate corpus record files and write a corpus directory.
    Ingest {
        /// Document record file (one JSON record per line: title, text).
        #[arg(long)]
        corpus: PathBuf,
        /// Optional profile record file (title, profile).
        #[arg(long)]
        profiles: Option<PathBuf>,
        /// Output corpus directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print entity and word counts for an ingested corpus directory.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Build the sparse title index over an ingested corpus directory.
    BuildIndex {
        #[arg(long)]
        corpus: PathBuf,
        /// Output index directory.
        #[arg(long)]
        out: PathBuf,
        /// Overwrite an existing index.
        #[arg(long)]
        force: bool,
    },
    /// Answer one question with the full pipeline.
    Ask {
        question: String,
        #[command(flatten)]
        run: RunArgs,
        /// Write the question's event log to this file (JSON lines).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Print the sub-question/answer chain.
        #[arg(long)]
        show_subqa: bool,
    },
    /// Run the pipeline over a dataset and score it.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        /// Dataset format: generic, hotpotqa, 2wiki, musique, bamboogle.
        #[arg(long)]
        format: String,
        /// Run directory for predictions, traces and the report.
        #[arg(long)]
        out: PathBuf,
        /// Sub-sample this many questions (seeded, without replacement).
        #[arg(long)]
        n: Option<usize>,
        /// Skip questions already answered in the run directory.
        #[arg(long)]
        resume: bool,
        /// Concurrent question pipelines.
        #[arg(long)]
        concurrency: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Single-hop retrieval with verify/rethink, no decomposition
    /// (plug-in mode).
    Retrieve {
        question: String,
        #[command(flatten)]
        run: RunArgs,
        /// Emit a machine-readable JSON record instead of text.
        #[arg(long)]
        json: bool,
        /// Write the event log to this file (JSON lines).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

/// Config file plus the flag overrides shared by ask/eval/retrieve.
#[derive(Args)]
struct RunArgs {
    /// Run configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the corpus directory from the config.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Override the index directory from the config.
    #[arg(long)]
    index: Option<PathBuf>,
    /// Override the retrieval mode: online or local.
    #[arg(long)]
    mode: Option<String>,
    /// Override the global random seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn runtime(&self) -> Result<Runtime, Error> {
        let mut config = FileConfig::load(&self.config)?;
        if let Some(corpus) = &self.corpus {
            config.paths.corpus = Some(corpus.clone());
        }
        if let Some(index) = &self.index {
            config.paths.index = Some(index.clone());
        }
        if let Some(mode) = &self.mode {
            config.pipeline.mode = match mode.as_str() {
                "online" => Mode::Online,
                "local" => Mode::Local,
                other => {
                    return Err(Error::Config(format!(
                        "unknown mode {other:?} (expected online or local)"
                    )))
                }
            };
        }
        if let Some(seed) = self.seed {
            config.pipeline.seed = seed;
        }
        Runtime::from_config(&config)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Ingest {
            corpus,
            profiles,
            out,
        } => cmd_ingest(&corpus, profiles.as_deref(), &out),
        Command::Stats { corpus } => cmd_stats(&corpus),
        Command::BuildIndex { corpus, out, force } => cmd_build_index(&corpus, &out, force),
        Command::Ask {
            question,
            run,
            trace,
            show_subqa,
        } => cmd_ask(&question, &run, trace.as_deref(), show_subqa),
        Command::Eval {
            dataset,
            format,
            out,
            n,
            resume,
            concurrency,
            run,
        } => cmd_eval(&dataset, &format, &out, n, resume, concurrency, &run),
        Command::Retrieve {
            question,
            run,
            json,
            trace,
        } => cmd_retrieve(&question, &run, json, trace.as_deref()),
    }
}

fn cmd_ingest(records: &Path, profiles: Option<&Path>, out: &Path) -> Result<(), Error> {
    let handle = corpus::ingest(records, profiles)?;
    handle.save(out)?;
    let stats = handle.stats();
    println!(
        "ingested {} entities, {} words, {} profiles -> {}",
        stats.entity_count,
        stats.word_count,
        handle.profile_count(),
        out.display()
    );
    Ok(())
}

fn cmd_stats(corpus_dir: &Path) -> Result<(), Error> {
    let handle = CorpusHandle::open(corpus_dir)?;
    let stats = handle.stats();
    println!("entities: {}", stats.entity_count);
    println!("words: {}", stats.word_count);
    println!("profiles: {}", handle.profile_count());
    Ok(())
}

fn cmd_build_index(corpus_dir: &Path, out: &Path, force: bool) -> Result<(), Error> {
    if out.join("title_index.json").exists() && !force {
        return Err(Error::Config(format!(
            "{} already contains an index; pass --force to rebuild",
            out.display()
        )));
    }
    let handle = CorpusHandle::open(corpus_dir)?;
    let index: SparseIndex<Score> = SparseIndex::build(&handle)?;
    index.save(out)?;
    println!("indexed {} titles -> {}", index.title_count(), out.display());
    Ok(())
}

fn cmd_ask(
    question: &str,
    run: &RunArgs,
    trace_path: Option<&Path>,
    show_subqa: bool,
) -> Result<(), Error> {
    let runtime = run.runtime()?;
    let result = answer_question("ask", question, &runtime.deps())?;
    if show_subqa {
        for (i, sub) in result.sub_qa.iter().enumerate() {
            println!("sub-question {}: {}", i + 1, sub.question);
            let answer = if sub.answer.is_empty() { "(unknown)" } else { &sub.answer };
            println!("  answer: {answer} [{}]", describe_source(&sub.source));
        }
        println!("turns: {}", result.turns);
    }
    if let Some(path) = trace_path {
        result.trace.write_jsonl(path)?;
    }
    println!("{}", result.final_answer);
    Ok(())
}

fn describe_source(source: &AnswerSource) -> String {
    match source {
        AnswerSource::Retrieved {
            title,
            chunk_ordinal,
        } => format!("retrieved: {title} chunk {chunk_ordinal}"),
        AnswerSource::Internal => "internal knowledge".to_string(),
        AnswerSource::Online => "online search".to_string(),
        AnswerSource::Empty => "no answer".to_string(),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    dataset: &Path,
    format: &str,
    out: &Path,
    n: Option<usize>,
    resume: bool,
    concurrency: Option<usize>,
    run: &RunArgs,
) -> Result<(), Error> {
    let format = DatasetFormat::parse(format)
        .ok_or_else(|| Error::Config(format!("unknown dataset format {format:?}")))?;
    let runtime = run.runtime()?;
    let examples = load_dataset(dataset, format)?;
    let examples = match n {
        Some(n) => subsample(&examples, n, runtime.pipeline.seed),
        None => examples,
    };
    let options = RunOptions {
        concurrency: concurrency.unwrap_or(runtime.concurrency),
        resume,
        write_traces: true,
    };
    let outcome = run_batch(&examples, &runtime.deps(), out, &options)?;
    if !outcome.failures.is_empty() {
        for (id, message) in &outcome.failures {
            log::error!("question {id} failed: {message}");
        }
        eprintln!(
            "warning: {} question(s) aborted and scored as empty",
            outcome.failures.len()
        );
    }
    print_report(&outcome.report);
    println!("run directory: {}", out.display());
    Ok(())
}

fn print_report(report: &MetricsReport) {
    println!("{:>6} {:>8} {:>8} {:>10} {:>8}", "n", "EM", "F1", "Precision", "Recall");
    println!(
        "{:>6} {:>8.2} {:>8.2} {:>10.2} {:>8.2}",
        report.n, report.em, report.f1, report.precision, report.recall
    );
}

fn cmd_retrieve(
    question: &str,
    run: &RunArgs,
    json: bool,
    trace_path: Option<&Path>,
) -> Result<(), Error> {
    let runtime = run.runtime()?;
    let (sub, trace) = retrieve_single("retrieve", question, &runtime.deps())?;
    if let Some(path) = trace_path {
        trace.write_jsonl(path)?;
    }

    let (title, chunk_ordinal) = match &sub.source {
        AnswerSource::Retrieved {
            title,
            chunk_ordinal,
        } => (Some(title.clone()), Some(*chunk_ordinal)),
        _ => (None, None),
    };
    let profile = title
        .as_deref()
        .and_then(|t| runtime.corpus.profile(t))
        .map(|p| p.text.clone());
    let chunk_text = title.as_deref().and_then(|t| {
        let doc = runtime.corpus.document(t)?;
        let chunks = corpus::split_document(doc, runtime.pipeline.chunk_size);
        chunk_ordinal.and_then(|o| chunks.into_iter().find(|c| c.ordinal == o))
            .map(|c| c.text)
    });

    if json {
        let record = serde_json::json!({
            "question": question,
            "answer": sub.answer,
            "source": describe_source(&sub.source),
            "title": title,
            "chunk_ordinal": chunk_ordinal,
            "chunk": chunk_text,
            "profile": profile,
            "rethinks_used": sub.rethinks_used,
        });
        println!("{record}");
    } else {
        if let Some(t) = &title {
            println!("title: {t}");
        }
        if let Some(p) = &profile {
            println!("profile: {p}");
        }
        if let Some(c) = &chunk_text {
            println!("chunk: {c}");
        }
        println!("rethinks: {}", sub.rethinks_used);
        let answer = if sub.answer.is_empty() { "" } else { &sub.answer };
        println!("answer: {answer}");
    }
    Ok(())
}
