//! The multi-hop QA control flow.
//!
//! One question runs as a single sequential state machine: the decomposer
//! proposes sub-questions until the definer declares the original question
//! solvable; each sub-question is answered by hierarchical retrieval with a
//! two-tier verify/rethink loop (chunk level first, document level every
//! `th2` rejections), a probabilistic fallback to the model's parametric
//! knowledge, and a question-rewrite path when the extracted entity is
//! ambiguous. Every step appends to the question's trace.

pub mod trace;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{split_document, CorpusHandle};
use crate::error::{Error, Result};
use crate::index::{rank_chunks, EmbedderHandle, SparseIndex};
use crate::llm::{judge, DecomposerKind, Judgement, LlmClient};
use crate::num::{stable_seed, Scalar};
use crate::search::SearchClient;
pub use trace::{EscalateReason, GiveUpReason, TraceEvent, TraceEventKind, TraceLog};

/// Retrieval mode for the rewrite path: `Online` sends rewritten questions
/// to the web search client, `Local` re-runs hierarchical retrieval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Online,
    Local,
}

/// Pipeline thresholds and knobs. Defaults: the rethink budget th3 = 4 and
/// gate denominator m = 5 follow the published setup; max_turns = 5 caps
/// decomposition; th1, th2 and epsilon fill gaps the source leaves open,
/// chosen so a document escalation lands mid-budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Ambiguity threshold: rewrite when more than `th1` titles score
    /// within `epsilon` of the top.
    pub th1: usize,
    /// Chunk-level rejections per document before escalating.
    pub th2: usize,
    /// Total rethink budget per sub-question.
    pub th3: usize,
    /// Gate denominator: fires with probability (t/m)^2 after rethink t.
    pub m: usize,
    /// Decomposition turn cap; summarization is forced past it.
    pub max_turns: usize,
    /// Relative score window for the ambiguity count.
    pub epsilon: f64,
    /// Words per chunk.
    pub chunk_size: usize,
    pub mode: Mode,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            th1: 3,
            th2: 2,
            th3: 4,
            m: 5,
            max_turns: 5,
            epsilon: 0.05,
            chunk_size: crate::corpus::DEFAULT_CHUNK_SIZE,
            mode: Mode::Local,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.th2 == 0 || self.th3 == 0 || self.m == 0 || self.max_turns == 0 {
            return Err(Error::Config(
                "thresholds th2, th3, m and max_turns must be at least 1".to_string(),
            ));
        }
        if self.chunk_size == 0 {
            return Err(Error::Config("chunk_size must be at least 1".to_string()));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::Config("epsilon must lie in [0, 1)".to_string()));
        }
        Ok(())
    }
}

/// Everything a question's pipeline needs, all immutable shared state.
#[derive(Clone, Copy)]
pub struct PipelineDeps<'a, S: Scalar> {
    pub corpus: &'a CorpusHandle,
    pub index: &'a SparseIndex<S>,
    pub embedder: &'a EmbedderHandle,
    pub llm: &'a LlmClient,
    pub search: Option<&'a SearchClient>,
    pub config: &'a PipelineConfig,
}

/// Where a sub-answer came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum AnswerSource {
    Retrieved { title: String, chunk_ordinal: usize },
    Internal,
    Online,
    Empty,
}

/// One answered (or exhausted) sub-question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubAnswer {
    pub question: String,
    pub answer: String,
    #[serde(flatten)]
    pub source: AnswerSource,
    pub rethinks_used: usize,
}

impl SubAnswer {
    pub fn empty(question: impl Into<String>, rethinks_used: usize) -> Self {
        SubAnswer {
            question: question.into(),
            answer: String::new(),
            source: AnswerSource::Empty,
            rethinks_used,
        }
    }

    /// Constructor that upholds the invariant: an empty answer always has
    /// the `Empty` source, whatever path produced it.
    fn checked(
        question: impl Into<String>,
        answer: String,
        source: AnswerSource,
        rethinks_used: usize,
    ) -> Self {
        if answer.trim().is_empty() {
            SubAnswer::empty(question, rethinks_used)
        } else {
            SubAnswer {
                question: question.into(),
                answer,
                source,
                rethinks_used,
            }
        }
    }
}

/// Final pipeline output for one question.
#[derive(Debug, Clone, PartialEq)]
pub struct AnswerResult {
    pub final_answer: String,
    pub sub_qa: Vec<SubAnswer>,
    /// Number of decomposer calls made.
    pub turns: usize,
    pub trace: TraceLog,
}

/// Decomposition loop state for one question.
#[derive(Debug)]
pub struct QAState {
    pub question: String,
    /// Decomposition round counter; equals the number of asked
    /// sub-questions at all times.
    pub mt: usize,
    pub asked: Vec<String>,
    pub answers: Vec<SubAnswer>,
    pub trace: TraceLog,
}

impl QAState {
    pub fn new(question: impl Into<String>) -> Self {
        QAState {
            question: question.into(),
            mt: 0,
            asked: Vec::new(),
            answers: Vec::new(),
            trace: TraceLog::new(),
        }
    }

    fn answer_texts(&self) -> Vec<String> {
        self.answers.iter().map(|a| a.answer.clone()).collect()
    }

    fn qa_pairs(&self) -> Vec<(String, String)> {
        self.answers
            .iter()
            .map(|a| (a.question.clone(), a.answer.clone()))
            .collect()
    }
}

/// Rethink-loop counters for one sub-question. The schedule invariant:
/// after `r` filter rejections (and absent chunk-exhaustion escalations),
/// `doc_rank = r / th2` and `chunk_rank = r % th2`.
#[derive(Debug)]
pub struct RethinkState {
    /// Completed rethink rounds (filter rejections) so far.
    pub t: usize,
    pub doc_rank: usize,
    pub chunk_rank: usize,
    pub th1: usize,
    pub th2: usize,
    pub th3: usize,
    pub m: usize,
    pub rng: ChaCha8Rng,
    /// The rewrite branch runs its inner retrieval with this off so the
    /// rewrite path cannot recurse.
    ambiguity_enabled: bool,
}

impl RethinkState {
    pub fn new(config: &PipelineConfig, rng: ChaCha8Rng) -> Self {
        RethinkState {
            t: 0,
            doc_rank: 0,
            chunk_rank: 0,
            th1: config.th1,
            th2: config.th2,
            th3: config.th3,
            m: config.m,
            rng,
            ambiguity_enabled: true,
        }
    }

    pub fn for_question(config: &PipelineConfig, question_id: &str) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(stable_seed(config.seed, question_id));
        RethinkState::new(config, rng)
    }

    /// Fresh counters for the rewrite path's inner retrieval: forked RNG,
    /// ambiguity branch disabled.
    fn fork_inner(&mut self) -> RethinkState {
        RethinkState {
            t: 0,
            doc_rank: 0,
            chunk_rank: 0,
            th1: self.th1,
            th2: self.th2,
            th3: self.th3,
            m: self.m,
            rng: ChaCha8Rng::seed_from_u64(self.rng.next_u64()),
            ambiguity_enabled: false,
        }
    }
}

/// The internal-knowledge gate: true with probability min((t/m)^2, 1),
/// consuming exactly one uniform draw.
pub fn internal_gate<S: Scalar>(t: usize, m: usize, rng: &mut impl Rng) -> bool {
    assert!(m >= 1, "gate denominator m must be at least 1");
    let ratio = S::from_usize_lossy(t) / S::from_usize_lossy(m);
    let y = (ratio * ratio).min(S::one());
    let draw = S::from_f64_lossy(rng.random::<f64>());
    draw < y
}

/// Probability the gate fires after rethink `t`, for traces.
pub fn gate_probability(t: usize, m: usize) -> f64 {
    let ratio = t as f64 / m as f64;
    (ratio * ratio).min(1.0)
}

/// Pick the contextual supplement for a rewrite: the most recent prior
/// answer containing the entity (case-insensitive substring), falling back
/// to the original question.
pub fn select_supplement(prior_answers: &[String], entity: &str, original_question: &str) -> String {
    let needle = entity.to_lowercase();
    prior_answers
        .iter()
        .rev()
        .find(|a| a.to_lowercase().contains(&needle))
        .cloned()
        .unwrap_or_else(|| original_question.to_string())
}

/// Hierarchical retrieval with the two-tier rethink loop for one
/// sub-question. See the module docs for the step order; the gate is
/// evaluated after each rejection and gets its chance even on the final
/// allowed rethink, before the th3 exhaustion check.
pub fn retrieve_with_rethink<S: Scalar>(
    conversation: &str,
    sub_question: &str,
    original_question: &str,
    prior_answers: &[String],
    deps: &PipelineDeps<'_, S>,
    state: &mut RethinkState,
    trace: &mut TraceLog,
) -> Result<SubAnswer> {
    let entity = deps.llm.extract_entity(conversation, sub_question)?;
    trace.push(TraceEventKind::Entity {
        question: sub_question.to_string(),
        entity: entity.clone(),
    });

    let mut ambiguity_pending = state.ambiguity_enabled;
    loop {
        let Some(hit) = deps.index.retrieve(&entity, state.doc_rank) else {
            trace.push(TraceEventKind::GiveUp {
                reason: GiveUpReason::DocumentsExhausted,
                rethinks: state.t,
            });
            return Ok(SubAnswer::empty(sub_question, state.t));
        };
        trace.push(TraceEventKind::SparseHit {
            entity: entity.clone(),
            title: hit.title.clone(),
            score: hit.score.to_f64_lossy(),
            rank: hit.rank,
        });

        if ambiguity_pending {
            // The count is a pure function of the entity, so one check
            // settles the branch for the whole loop.
            ambiguity_pending = false;
            let count = deps
                .index
                .ambiguity_count(&entity, S::from_f64_lossy(deps.config.epsilon));
            let triggered = count > state.th1;
            trace.push(TraceEventKind::Ambiguity {
                entity: entity.clone(),
                count,
                threshold: state.th1,
                triggered,
            });
            if triggered {
                return rewrite_and_answer(
                    conversation,
                    sub_question,
                    prior_answers,
                    original_question,
                    &entity,
                    deps,
                    state,
                    trace,
                );
            }
        }

        let document = deps.corpus.document(&hit.title).ok_or_else(|| {
            Error::Config(format!(
                "index and corpus disagree: no document titled {:?}",
                hit.title
            ))
        })?;
        let profile = deps.corpus.profile(&hit.title);
        let chunks = split_document(document, deps.config.chunk_size);

        let Some((chunk, score)) =
            rank_chunks::<S>(deps.embedder, sub_question, &chunks, state.chunk_rank)?
        else {
            // This document has no chunk left at this offset; move to the
            // next document without spending a rethink.
            state.doc_rank += 1;
            state.chunk_rank = 0;
            trace.push(TraceEventKind::EscalateDoc {
                doc_rank: state.doc_rank,
                reason: EscalateReason::ChunksExhausted,
            });
            continue;
        };
        trace.push(TraceEventKind::DenseHit {
            title: hit.title.clone(),
            ordinal: chunk.ordinal,
            score: score.to_f64_lossy(),
            rank: state.chunk_rank,
        });

        let verdict = deps.llm.filter_answer(
            conversation,
            sub_question,
            &chunk.text,
            profile.map(|p| p.text.as_str()),
        )?;
        trace.push(TraceEventKind::Filter {
            can_solve: verdict.can_solve,
            response: verdict.response.clone(),
        });
        if verdict.can_solve {
            return Ok(SubAnswer::checked(
                sub_question,
                verdict.response,
                AnswerSource::Retrieved {
                    title: hit.title.clone(),
                    chunk_ordinal: chunk.ordinal,
                },
                state.t,
            ));
        }

        state.t += 1;
        let fired = internal_gate::<S>(state.t, state.m, &mut state.rng);
        trace.push(TraceEventKind::Gate {
            t: state.t,
            m: state.m,
            probability: gate_probability(state.t, state.m),
            fired,
        });
        if fired {
            let answer = deps.llm.answer_internal(conversation, sub_question)?;
            trace.push(TraceEventKind::InternalAnswer {
                answer: answer.clone(),
            });
            return Ok(SubAnswer::checked(
                sub_question,
                answer,
                AnswerSource::Internal,
                state.t,
            ));
        }
        if state.t >= state.th3 {
            trace.push(TraceEventKind::GiveUp {
                reason: GiveUpReason::RethinkBudget,
                rethinks: state.t,
            });
            return Ok(SubAnswer::empty(sub_question, state.t));
        }
        if state.t % state.th2 == 0 {
            state.doc_rank += 1;
            state.chunk_rank = 0;
            trace.push(TraceEventKind::EscalateDoc {
                doc_rank: state.doc_rank,
                reason: EscalateReason::RethinkSchedule,
            });
        } else {
            state.chunk_rank += 1;
        }
    }
}

/// The semantic-incompleteness branch: supplement the question with
/// context, rewrite it, then answer it either from web search (online
/// mode, one shot) or by re-running local retrieval with the ambiguity
/// branch disabled.
#[allow(clippy::too_many_arguments)]
fn rewrite_and_answer<S: Scalar>(
    conversation: &str,
    sub_question: &str,
    prior_answers: &[String],
    original_question: &str,
    entity: &str,
    deps: &PipelineDeps<'_, S>,
    state: &mut RethinkState,
    trace: &mut TraceLog,
) -> Result<SubAnswer> {
    let supplement = select_supplement(prior_answers, entity, original_question);
    let rewritten = deps
        .llm
        .rewrite_question(conversation, sub_question, &supplement)?;
    trace.push(TraceEventKind::Rewrite {
        original: sub_question.to_string(),
        rewritten: rewritten.clone(),
        supplement,
    });

    if deps.config.mode == Mode::Online {
        if let Some(search) = deps.search {
            match search.search(&rewritten) {
                Ok(Some(result)) => {
                    let verdict =
                        deps.llm
                            .filter_answer(conversation, sub_question, &result.text, None)?;
                    trace.push(TraceEventKind::OnlineAnswer {
                        url: result.source_url,
                        accepted: verdict.can_solve,
                        answer: verdict.response.clone(),
                    });
                    if verdict.can_solve {
                        return Ok(SubAnswer::checked(
                            sub_question,
                            verdict.response,
                            AnswerSource::Online,
                            state.t,
                        ));
                    }
                    // One shot: the online path does not rethink.
                    trace.push(TraceEventKind::GiveUp {
                        reason: GiveUpReason::OnlineMiss,
                        rethinks: state.t,
                    });
                    return Ok(SubAnswer::empty(sub_question, state.t));
                }
                Ok(None) => {
                    trace.push(TraceEventKind::GiveUp {
                        reason: GiveUpReason::OnlineMiss,
                        rethinks: state.t,
                    });
                    return Ok(SubAnswer::empty(sub_question, state.t));
                }
                Err(e) => {
                    log::warn!("web search failed ({e}); falling back to local retrieval");
                }
            }
        } else {
            log::warn!("online mode without a search client; falling back to local retrieval");
        }
    }

    let mut inner = state.fork_inner();
    let sub = retrieve_with_rethink(
        conversation,
        &rewritten,
        original_question,
        prior_answers,
        deps,
        &mut inner,
        trace,
    )?;
    Ok(SubAnswer {
        question: sub_question.to_string(),
        ..sub
    })
}

/// Full pipeline for one question: decompose, retrieve-and-verify each
/// sub-question, summarize. Always terminates and always yields a scorable
/// final answer; LLM failures abort with the partial trace attached.
pub fn answer_question<S: Scalar>(
    question_id: &str,
    question: &str,
    deps: &PipelineDeps<'_, S>,
) -> Result<AnswerResult> {
    let mut state = QAState::new(question);
    let mut turns = 0usize;
    let mut forced = false;

    let outcome = run_decomposition(question_id, deps, &mut state, &mut turns, &mut forced);
    match outcome {
        Ok(()) => {}
        Err(e) => {
            return Err(Error::PipelineAborted {
                question: question.to_string(),
                source: Box::new(e),
                trace: state.trace.into_events(),
            })
        }
    }

    let final_answer = match deps
        .llm
        .summarize(question_id, question, &state.qa_pairs())
    {
        Ok(answer) => answer,
        Err(e) => {
            return Err(Error::PipelineAborted {
                question: question.to_string(),
                source: Box::new(e),
                trace: state.trace.into_events(),
            })
        }
    };
    state.trace.push(TraceEventKind::Summarize {
        answer: final_answer.clone(),
        forced,
    });

    Ok(AnswerResult {
        final_answer,
        sub_qa: state.answers,
        turns,
        trace: state.trace,
    })
}

fn run_decomposition<S: Scalar>(
    question_id: &str,
    deps: &PipelineDeps<'_, S>,
    state: &mut QAState,
    turns: &mut usize,
    forced: &mut bool,
) -> Result<()> {
    let mut rethink = RethinkState::for_question(deps.config, question_id);
    loop {
        if state.mt >= deps.config.max_turns {
            *forced = true;
            return Ok(());
        }
        let output = deps
            .llm
            .decompose(question_id, &state.question, &state.answer_texts())?;
        *turns += 1;
        state.trace.push(TraceEventKind::Decompose {
            raw: output.raw.clone(),
        });
        let judgement = judge(&output, &state.asked);
        state.trace.push(TraceEventKind::Judge {
            solvable: judgement == Judgement::Solvable,
        });
        let sub_question = match judgement {
            Judgement::Solvable => return Ok(()),
            Judgement::Continue(q) => q,
        };
        debug_assert!(matches!(output.kind, DecomposerKind::SubQuestion(_)));

        state.asked.push(sub_question.clone());
        // Each sub-question gets fresh rethink counters but continues the
        // question's RNG stream.
        rethink.t = 0;
        rethink.doc_rank = 0;
        rethink.chunk_rank = 0;
        let sub = retrieve_with_rethink(
            question_id,
            &sub_question,
            &state.question,
            &state.answer_texts(),
            deps,
            &mut rethink,
            &mut state.trace,
        )?;
        state.answers.push(sub);
        state.mt += 1;
    }
}

/// Single-hop plug-in mode: hierarchical retrieval with verify/rethink for
/// one already-decomposed question, no decomposition or summarization.
pub fn retrieve_single<S: Scalar>(
    question_id: &str,
    question: &str,
    deps: &PipelineDeps<'_, S>,
) -> Result<(SubAnswer, TraceLog)> {
    let mut trace = TraceLog::new();
    let mut state = RethinkState::for_question(deps.config, question_id);
    let sub = retrieve_with_rethink(question_id, question, question, &[], deps, &mut state, &mut trace)
        .map_err(|e| Error::PipelineAborted {
            question: question.to_string(),
            source: Box::new(e),
            trace: Vec::new(),
        })?;
    Ok((sub, trace))
}
