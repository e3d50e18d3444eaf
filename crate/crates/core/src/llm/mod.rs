//! One completion interface, six prompt roles, two backends.
//!
//! All model access goes through [`LlmClient`]: role-specific templates are
//! rendered by [`prompt`], dispatched to either a live chat-completions
//! endpoint or a deterministic scripted backend, and the completions are
//! parsed into typed outputs here. Roles can be routed to different
//! backends (the decomposer often runs on a different model than the rest).

pub mod http;
pub mod prompt;
pub mod scripted;

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
pub use http::{HttpLlm, HttpLlmConfig};
pub use prompt::TERMINATION_MARKER;
pub use scripted::{CapturedRequest, ScriptEntry, ScriptedBackend};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatTurn {
    pub role: Role,
    pub content: String,
}

impl ChatTurn {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        ChatTurn {
            role,
            content: content.into(),
        }
    }
}

/// The six completion roles. The definer role from the framework issues no
/// completion: it is realized as marker/duplicate detection over decomposer
/// output (see [`judge`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptRole {
    Decomposer,
    EntityExtractor,
    Rewriter,
    Filter,
    InternalAnswer,
    Summarizer,
}

impl PromptRole {
    pub fn as_str(self) -> &'static str {
        match self {
            PromptRole::Decomposer => "decomposer",
            PromptRole::EntityExtractor => "entity_extractor",
            PromptRole::Rewriter => "rewriter",
            PromptRole::Filter => "filter",
            PromptRole::InternalAnswer => "internal_answer",
            PromptRole::Summarizer => "summarizer",
        }
    }

    pub const ALL: [PromptRole; 6] = [
        PromptRole::Decomposer,
        PromptRole::EntityExtractor,
        PromptRole::Rewriter,
        PromptRole::Filter,
        PromptRole::InternalAnswer,
        PromptRole::Summarizer,
    ];
}

#[derive(Debug, Clone)]
pub enum Backend {
    Http(Arc<HttpLlm>),
    Scripted(Arc<ScriptedBackend>),
}

/// Completion client. Safe to share across threads; the scripted backend
/// serializes script consumption per conversation id.
#[derive(Debug, Clone)]
pub struct LlmClient {
    default_backend: Backend,
    role_backends: HashMap<PromptRole, Backend>,
}

impl LlmClient {
    pub fn new(default_backend: Backend) -> Self {
        LlmClient {
            default_backend,
            role_backends: HashMap::new(),
        }
    }

    pub fn scripted(backend: Arc<ScriptedBackend>) -> Self {
        LlmClient::new(Backend::Scripted(backend))
    }

    pub fn http(config: HttpLlmConfig) -> Self {
        LlmClient::new(Backend::Http(Arc::new(HttpLlm::new(config))))
    }

    /// Route one role to its own backend (e.g. a different decomposer
    /// model) without affecting the others.
    pub fn with_role_backend(mut self, role: PromptRole, backend: Backend) -> Self {
        self.role_backends.insert(role, backend);
        self
    }

    fn complete(&self, conversation: &str, role: PromptRole, turns: &[ChatTurn]) -> Result<String> {
        let backend = self.role_backends.get(&role).unwrap_or(&self.default_backend);
        match backend {
            Backend::Http(http) => http.complete(turns),
            Backend::Scripted(s) => s.complete(conversation, role, turns),
        }
    }
}

/// Decomposer output: the next sub-question, or the termination marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecomposerOutput {
    pub kind: DecomposerKind,
    /// Verbatim model text, preserved for traces.
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecomposerKind {
    SubQuestion(String),
    Done,
}

/// The definer's verdict over one decomposer output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Judgement {
    /// The original question is answerable: summarize now.
    Solvable,
    /// Keep going with this sub-question.
    Continue(String),
}

/// Filter verdict over one (question, chunk, profile) triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterVerdict {
    pub can_solve: bool,
    /// Extracted answer; non-empty exactly when `can_solve`.
    pub response: String,
}

impl LlmClient {
    /// Ask the decomposer for the next sub-question given the original
    /// question and the answers gathered so far. An empty completion is
    /// treated as termination (with a warning) so the pipeline stays total.
    pub fn decompose(
        &self,
        conversation: &str,
        question: &str,
        prior_answers: &[String],
    ) -> Result<DecomposerOutput> {
        let turns = prompt::decomposer_turns(question, prior_answers);
        let raw = self.complete(conversation, PromptRole::Decomposer, &turns)?;
        let trimmed = raw.trim();
        let kind = if trimmed.is_empty() {
            log::warn!("decomposer returned an empty completion; treating as termination");
            DecomposerKind::Done
        } else if trimmed == TERMINATION_MARKER {
            DecomposerKind::Done
        } else {
            DecomposerKind::SubQuestion(trimmed.to_string())
        };
        Ok(DecomposerOutput { kind, raw })
    }

    /// Extract the entity name a sub-question is about. Falls back to the
    /// question itself when the model returns nothing usable.
    pub fn extract_entity(&self, conversation: &str, sub_question: &str) -> Result<String> {
        let turns = prompt::entity_turns(sub_question);
        let raw = self.complete(conversation, PromptRole::EntityExtractor, &turns)?;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            log::warn!("entity extractor returned empty text for {sub_question:?}; falling back to the question");
            Ok(sub_question.to_string())
        } else {
            Ok(trimmed.to_string())
        }
    }

    /// Rewrite a semantically incomplete sub-question using a contextual
    /// supplement. Falls back to plain concatenation on an empty completion.
    pub fn rewrite_question(
        &self,
        conversation: &str,
        sub_question: &str,
        supplement: &str,
    ) -> Result<String> {
        let turns = prompt::rewriter_turns(sub_question, supplement);
        let raw = self.complete(conversation, PromptRole::Rewriter, &turns)?;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            log::warn!("rewriter returned empty text; falling back to concatenation");
            Ok(format!("{sub_question} (context: {supplement})"))
        } else {
            Ok(trimmed.to_string())
        }
    }

    /// Ask the filter whether the chunk (plus profile, when present)
    /// resolves the sub-question. Unparseable completions demote to a
    /// rejection so they feed the rethink loop instead of crashing it.
    pub fn filter_answer(
        &self,
        conversation: &str,
        sub_question: &str,
        chunk: &str,
        profile: Option<&str>,
    ) -> Result<FilterVerdict> {
        let turns = prompt::filter_turns(sub_question, chunk, profile);
        let raw = self.complete(conversation, PromptRole::Filter, &turns)?;
        Ok(parse_filter_verdict(&raw))
    }

    /// Answer from parametric knowledge only: the prompt carries no
    /// retrieved text.
    pub fn answer_internal(&self, conversation: &str, sub_question: &str) -> Result<String> {
        let turns = prompt::internal_answer_turns(sub_question);
        let raw = self.complete(conversation, PromptRole::InternalAnswer, &turns)?;
        Ok(raw.trim().to_string())
    }

    /// Produce the final answer from the original question and the
    /// sub-question/answer chain. An empty completion yields an empty
    /// answer (scored as wrong downstream), never an error.
    pub fn summarize(
        &self,
        conversation: &str,
        question: &str,
        sub_qa: &[(String, String)],
    ) -> Result<String> {
        let turns = prompt::summarizer_turns(question, sub_qa);
        let raw = self.complete(conversation, PromptRole::Summarizer, &turns)?;
        Ok(raw.trim().to_string())
    }
}

/// The definer: the original question is solvable when the decomposer
/// emitted the termination marker or repeated an already-asked sub-question
/// verbatim (exact string equality after trimming).
pub fn judge(output: &DecomposerOutput, asked: &[String]) -> Judgement {
    match &output.kind {
        DecomposerKind::Done => Judgement::Solvable,
        DecomposerKind::SubQuestion(q) => {
            if asked.iter().any(|prev| prev == q) {
                Judgement::Solvable
            } else {
                Judgement::Continue(q.clone())
            }
        }
    }
}

/// Lenient parse of the constrained two-line filter format:
/// `solvable: yes|no` then `answer: ...`. Case and surrounding whitespace
/// are ignored. Anything unparseable, and a "yes" without an answer, is a
/// rejection.
fn parse_filter_verdict(raw: &str) -> FilterVerdict {
    let mut can_solve = None;
    let mut answer = String::new();
    for line in raw.lines() {
        let lower = line.trim().to_lowercase();
        if let Some(rest) = lower.strip_prefix("solvable") {
            let value = rest.trim_start_matches([':', ' ', '\t']);
            if value.starts_with("yes") {
                can_solve = Some(true);
            } else if value.starts_with("no") {
                can_solve = Some(false);
            }
        } else if let Some(idx) = line.to_lowercase().find("answer") {
            let rest = &line[idx + "answer".len()..];
            answer = rest.trim_start_matches([':', ' ', '\t']).trim().to_string();
        }
    }
    match can_solve {
        Some(true) if !answer.is_empty() => FilterVerdict {
            can_solve: true,
            response: answer,
        },
        Some(true) => {
            log::warn!("filter said yes without an answer; treating as rejection");
            FilterVerdict {
                can_solve: false,
                response: String::new(),
            }
        }
        Some(false) => FilterVerdict {
            can_solve: false,
            response: String::new(),
        },
        None => {
            log::warn!("unparseable filter completion {raw:?}; treating as rejection");
            FilterVerdict {
                can_solve: false,
                response: String::new(),
            }
        }
    }
}
