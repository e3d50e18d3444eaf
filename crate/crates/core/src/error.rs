//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A corpus or dataset record failed to parse. `line` is 1-based.
    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },

    /// Two documents (or two profiles) share a title.
    #[error("duplicate title {title:?}")]
    DuplicateTitle { title: String },

    /// Building an index over an empty corpus is a configuration mistake.
    #[error("corpus is empty")]
    EmptyCorpus,

    /// A persisted artifact has the wrong magic header or version.
    #[error("{path}: incompatible format: {message}")]
    IncompatibleFormat { path: String, message: String },

    /// Invalid configuration (bad path, bad threshold, missing field).
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    /// Transport-level failure talking to an LLM or embedding endpoint.
    /// Retryable failures are retried before this surfaces.
    #[error("transport failure: {message}")]
    Transport { message: String, retryable: bool },

    /// A scripted backend ran out of completions for a request. Always a
    /// test-fixture bug, never an expected runtime condition.
    #[error("script exhausted for role {role}: no completion matches prompt {prompt_snippet:?}")]
    ScriptExhausted { role: String, prompt_snippet: String },

    /// Search engine transport failure, distinct from "no results" so the
    /// pipeline can fall back to local retrieval.
    #[error("search transport failure: {message}")]
    SearchTransport { message: String },

    /// A question's pipeline aborted (LLM retry budget exhausted). Carries
    /// the partial trace for diagnosis.
    #[error("pipeline aborted for question {question:?}: {source}")]
    PipelineAborted {
        question: String,
        #[source]
        source: Box<Error>,
        trace: Vec<crate::pipeline::TraceEvent>,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad invocation or configuration, as opposed
    /// to runtime failures. The CLI maps these to exit code 2.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::MalformedRecord { .. }
                | Error::DuplicateTitle { .. }
                | Error::EmptyCorpus
                | Error::IncompatibleFormat { .. }
                | Error::Config(_)
                | Error::Io { .. }
                | Error::Json { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
