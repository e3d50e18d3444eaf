//! Multi-hop question answering over an entity-indexed corpus.
//!
//! The engine decomposes a question into sub-questions one at a time,
//! answers each by hierarchical retrieval — sparse BM25 over entity titles
//! at the document level, dense embedding similarity over that document's
//! chunks — verified by a filter with a two-tier rethink loop, a
//! probabilistic fallback to the model's own knowledge, and a
//! question-rewrite path for ambiguous entities, then summarizes the
//! sub-answers into a final answer.
//!
//! The numeric kernels (BM25 scoring, embedding similarity, the rethink
//! gate, the evaluation metrics) are generic over the scalar type via
//! [`num::Scalar`]; [`Score`] is the concrete instantiation the pipeline
//! and CLI run on.

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod index;
pub mod llm;
pub mod num;
pub mod pipeline;
pub mod search;

pub use error::{Error, Result};
pub use num::Scalar;

/// Default scalar for scores, similarities and metrics.
pub type Score = f64;

/// [`index::SparseIndex`] at the default scalar.
pub type DefaultSparseIndex = index::SparseIndex<Score>;

/// [`index::Embedding`] at the default scalar.
pub type DefaultEmbedding = index::Embedding<Score>;
