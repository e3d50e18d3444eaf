//! Dense chunk ranking by embedding dot product.
//!
//! Chunk-level retrieval ranks one document's chunks by `<E(q), E(c)>`.
//! Chunk sets are small (one document at a time), so ranking is exact — no
//! approximate-nearest-neighbor machinery. The embedder is pluggable: a
//! deterministic hashed bag-of-words embedder for tests and offline use, or
//! an external HTTP embedding endpoint.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::corpus::Chunk;
use crate::error::{Error, Result};
use crate::index::sparse::tokenize;
use crate::num::{fnv1a, Scalar};

pub const DEFAULT_EMBED_DIM: usize = 256;

/// Fixed-dimension embedding vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding<S> {
    values: Vec<S>,
}

impl<S: Scalar> Embedding<S> {
    pub fn new(values: Vec<S>) -> Self {
        Embedding { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn dot(&self, other: &Embedding<S>) -> S {
        assert_eq!(self.values.len(), other.values.len(), "embedding dim mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| *a * *b)
            .sum()
    }

    pub fn l2_norm(&self) -> S {
        self.values.iter().map(|v| *v * *v).sum::<S>().sqrt()
    }
}

#[derive(Debug, Clone)]
enum EmbedBackend {
    /// Hashed bag-of-words over lowercased tokens, L2-normalized.
    /// Deterministic and dependency-free; order-insensitive by construction.
    Hashed { dim: usize },
    /// External embedding endpoint: POST a text list, get a vector list.
    Http {
        endpoint: String,
        dim: usize,
        timeout: Duration,
    },
}

/// A configured embedder. `embed` is a pure function of the text for a
/// fixed backend and configuration.
#[derive(Debug, Clone)]
pub struct EmbedderHandle {
    backend: EmbedBackend,
}

impl EmbedderHandle {
    pub fn hashed(dim: usize) -> Self {
        EmbedderHandle {
            backend: EmbedBackend::Hashed { dim },
        }
    }

    pub fn http(endpoint: impl Into<String>, dim: usize, timeout: Duration) -> Self {
        EmbedderHandle {
            backend: EmbedBackend::Http {
                endpoint: endpoint.into(),
                dim,
                timeout,
            },
        }
    }

    pub fn dim(&self) -> usize {
        match &self.backend {
            EmbedBackend::Hashed { dim } => *dim,
            EmbedBackend::Http { dim, .. } => *dim,
        }
    }

    pub fn embed<S: Scalar>(&self, text: &str) -> Result<Embedding<S>> {
        match &self.backend {
            EmbedBackend::Hashed { dim } => Ok(hashed_embedding(text, *dim)),
            EmbedBackend::Http {
                endpoint,
                dim,
                timeout,
            } => http_embedding(endpoint, *dim, *timeout, text),
        }
    }
}

fn hashed_embedding<S: Scalar>(text: &str, dim: usize) -> Embedding<S> {
    let mut values = vec![S::zero(); dim];
    for token in tokenize(text) {
        let bucket = (fnv1a(token.as_bytes()) % dim as u64) as usize;
        values[bucket] += S::one();
    }
    let norm = values.iter().map(|v| *v * *v).sum::<S>().sqrt();
    if norm > S::zero() {
        for v in &mut values {
            *v = *v / norm;
        }
    }
    Embedding { values }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: Vec<&'a str>,
}

#[derive(Deserialize)]
struct EmbedResponse {
    embeddings: Vec<Vec<f64>>,
}

fn http_embedding<S: Scalar>(
    endpoint: &str,
    dim: usize,
    timeout: Duration,
    text: &str,
) -> Result<Embedding<S>> {
    let config = ureq::config::Config::builder()
        .timeout_global(Some(timeout))
        .build();
    let agent: ureq::Agent = config.new_agent();
    let mut response = agent
        .post(endpoint)
        .send_json(&EmbedRequest { texts: vec![text] })
        .map_err(|e| Error::Transport {
            message: format!("embedding endpoint: {e}"),
            retryable: true,
        })?;
    let parsed: EmbedResponse = response.body_mut().read_json().map_err(|e| Error::Transport {
        message: format!("embedding endpoint: invalid response: {e}"),
        retryable: false,
    })?;
    let vector = parsed.embeddings.into_iter().next().ok_or_else(|| Error::Transport {
        message: "embedding endpoint returned no vectors".to_string(),
        retryable: false,
    })?;
    if vector.len() != dim {
        return Err(Error::Transport {
            message: format!(
                "embedding endpoint returned dim {}, configured dim {dim}",
                vector.len()
            ),
            retryable: false,
        });
    }
    Ok(Embedding {
        values: vector.into_iter().map(S::from_f64_lossy).collect(),
    })
}

/// Rank `chunks` by dot-product similarity to `question` (descending, ties
/// broken by ordinal ascending) and return the `rank_offset`-th chunk with
/// its score. `None` once offsets exhaust the chunk list.
pub fn rank_chunks<'a, S: Scalar>(
    embedder: &EmbedderHandle,
    question: &str,
    chunks: &'a [Chunk],
    rank_offset: usize,
) -> Result<Option<(&'a Chunk, S)>> {
    if rank_offset >= chunks.len() {
        return Ok(None);
    }
    let query = embedder.embed::<S>(question)?;
    let mut scored: Vec<(usize, S)> = Vec::with_capacity(chunks.len());
    for (i, chunk) in chunks.iter().enumerate() {
        let emb = embedder.embed::<S>(&chunk.text)?;
        scored.push((i, query.dot(&emb)));
    }
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| chunks[a.0].ordinal.cmp(&chunks[b.0].ordinal))
    });
    Ok(scored
        .get(rank_offset)
        .map(|&(i, score)| (&chunks[i], score)))
}
