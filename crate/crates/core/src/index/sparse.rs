//! BM25 inverted index over document titles.
//!
//! Document-level retrieval is lexical: the extracted entity name is matched
//! against entity titles, so BM25 over the title field is the whole story.
//! Scoring uses the Lucene/Elasticsearch IDF variant
//! `ln(1 + (N - df + 0.5) / (df + 0.5))`, which keeps every matching term's
//! contribution strictly positive, so "has score > 0" coincides with "shares
//! at least one token with the query".

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusHandle;
use crate::error::{Error, Result};
use crate::num::Scalar;

pub const DEFAULT_K1: f64 = 1.2;
pub const DEFAULT_B: f64 = 0.75;

const INDEX_MAGIC: &str = "hirag-sparse-index-v1";
const INDEX_FILE: &str = "title_index.json";

/// Lowercase and split on non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// One ranked sparse-retrieval result.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedTitle<S> {
    pub title: String,
    pub score: S,
    /// 0-based position in the deterministic ranking.
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Posting {
    title_id: u32,
    term_frequency: u32,
}

/// Immutable BM25 index over titles. Ranking is totally ordered: score
/// descending, then title ascending, so identical queries always produce
/// identical rankings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparseIndex<S> {
    postings: HashMap<String, Vec<Posting>>,
    titles: Vec<String>,
    title_lengths: Vec<u32>,
    avg_title_length: S,
    k1: S,
    b: S,
}

impl<S: Scalar> SparseIndex<S> {
    /// Index every document title in the corpus with default BM25
    /// parameters (k1 = 1.2, b = 0.75).
    pub fn build(corpus: &CorpusHandle) -> Result<Self> {
        Self::build_with_params(
            corpus,
            S::from_f64_lossy(DEFAULT_K1),
            S::from_f64_lossy(DEFAULT_B),
        )
    }

    pub fn build_with_params(corpus: &CorpusHandle, k1: S, b: S) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut titles: Vec<String> = corpus.titles().map(str::to_string).collect();
        // Insertion order of the corpus is arbitrary; a sorted title table
        // makes the persisted index canonical.
        titles.sort();

        let mut postings: HashMap<String, Vec<Posting>> = HashMap::new();
        let mut title_lengths = Vec::with_capacity(titles.len());
        let mut total_len = 0u64;
        for (title_id, title) in titles.iter().enumerate() {
            let tokens = tokenize(title);
            total_len += tokens.len() as u64;
            title_lengths.push(tokens.len() as u32);
            let mut tf: HashMap<String, u32> = HashMap::new();
            for tok in tokens {
                *tf.entry(tok).or_insert(0) += 1;
            }
            let mut terms: Vec<(String, u32)> = tf.into_iter().collect();
            terms.sort();
            for (term, term_frequency) in terms {
                postings.entry(term).or_default().push(Posting {
                    title_id: title_id as u32,
                    term_frequency,
                });
            }
        }
        let avg_title_length =
            S::from_f64_lossy(total_len as f64 / titles.len() as f64);
        Ok(SparseIndex {
            postings,
            titles,
            title_lengths,
            avg_title_length,
            k1,
            b,
        })
    }

    pub fn title_count(&self) -> usize {
        self.titles.len()
    }

    /// Score every title sharing at least one token with the query.
    /// Returned ranking is score descending, title ascending on ties;
    /// scores are strictly positive.
    pub fn rank(&self, query: &str) -> Vec<RankedTitle<S>> {
        let terms = tokenize(query);
        if terms.is_empty() {
            return Vec::new();
        }
        let n = S::from_usize_lossy(self.titles.len());
        let half = S::from_f64_lossy(0.5);
        let one = S::one();
        let mut scores: HashMap<u32, S> = HashMap::new();
        for term in &terms {
            let Some(postings) = self.postings.get(term) else {
                continue;
            };
            let df = S::from_usize_lossy(postings.len());
            let idf = (one + (n - df + half) / (df + half)).ln();
            for posting in postings {
                let tf = S::from_usize_lossy(posting.term_frequency as usize);
                let dl = S::from_usize_lossy(self.title_lengths[posting.title_id as usize] as usize);
                let tf_norm = (tf * (self.k1 + one))
                    / (tf + self.k1 * (one - self.b + self.b * dl / self.avg_title_length));
                *scores.entry(posting.title_id).or_insert_with(S::zero) += idf * tf_norm;
            }
        }
        let mut ranked: Vec<(u32, S)> = scores.into_iter().collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| self.titles[a.0 as usize].cmp(&self.titles[b.0 as usize]))
        });
        ranked
            .into_iter()
            .enumerate()
            .map(|(rank, (title_id, score))| RankedTitle {
                title: self.titles[title_id as usize].clone(),
                score,
                rank,
            })
            .collect()
    }

    /// The `rank_offset`-th entry of the ranking, or `None` once the
    /// matching titles are exhausted. Exhaustion drives document-level
    /// rethink termination, so it is a value rather than an error.
    pub fn retrieve(&self, query: &str, rank_offset: usize) -> Option<RankedTitle<S>> {
        self.rank(query).into_iter().nth(rank_offset)
    }

    /// Number of titles scoring within `epsilon` (relative) of the top
    /// score; 0 when nothing matches. Used to detect semantic
    /// incompleteness: an entity name that many titles match about equally.
    pub fn ambiguity_count(&self, query: &str, epsilon: S) -> usize {
        let ranked = self.rank(query);
        let Some(top) = ranked.first() else {
            return 0;
        };
        let floor = (S::one() - epsilon) * top.score;
        ranked.iter().take_while(|r| r.score >= floor).count()
    }

    /// Persist to `dir` with a magic header so incompatible loads fail
    /// loudly rather than mis-deserializing.
    pub fn save(&self, dir: &Path) -> Result<()>
    where
        S: Serialize,
    {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        let path = dir.join(INDEX_FILE);
        let payload = serde_json::to_string(self).map_err(|e| Error::Json {
            path: path.display().to_string(),
            source: e,
        })?;
        fs::write(&path, format!("{INDEX_MAGIC}\n{payload}\n"))
            .map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn open(dir: &Path) -> Result<Self>
    where
        S: for<'de> Deserialize<'de>,
    {
        let path = dir.join(INDEX_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let (header, payload) = text.split_once('\n').ok_or_else(|| Error::IncompatibleFormat {
            path: path.display().to_string(),
            message: "missing header line".to_string(),
        })?;
        if header != INDEX_MAGIC {
            return Err(Error::IncompatibleFormat {
                path: path.display().to_string(),
                message: format!("expected magic {INDEX_MAGIC:?}, found {header:?}"),
            });
        }
        serde_json::from_str(payload).map_err(|e| Error::Json {
            path: path.display().to_string(),
            source: e,
        })
    }
}
