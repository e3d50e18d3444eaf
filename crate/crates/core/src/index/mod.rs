//! Hierarchical retrieval primitives: sparse BM25 over titles at the
//! document level, dense embedding similarity over chunks at the chunk
//! level.

pub mod dense;
pub mod sparse;

pub use dense::{rank_chunks, EmbedderHandle, Embedding, DEFAULT_EMBED_DIM};
pub use sparse::{tokenize, RankedTitle, SparseIndex, DEFAULT_B, DEFAULT_K1};
