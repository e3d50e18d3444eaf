//! Entity-indexed corpus: loading, validation, chunking and statistics.
//!
//! The corpus comes in two line-delimited record files: the document file
//! (one complete entity article per line, fields `title` and `text`) and an
//! optional profile sidecar (fields `title` and `profile`, one short summary
//! paragraph per entity). `ingest` validates both and produces an immutable
//! [`CorpusHandle`] with O(1) title lookup, which can be persisted to a
//! corpus directory and re-opened later.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default chunk size in words. The source material does not fix one; 100
/// words matches the passage length of the DPR-style corpora this format
/// replaces.
pub const DEFAULT_CHUNK_SIZE: usize = 100;

const MANIFEST_FILE: &str = "manifest.json";
const DOCUMENTS_FILE: &str = "documents.jsonl";
const PROFILES_FILE: &str = "profiles.jsonl";
const CORPUS_MAGIC: &str = "hirag-corpus-v1";

/// One complete entity article. `title` is the corpus index key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub body: String,
}

/// Per-entity summary paragraph from the profile sidecar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub title: String,
    pub text: String,
}

/// A contiguous run of words from one document body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub doc_id: String,
    /// 0-based position within the document's chunk sequence.
    pub ordinal: usize,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub entity_count: usize,
    /// Whitespace-delimited tokens summed over all document bodies.
    pub word_count: usize,
}

#[derive(Debug, Deserialize)]
struct DocumentRecord {
    #[serde(default)]
    id: Option<String>,
    title: String,
    text: String,
}

#[derive(Debug, Deserialize)]
struct ProfileRecord {
    title: String,
    profile: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    magic: String,
    stats: CorpusStats,
    profile_count: usize,
}

/// Immutable corpus handle. Safe for concurrent reads after ingestion.
#[derive(Debug)]
pub struct CorpusHandle {
    documents: Vec<Document>,
    by_title: HashMap<String, usize>,
    profiles: HashMap<String, Profile>,
    stats: CorpusStats,
}

impl CorpusHandle {
    fn build(documents: Vec<Document>, profiles: Vec<Profile>) -> Result<Self> {
        let mut by_title = HashMap::with_capacity(documents.len());
        let mut word_count = 0usize;
        for (i, doc) in documents.iter().enumerate() {
            word_count += doc.body.split_whitespace().count();
            if by_title.insert(doc.title.clone(), i).is_some() {
                return Err(Error::DuplicateTitle {
                    title: doc.title.clone(),
                });
            }
        }
        let mut profile_map = HashMap::with_capacity(profiles.len());
        for p in profiles {
            if profile_map.insert(p.title.clone(), p.clone()).is_some() {
                return Err(Error::DuplicateTitle { title: p.title });
            }
        }
        let stats = CorpusStats {
            entity_count: documents.len(),
            word_count,
        };
        Ok(CorpusHandle {
            documents,
            by_title,
            profiles: profile_map,
            stats,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn document(&self, title: &str) -> Option<&Document> {
        self.by_title.get(title).map(|&i| &self.documents[i])
    }

    pub fn titles(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.title.as_str())
    }

    /// Exact, case-sensitive profile lookup. Absence is a value, not an
    /// error: the profile sidecar covers only some entities.
    pub fn profile(&self, title: &str) -> Option<&Profile> {
        self.profiles.get(title)
    }

    pub fn profile_count(&self) -> usize {
        self.profiles.len()
    }

    pub fn stats(&self) -> CorpusStats {
        self.stats
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Persist to a corpus directory (manifest + normalized record files).
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        let manifest = Manifest {
            magic: CORPUS_MAGIC.to_string(),
            stats: self.stats,
            profile_count: self.profiles.len(),
        };
        write_json_file(&dir.join(MANIFEST_FILE), &manifest)?;

        let doc_path = dir.join(DOCUMENTS_FILE);
        let mut w = buf_writer(&doc_path)?;
        for doc in &self.documents {
            let line = serde_json::json!({"id": doc.id, "title": doc.title, "text": doc.body});
            writeln!(w, "{line}").map_err(|e| Error::io(doc_path.display().to_string(), e))?;
        }
        w.flush()
            .map_err(|e| Error::io(doc_path.display().to_string(), e))?;

        let prof_path = dir.join(PROFILES_FILE);
        let mut w = buf_writer(&prof_path)?;
        let mut titles: Vec<&String> = self.profiles.keys().collect();
        titles.sort();
        for title in titles {
            let p = &self.profiles[title];
            let line = serde_json::json!({"title": p.title, "profile": p.text});
            writeln!(w, "{line}").map_err(|e| Error::io(prof_path.display().to_string(), e))?;
        }
        w.flush()
            .map_err(|e| Error::io(prof_path.display().to_string(), e))?;
        Ok(())
    }

    /// Open a previously saved corpus directory.
    pub fn open(dir: &Path) -> Result<Self> {
        let manifest_path = dir.join(MANIFEST_FILE);
        let manifest: Manifest = read_json_file(&manifest_path)?;
        if manifest.magic != CORPUS_MAGIC {
            return Err(Error::IncompatibleFormat {
                path: manifest_path.display().to_string(),
                message: format!("expected magic {CORPUS_MAGIC:?}, found {:?}", manifest.magic),
            });
        }
        let profiles_path = dir.join(PROFILES_FILE);
        let profiles_arg = profiles_path.exists().then_some(profiles_path);
        let handle = ingest(&dir.join(DOCUMENTS_FILE), profiles_arg.as_deref())?;
        if handle.stats != manifest.stats {
            return Err(Error::IncompatibleFormat {
                path: manifest_path.display().to_string(),
                message: format!(
                    "manifest stats {:?} disagree with records {:?}",
                    manifest.stats, handle.stats
                ),
            });
        }
        Ok(handle)
    }
}

/// Load and validate the record files. Rejects records with a missing or
/// empty title or body (naming the 1-based line) and duplicate titles.
pub fn ingest(records_path: &Path, profiles_path: Option<&Path>) -> Result<CorpusHandle> {
    let documents = read_document_records(records_path)?;
    let profiles = match profiles_path {
        Some(p) => read_profile_records(p)?,
        None => Vec::new(),
    };
    CorpusHandle::build(documents, profiles)
}

fn read_document_records(path: &Path) -> Result<Vec<Document>> {
    let reader = buf_reader(path)?;
    let mut documents = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let record: DocumentRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                line: lineno,
                message: e.to_string(),
            })?;
        if record.title.is_empty() {
            return Err(Error::MalformedRecord {
                line: lineno,
                message: "empty title".to_string(),
            });
        }
        if record.text.split_whitespace().next().is_none() {
            return Err(Error::MalformedRecord {
                line: lineno,
                message: format!("document {:?} has an empty body", record.title),
            });
        }
        documents.push(Document {
            id: record.id.unwrap_or_else(|| format!("d{idx}")),
            title: record.title,
            body: record.text,
        });
    }
    Ok(documents)
}

fn read_profile_records(path: &Path) -> Result<Vec<Profile>> {
    let reader = buf_reader(path)?;
    let mut profiles = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ProfileRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                line: idx + 1,
                message: e.to_string(),
            })?;
        if record.title.is_empty() {
            return Err(Error::MalformedRecord {
                line: idx + 1,
                message: "empty title".to_string(),
            });
        }
        profiles.push(Profile {
            title: record.title,
            text: record.profile,
        });
    }
    Ok(profiles)
}

/// Collapse whitespace runs to single spaces and trim the ends. Chunk
/// joining cannot preserve newline structure, so round-trip comparisons go
/// through this form.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Split a document body into fixed-size word chunks. Every chunk except
/// possibly the last holds exactly `chunk_size` words; an empty body yields
/// no chunks.
pub fn split_document(doc: &Document, chunk_size: usize) -> Vec<Chunk> {
    assert!(chunk_size >= 1, "chunk_size must be at least 1");
    let words: Vec<&str> = doc.body.split_whitespace().collect();
    words
        .chunks(chunk_size)
        .enumerate()
        .map(|(ordinal, chunk_words)| Chunk {
            doc_id: doc.id.clone(),
            ordinal,
            text: chunk_words.join(" "),
        })
        .collect()
}

fn buf_reader(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path.display().to_string(), e))
}

fn buf_writer(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path.display().to_string(), e))
}

pub(crate) fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let json = serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    fs::write(path, json).map_err(|e| Error::io(path.display().to_string(), e))
}

pub(crate) fn read_json_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.display().to_string(),
        source: e,
    })
}
