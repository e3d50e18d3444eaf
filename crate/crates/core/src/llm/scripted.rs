//! Deterministic scripted completion backend for tests and offline runs.
//!
//! A script is an ordered list of entries, each mapping (role, optional
//! prompt substring) to a queue of completions. Requests consume the first
//! matching entry's next completion. Consumption cursors are tracked per
//! conversation id, so concurrently evaluated questions each replay the
//! script from the top without interleaving. Running out of completions is
//! a fixture bug and surfaces as an error, unless the entry opts into
//! `repeat`, which keeps serving the last completion (useful for
//! adversarial always-reject scripts).

use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{ChatTurn, PromptRole};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptEntry {
    pub role: PromptRole,
    /// Substring that must occur in the rendered prompt; `None` matches any.
    #[serde(default, rename = "match", skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    pub completions: Vec<String>,
    /// Keep returning the last completion after the queue is exhausted.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub repeat: bool,
}

impl ScriptEntry {
    pub fn new(role: PromptRole, pattern: Option<&str>, completions: &[&str]) -> Self {
        ScriptEntry {
            role,
            pattern: pattern.map(str::to_string),
            completions: completions.iter().map(|s| s.to_string()).collect(),
            repeat: false,
        }
    }

    pub fn repeating(role: PromptRole, pattern: Option<&str>, completion: &str) -> Self {
        ScriptEntry {
            role,
            pattern: pattern.map(str::to_string),
            completions: vec![completion.to_string()],
            repeat: true,
        }
    }
}

/// One request observed by the backend, kept for prompt-shape assertions.
#[derive(Debug, Clone)]
pub struct CapturedRequest {
    pub conversation: String,
    pub role: PromptRole,
    pub prompt: String,
}

#[derive(Debug, Default)]
pub struct ScriptedBackend {
    entries: Vec<ScriptEntry>,
    // (conversation id, entry index) -> completions consumed
    cursors: Mutex<HashMap<(String, usize), usize>>,
    captured: Mutex<Vec<CapturedRequest>>,
}

impl ScriptedBackend {
    pub fn new(entries: Vec<ScriptEntry>) -> Self {
        ScriptedBackend {
            entries,
            cursors: Mutex::new(HashMap::new()),
            captured: Mutex::new(Vec::new()),
        }
    }

    /// Load a script file: one JSON entry per line.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: ScriptEntry =
                serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
                    line: idx + 1,
                    message: format!("script entry: {e}"),
                })?;
            entries.push(entry);
        }
        Ok(ScriptedBackend::new(entries))
    }

    pub fn complete(
        &self,
        conversation: &str,
        role: PromptRole,
        turns: &[ChatTurn],
    ) -> Result<String> {
        let prompt = render_prompt(turns);
        self.captured.lock().unwrap().push(CapturedRequest {
            conversation: conversation.to_string(),
            role,
            prompt: prompt.clone(),
        });
        let mut cursors = self.cursors.lock().unwrap();
        for (idx, entry) in self.entries.iter().enumerate() {
            if entry.role != role {
                continue;
            }
            if let Some(pattern) = &entry.pattern {
                if !prompt.contains(pattern.as_str()) {
                    continue;
                }
            }
            let cursor = cursors
                .entry((conversation.to_string(), idx))
                .or_insert(0);
            if *cursor < entry.completions.len() {
                let completion = entry.completions[*cursor].clone();
                *cursor += 1;
                return Ok(completion);
            }
            if entry.repeat {
                return Ok(entry.completions.last().cloned().unwrap_or_default());
            }
            // Exhausted non-repeating entry: fall through so a later entry
            // with the same match can take over.
        }
        let snippet: String = prompt.chars().take(120).collect();
        Err(Error::ScriptExhausted {
            role: role.as_str().to_string(),
            prompt_snippet: snippet,
        })
    }

    pub fn captured(&self) -> Vec<CapturedRequest> {
        self.captured.lock().unwrap().clone()
    }
}

/// The prompt string patterns are matched against: all turn contents joined
/// by newlines.
pub fn render_prompt(turns: &[ChatTurn]) -> String {
    turns
        .iter()
        .map(|t| t.content.as_str())
        .collect::<Vec<_>>()
        .join("\n")
}
