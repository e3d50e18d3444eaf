//! Live chat-completions backend.
//!
//! Speaks the common chat-completions wire shape: a model name, a message
//! list with roles, temperature and max_tokens in; the first choice's
//! message content out. Transient failures (transport errors, 429, 5xx)
//! are retried with exponential backoff within a bounded budget.

use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::ChatTurn;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct HttpLlmConfig {
    pub endpoint: String,
    pub model: String,
    /// Sent as a bearer token when present.
    pub api_key: Option<String>,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout: Duration,
    /// Total attempts, including the first (spec budget: at most 3).
    pub max_attempts: u32,
    pub backoff_base: Duration,
}

impl HttpLlmConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        HttpLlmConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key: None,
            temperature: 0.0,
            max_tokens: 256,
            timeout: Duration::from_secs(30),
            max_attempts: 3,
            backoff_base: Duration::from_millis(200),
        }
    }
}

#[derive(Debug)]
pub struct HttpLlm {
    config: HttpLlmConfig,
    agent: ureq::Agent,
}

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: &'a str,
    messages: Vec<WireMessage<'a>>,
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct CompletionResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    content: Option<String>,
}

impl HttpLlm {
    pub fn new(config: HttpLlmConfig) -> Self {
        let agent: ureq::Agent = ureq::config::Config::builder()
            .timeout_global(Some(config.timeout))
            .build()
            .new_agent();
        HttpLlm { config, agent }
    }

    pub fn config(&self) -> &HttpLlmConfig {
        &self.config
    }

    pub fn complete(&self, turns: &[ChatTurn]) -> Result<String> {
        let request = CompletionRequest {
            model: &self.config.model,
            messages: turns
                .iter()
                .map(|t| WireMessage {
                    role: t.role.as_str(),
                    content: &t.content,
                })
                .collect(),
            temperature: self.config.temperature,
            max_tokens: self.config.max_tokens,
        };
        let mut last_error = None;
        for attempt in 0..self.config.max_attempts {
            if attempt > 0 {
                thread::sleep(self.config.backoff_base * 2u32.pow(attempt - 1));
            }
            match self.send(&request) {
                Ok(content) => return Ok(content),
                Err(e) => {
                    let retryable = matches!(e, Error::Transport { retryable: true, .. });
                    if !retryable {
                        return Err(e);
                    }
                    log::warn!(
                        "llm request attempt {}/{} failed: {e}",
                        attempt + 1,
                        self.config.max_attempts
                    );
                    last_error = Some(e);
                }
            }
        }
        Err(last_error.unwrap_or(Error::Transport {
            message: "retry budget exhausted".to_string(),
            retryable: false,
        }))
    }

    fn send(&self, request: &CompletionRequest<'_>) -> Result<String> {
        let mut builder = self.agent.post(&self.config.endpoint);
        if let Some(key) = &self.config.api_key {
            builder = builder.header("authorization", &format!("Bearer {key}"));
        }
        let mut response = builder.send_json(request).map_err(map_ureq_error)?;
        let parsed: CompletionResponse =
            response.body_mut().read_json().map_err(|e| Error::Transport {
                message: format!("invalid completion response: {e}"),
                retryable: false,
            })?;
        Ok(parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .unwrap_or_default())
    }
}

fn map_ureq_error(e: ureq::Error) -> Error {
    match e {
        ureq::Error::StatusCode(code) => Error::Transport {
            message: format!("completion endpoint returned status {code}"),
            retryable: code == 429 || code >= 500,
        },
        other => Error::Transport {
            message: format!("completion endpoint: {other}"),
            retryable: true,
        },
    }
}
