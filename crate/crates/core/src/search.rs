//! Web search client for the online rewrite path.
//!
//! Single-candidate discipline applies here too: only the top organic
//! result's snippet is consumed per query. The scripted backend replays a
//! fixed query->snippet map for tests; the web backend speaks a
//! Serper-style JSON API. Transport failures are kept distinct from "no
//! results" so the pipeline can fall back to local retrieval on the former.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Deserialize;

use crate::error::{Error, Result};

/// Top search hit: snippet text plus its source link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub text: String,
    pub source_url: String,
}

#[derive(Debug)]
enum SearchBackend {
    Scripted {
        // query -> (snippet, url); queries not in the map return no results
        results: HashMap<String, SearchResult>,
    },
    Web {
        endpoint: String,
        api_key: Option<String>,
        timeout: Duration,
        limiter: Mutex<TokenBucket>,
    },
}

#[derive(Debug)]
pub struct SearchClient {
    backend: SearchBackend,
}

impl SearchClient {
    pub fn scripted(results: HashMap<String, SearchResult>) -> Self {
        SearchClient {
            backend: SearchBackend::Scripted { results },
        }
    }

    /// Convenience for fixtures: query -> snippet, with a synthetic URL.
    pub fn scripted_snippets(pairs: &[(&str, &str)]) -> Self {
        let results = pairs
            .iter()
            .map(|(q, text)| {
                (
                    q.to_string(),
                    SearchResult {
                        text: text.to_string(),
                        source_url: format!("scripted://{}", q.replace(' ', "-")),
                    },
                )
            })
            .collect();
        SearchClient::scripted(results)
    }

    pub fn web(
        endpoint: impl Into<String>,
        api_key: Option<String>,
        timeout: Duration,
        requests_per_second: f64,
    ) -> Self {
        SearchClient {
            backend: SearchBackend::Web {
                endpoint: endpoint.into(),
                api_key,
                timeout,
                limiter: Mutex::new(TokenBucket::new(requests_per_second)),
            },
        }
    }

    /// Top result for `query`, or `None` when the engine finds nothing.
    /// Transport failures surface as [`Error::SearchTransport`].
    pub fn search(&self, query: &str) -> Result<Option<SearchResult>> {
        match &self.backend {
            SearchBackend::Scripted { results } => Ok(results.get(query).cloned()),
            SearchBackend::Web {
                endpoint,
                api_key,
                timeout,
                limiter,
            } => {
                limiter.lock().unwrap().acquire();
                web_search(endpoint, api_key.as_deref(), *timeout, query)
            }
        }
    }
}

#[derive(Deserialize)]
struct WebSearchResponse {
    #[serde(default)]
    organic: Vec<OrganicHit>,
}

#[derive(Deserialize)]
struct OrganicHit {
    #[serde(default)]
    snippet: Option<String>,
    #[serde(default)]
    link: Option<String>,
}

fn web_search(
    endpoint: &str,
    api_key: Option<&str>,
    timeout: Duration,
    query: &str,
) -> Result<Option<SearchResult>> {
    let agent: ureq::Agent = ureq::config::Config::builder()
        .timeout_global(Some(timeout))
        .build()
        .new_agent();
    let mut builder = agent.post(endpoint);
    if let Some(key) = api_key {
        builder = builder.header("x-api-key", key);
    }
    let mut response = builder
        .send_json(serde_json::json!({"q": query, "num": 1}))
        .map_err(|e| Error::SearchTransport {
            message: e.to_string(),
        })?;
    let parsed: WebSearchResponse =
        response
            .body_mut()
            .read_json()
            .map_err(|e| Error::SearchTransport {
                message: format!("invalid response: {e}"),
            })?;
    Ok(parsed.organic.into_iter().find_map(|hit| {
        let text = hit.snippet.unwrap_or_default();
        if text.is_empty() {
            None
        } else {
            Some(SearchResult {
                text,
                source_url: hit.link.unwrap_or_default(),
            })
        }
    }))
}

/// Minimal token bucket: `rate` requests per second, burst of one second.
#[derive(Debug)]
struct TokenBucket {
    rate: f64,
    tokens: f64,
    last: Instant,
}

impl TokenBucket {
    fn new(rate: f64) -> Self {
        TokenBucket {
            rate: rate.max(0.001),
            tokens: rate.max(1.0),
            last: Instant::now(),
        }
    }

    fn acquire(&mut self) {
        loop {
            let now = Instant::now();
            self.tokens = (self.tokens + now.duration_since(self.last).as_secs_f64() * self.rate)
                .min(self.rate.max(1.0));
            self.last = now;
            if self.tokens >= 1.0 {
                self.tokens -= 1.0;
                return;
            }
            let wait = (1.0 - self.tokens) / self.rate;
            std::thread::sleep(Duration::from_secs_f64(wait.min(0.25)));
        }
    }
}
