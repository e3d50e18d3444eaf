//! Run configuration: a TOML file mapped onto typed sections, plus the
//! assembly of a ready-to-run [`Runtime`] (corpus, index, backends).
//!
//! Relative paths in the file resolve against the file's own directory.
//! API keys are never stored in the file; the config names an environment
//! variable instead. Everything is validated up front so a bad path or
//! threshold fails before any work starts.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use crate::corpus::CorpusHandle;
use crate::error::{Error, Result};
use crate::index::{EmbedderHandle, SparseIndex, DEFAULT_EMBED_DIM};
use crate::llm::{Backend, HttpLlm, HttpLlmConfig, LlmClient, PromptRole, ScriptedBackend};
use crate::pipeline::{Mode, PipelineConfig, PipelineDeps};
use crate::search::{SearchClient, SearchResult};
use crate::Score;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub paths: PathsConfig,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub llm: LlmSection,
    #[serde(default)]
    pub embedder: EmbedderSection,
    #[serde(default)]
    pub search: Option<SearchSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    pub corpus: Option<PathBuf>,
    pub index: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { concurrency: 1 }
    }
}

fn default_concurrency() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmSection {
    #[serde(default = "default_llm_backend")]
    pub backend: String,
    /// Script file for the scripted backend.
    pub script: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key_env: Option<String>,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    /// Per-role overrides, e.g. `[llm.roles.decomposer]` with its own
    /// endpoint and model.
    #[serde(default)]
    pub roles: HashMap<String, RoleOverride>,
}

impl Default for LlmSection {
    fn default() -> Self {
        LlmSection {
            backend: default_llm_backend(),
            script: None,
            endpoint: None,
            model: None,
            api_key_env: None,
            temperature: 0.0,
            max_tokens: default_max_tokens(),
            timeout_secs: default_timeout_secs(),
            roles: HashMap::new(),
        }
    }
}

fn default_llm_backend() -> String {
    "scripted".to_string()
}

fn default_max_tokens() -> u32 {
    256
}

fn default_timeout_secs() -> u64 {
    30
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleOverride {
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key_env: Option<String>,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedderSection {
    #[serde(default = "default_embedder_backend")]
    pub backend: String,
    #[serde(default = "default_embed_dim")]
    pub dim: usize,
    pub endpoint: Option<String>,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
}

impl Default for EmbedderSection {
    fn default() -> Self {
        EmbedderSection {
            backend: default_embedder_backend(),
            dim: default_embed_dim(),
            endpoint: None,
            timeout_secs: default_timeout_secs(),
        }
    }
}

fn default_embedder_backend() -> String {
    "hashed".to_string()
}

fn default_embed_dim() -> usize {
    DEFAULT_EMBED_DIM
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    pub backend: String,
    pub script: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub api_key_env: Option<String>,
    #[serde(default = "default_rps")]
    pub requests_per_second: f64,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
}

fn default_rps() -> f64 {
    5.0
}

impl FileConfig {
    /// Parse a config file, resolving its relative paths against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut config: FileConfig = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let resolve = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&path);
                }
            }
        };
        resolve(&mut self.paths.corpus);
        resolve(&mut self.paths.index);
        resolve(&mut self.llm.script);
        if let Some(search) = &mut self.search {
            resolve(&mut search.script);
        }
    }
}

/// Fully assembled run state: corpus, index and backends, validated and
/// ready for the pipeline.
pub struct Runtime {
    pub corpus: CorpusHandle,
    pub index: SparseIndex<Score>,
    pub embedder: EmbedderHandle,
    pub llm: LlmClient,
    pub search: Option<SearchClient>,
    pub pipeline: PipelineConfig,
    pub concurrency: usize,
}

impl Runtime {
    pub fn from_config(config: &FileConfig) -> Result<Self> {
        config.pipeline.validate()?;
        let corpus_dir = config
            .paths
            .corpus
            .as_ref()
            .ok_or_else(|| Error::Config("no corpus path configured".to_string()))?;
        let index_dir = config
            .paths
            .index
            .as_ref()
            .ok_or_else(|| Error::Config("no index path configured".to_string()))?;
        let corpus = CorpusHandle::open(corpus_dir)?;
        let index = SparseIndex::open(index_dir)?;
        let embedder = build_embedder(&config.embedder)?;
        let llm = build_llm(&config.llm)?;
        let search = match &config.search {
            Some(section) => Some(build_search(section)?),
            None => None,
        };
        if config.pipeline.mode == Mode::Online && search.is_none() {
            return Err(Error::Config(
                "online mode requires a [search] section".to_string(),
            ));
        }
        Ok(Runtime {
            corpus,
            index,
            embedder,
            llm,
            search,
            pipeline: config.pipeline.clone(),
            concurrency: config.run.concurrency.max(1),
        })
    }

    pub fn deps(&self) -> PipelineDeps<'_, Score> {
        PipelineDeps {
            corpus: &self.corpus,
            index: &self.index,
            embedder: &self.embedder,
            llm: &self.llm,
            search: self.search.as_ref(),
            config: &self.pipeline,
        }
    }
}

fn build_embedder(section: &EmbedderSection) -> Result<EmbedderHandle> {
    match section.backend.as_str() {
        "hashed" => Ok(EmbedderHandle::hashed(section.dim)),
        "http" => {
            let endpoint = section.endpoint.as_ref().ok_or_else(|| {
                Error::Config("embedder backend \"http\" requires an endpoint".to_string())
            })?;
            Ok(EmbedderHandle::http(
                endpoint,
                section.dim,
                Duration::from_secs(section.timeout_secs),
            ))
        }
        other => Err(Error::Config(format!("unknown embedder backend {other:?}"))),
    }
}

fn api_key_from_env(var: &Option<String>) -> Result<Option<String>> {
    match var {
        None => Ok(None),
        Some(name) => match std::env::var(name) {
            Ok(value) => Ok(Some(value)),
            Err(_) => Err(Error::Config(format!(
                "api key environment variable {name} is not set"
            ))),
        },
    }
}

fn build_llm(section: &LlmSection) -> Result<LlmClient> {
    let mut client = match section.backend.as_str() {
        "scripted" => {
            let script = section.script.as_ref().ok_or_else(|| {
                Error::Config("llm backend \"scripted\" requires a script path".to_string())
            })?;
            LlmClient::scripted(std::sync::Arc::new(ScriptedBackend::from_path(script)?))
        }
        "http" => {
            let config = http_llm_config(
                section.endpoint.as_deref(),
                section.model.as_deref(),
                &section.api_key_env,
                section.temperature,
                section.max_tokens,
                section.timeout_secs,
            )?;
            LlmClient::http(config)
        }
        other => return Err(Error::Config(format!("unknown llm backend {other:?}"))),
    };

    for (role_name, role) in &section.roles {
        let prompt_role = parse_role(role_name)?;
        let api_key_env = role
            .api_key_env
            .clone()
            .or_else(|| section.api_key_env.clone());
        let config = http_llm_config(
            role.endpoint.as_deref().or(section.endpoint.as_deref()),
            role.model.as_deref().or(section.model.as_deref()),
            &api_key_env,
            role.temperature.unwrap_or(section.temperature),
            role.max_tokens.unwrap_or(section.max_tokens),
            section.timeout_secs,
        )?;
        client = client.with_role_backend(
            prompt_role,
            Backend::Http(std::sync::Arc::new(HttpLlm::new(config))),
        );
    }
    Ok(client)
}

fn http_llm_config(
    endpoint: Option<&str>,
    model: Option<&str>,
    api_key_env: &Option<String>,
    temperature: f64,
    max_tokens: u32,
    timeout_secs: u64,
) -> Result<HttpLlmConfig> {
    let endpoint = endpoint
        .ok_or_else(|| Error::Config("llm backend \"http\" requires an endpoint".to_string()))?;
    let model = model
        .ok_or_else(|| Error::Config("llm backend \"http\" requires a model name".to_string()))?;
    let mut config = HttpLlmConfig::new(endpoint, model);
    config.api_key = api_key_from_env(api_key_env)?;
    config.temperature = temperature;
    config.max_tokens = max_tokens;
    config.timeout = Duration::from_secs(timeout_secs);
    Ok(config)
}

fn parse_role(name: &str) -> Result<PromptRole> {
    PromptRole::ALL
        .iter()
        .copied()
        .find(|r| r.as_str() == name)
        .ok_or_else(|| Error::Config(format!("unknown llm role {name:?}")))
}

#[derive(Debug, Deserialize)]
struct ScriptedSearchRecord {
    query: String,
    text: String,
    #[serde(default)]
    url: Option<String>,
}

fn build_search(section: &SearchSection) -> Result<SearchClient> {
    match section.backend.as_str() {
        "scripted" => {
            let script = section.script.as_ref().ok_or_else(|| {
                Error::Config("search backend \"scripted\" requires a script path".to_string())
            })?;
            let text = std::fs::read_to_string(script)
                .map_err(|e| Error::io(script.display().to_string(), e))?;
            let mut results = HashMap::new();
            for (idx, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let record: ScriptedSearchRecord =
                    serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
                        line: idx + 1,
                        message: format!("search script: {e}"),
                    })?;
                results.insert(
                    record.query.clone(),
                    SearchResult {
                        text: record.text,
                        source_url: record
                            .url
                            .unwrap_or_else(|| format!("scripted://{idx}")),
                    },
                );
            }
            Ok(SearchClient::scripted(results))
        }
        "http" => {
            let endpoint = section.endpoint.as_ref().ok_or_else(|| {
                Error::Config("search backend \"http\" requires an endpoint".to_string())
            })?;
            Ok(SearchClient::web(
                endpoint,
                api_key_from_env(&section.api_key_env)?,
                Duration::from_secs(section.timeout_secs),
                section.requests_per_second,
            ))
        }
        other => Err(Error::Config(format!("unknown search backend {other:?}"))),
    }
}
