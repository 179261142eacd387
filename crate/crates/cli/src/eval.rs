//! Querying a chat-completions endpoint with a response cache.
//!
//! Cache layout: `<cache_dir>/<sha256(model NUL prompt)>.json`, each file a
//! [`CacheEntry`]. Files are written to a temporary name and renamed into
//! place, so a crashed run never leaves a torn entry.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use puzzletree_core::EvalTask;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tokio::sync::Semaphore;
use tokio::task::JoinSet;

pub const RESPONSE_SCHEMA: &str = "puzzletree.response.v1";
pub const CACHE_SCHEMA: &str = "puzzletree.cache.v1";

fn default_endpoint() -> String {
    "https://api.openai.com/v1/chat/completions".into()
}
fn default_timeout() -> u64 {
    120
}
fn default_retries() -> u32 {
    4
}
fn default_key_env() -> String {
    "OPENAI_API_KEY".into()
}
fn default_backoff() -> u64 {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "default_endpoint")]
    pub endpoint: String,
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub max_tokens: Option<u32>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    /// Name of the environment variable holding the API key. The key
    /// itself is never stored.
    #[serde(default = "default_key_env")]
    pub api_key_env: String,
    /// First retry delay; doubles on each further attempt.
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
}

impl ModelConfig {
    pub fn new(model: impl Into<String>) -> Self {
        Self {
            endpoint: default_endpoint(),
            model: model.into(),
            temperature: 0.0,
            max_tokens: None,
            timeout_secs: default_timeout(),
            max_retries: default_retries(),
            api_key_env: default_key_env(),
            backoff_ms: default_backoff(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.timeout_secs == 0 {
            bail!("timeout must be positive");
        }
        if self.model.trim().is_empty() {
            bail!("model name is empty");
        }
        Ok(())
    }

    /// Read a TOML or JSON file (by extension).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

/// One line of a responses file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub schema: String,
    pub task_id: String,
    pub model: String,
    pub temperature: f64,
    pub response: Option<String>,
    pub failed: bool,
    pub error: Option<String>,
    pub cached: bool,
    pub latency_ms: u64,
    pub attempts: u32,
    pub usage: Option<Usage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema: String,
    pub model: String,
    pub prompt_sha256: String,
    pub response: String,
    pub usage: Option<Usage>,
}

pub fn prompt_digest(model: &str, prompt: &str) -> String {
    let mut h = Sha256::new();
    h.update(model.as_bytes());
    h.update([0u8]);
    h.update(prompt.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).with_context(|| format!("creating cache dir {}", dir.display()))?;
        Ok(Self { dir })
    }

    fn path(&self, digest: &str) -> PathBuf {
        self.dir.join(format!("{digest}.json"))
    }

    pub fn get(&self, model: &str, prompt: &str) -> Option<CacheEntry> {
        let text = std::fs::read_to_string(self.path(&prompt_digest(model, prompt))).ok()?;
        serde_json::from_str::<CacheEntry>(&text).ok().filter(|e| e.model == model)
    }

    pub fn put(&self, entry: &CacheEntry) -> Result<()> {
        let dest = self.path(&entry.prompt_sha256);
        static SEQ: AtomicU64 = AtomicU64::new(0);
        let n = SEQ.fetch_add(1, Ordering::Relaxed);
        let tmp = self.dir.join(format!(".{}.{}.{n}.tmp", entry.prompt_sha256, std::process::id()));
        std::fs::write(&tmp, serde_json::to_vec(entry)?)?;
        std::fs::rename(&tmp, &dest)?;
        Ok(())
    }
}

enum CallError {
    /// Worth retrying: timeouts, connection failures, 429 and 5xx.
    Transient(String),
    /// Bad credentials; the whole run stops.
    Auth(String),
    /// Any other rejection; the task fails without retries.
    Fatal(String),
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: Option<String>,
}

#[derive(Clone)]
pub struct Client {
    http: reqwest::Client,
    cfg: Arc<ModelConfig>,
    key: Option<String>,
}

impl Client {
    pub fn new(cfg: ModelConfig) -> Result<Self> {
        cfg.validate()?;
        let key = std::env::var(&cfg.api_key_env).ok().filter(|k| !k.is_empty());
        if key.is_none() {
            tracing::warn!(var = %cfg.api_key_env, "no API key in environment; sending unauthenticated requests");
        }
        let http = reqwest::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()?;
        Ok(Self {
            http,
            cfg: Arc::new(cfg),
            key,
        })
    }

    async fn call_once(&self, prompt: &str) -> std::result::Result<(String, Option<Usage>), CallError> {
        let mut body = serde_json::json!({
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.cfg.temperature,
        });
        if let Some(m) = self.cfg.max_tokens {
            body["max_tokens"] = m.into();
        }
        let mut req = self.http.post(&self.cfg.endpoint).json(&body);
        if let Some(k) = &self.key {
            req = req.bearer_auth(k);
        }
        let resp = req.send().await.map_err(|e| CallError::Transient(e.to_string()))?;
        let status = resp.status();
        if status == 401 || status == 403 {
            return Err(CallError::Auth(format!("endpoint answered {status}")));
        }
        if status == 429 || status.is_server_error() {
            return Err(CallError::Transient(format!("endpoint answered {status}")));
        }
        if !status.is_success() {
            let text = resp.text().await.unwrap_or_default();
            return Err(CallError::Fatal(format!("endpoint answered {status}: {text}")));
        }
        let parsed: ChatResponse = resp
            .json()
            .await
            .map_err(|e| CallError::Fatal(format!("unreadable response body: {e}")))?;
        let content = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| CallError::Fatal("response has no message content".into()))?;
        Ok((content, parsed.usage))
    }

    /// Query with retries. `Err` only for authentication failures.
    async fn complete(&self, task: &EvalTask, cache: &Cache) -> Result<EvalRecord> {
        let cfg = &self.cfg;
        let mut record = EvalRecord {
            schema: RESPONSE_SCHEMA.into(),
            task_id: task.id.clone(),
            model: cfg.model.clone(),
            temperature: cfg.temperature,
            response: None,
            failed: false,
            error: None,
            cached: false,
            latency_ms: 0,
            attempts: 0,
            usage: None,
        };
        if let Some(hit) = cache.get(&cfg.model, &task.prompt) {
            record.response = Some(hit.response);
            record.usage = hit.usage;
            record.cached = true;
            return Ok(record);
        }
        let start = Instant::now();
        let mut delay = Duration::from_millis(cfg.backoff_ms);
        loop {
            record.attempts += 1;
            match self.call_once(&task.prompt).await {
                Ok((text, usage)) => {
                    cache.put(&CacheEntry {
                        schema: CACHE_SCHEMA.into(),
                        model: cfg.model.clone(),
                        prompt_sha256: prompt_digest(&cfg.model, &task.prompt),
                        response: text.clone(),
                        usage: usage.clone(),
                    })?;
                    record.response = Some(text);
                    record.usage = usage;
                    break;
                }
                Err(CallError::Auth(e)) => bail!("authentication failed for {}: {e}", cfg.endpoint),
                Err(CallError::Transient(e)) if record.attempts <= cfg.max_retries => {
                    tracing::debug!(task = %task.id, attempt = record.attempts, error = %e, "retrying");
                    tokio::time::sleep(delay).await;
                    delay *= 2;
                }
                Err(CallError::Transient(e) | CallError::Fatal(e)) => {
                    tracing::warn!(task = %task.id, error = %e, "task failed");
                    record.failed = true;
                    record.error = Some(e);
                    break;
                }
            }
        }
        record.latency_ms = start.elapsed().as_millis() as u64;
        Ok(record)
    }
}

/// Query every task with at most `parallelism` requests in flight.
/// Records come back in task order whatever the completion order.
pub async fn run_eval(cfg: ModelConfig, tasks: Vec<EvalTask>, parallelism: usize, cache_dir: &Path) -> Result<Vec<EvalRecord>> {
    if parallelism == 0 {
        bail!("parallelism must be at least 1");
    }
    let client = Client::new(cfg)?;
    let cache = Cache::new(cache_dir)?;
    let gate = Arc::new(Semaphore::new(parallelism));
    let mut set = JoinSet::new();
    let n = tasks.len();
    for (i, task) in tasks.into_iter().enumerate() {
        let (client, cache, gate) = (client.clone(), cache.clone(), gate.clone());
        set.spawn(async move {
            let _permit = gate.acquire_owned().await.expect("semaphore is never closed");
            client.complete(&task, &cache).await.map(|r| (i, r))
        });
    }
    let mut out: Vec<Option<EvalRecord>> = vec![None; n];
    while let Some(joined) = set.join_next().await {
        match joined? {
            Ok((i, r)) => out[i] = Some(r),
            Err(e) => {
                set.abort_all();
                return Err(e);
            }
        }
    }
    Ok(out.into_iter().map(|r| r.expect("every task reports")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_depends_on_model_and_prompt() {
        let a = prompt_digest("m1", "p");
        assert_eq!(a.len(), 64);
        assert_ne!(a, prompt_digest("m2", "p"));
        assert_ne!(a, prompt_digest("m1", "q"));
        assert_eq!(a, prompt_digest("m1", "p"));
    }

    #[test]
    fn config_defaults_and_validation() {
        let cfg: ModelConfig = toml::from_str("model = \"m\"").unwrap();
        assert_eq!(cfg.temperature, 0.0);
        assert_eq!(cfg.api_key_env, "OPENAI_API_KEY");
        assert!(ModelConfig { timeout_secs: 0, ..cfg.clone() }.validate().is_err());
        assert!(toml::from_str::<ModelConfig>("model = \"m\"\napi_key = \"x\"").is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path()).unwrap();
        assert!(cache.get("m", "p").is_none());
        cache
            .put(&CacheEntry {
                schema: CACHE_SCHEMA.into(),
                model: "m".into(),
                prompt_sha256: prompt_digest("m", "p"),
                response: "Answer: (A)".into(),
                usage: None,
            })
            .unwrap();
        assert_eq!(cache.get("m", "p").unwrap().response, "Answer: (A)");
        assert!(cache.get("other", "p").is_none());
    }
}
