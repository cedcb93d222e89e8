//! Model client abstraction: a live HTTP provider and a record/replay mock
//! that makes the whole pipeline runnable offline and byte-deterministic.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("no recorded response for prompt hash {hash} in {fixture}")]
    ReplayMiss { hash: String, fixture: String },
    #[error("fixture error: {0}")]
    Fixture(String),
    #[error("provider error: {0}")]
    Provider(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Usage {
    pub input_tokens: usize,
    pub output_tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub usage: Usage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub temperature: f64,
    pub max_tokens: Option<u32>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            temperature: 0.0,
            max_tokens: None,
        }
    }
}

pub trait LlmClient: Send + Sync {
    fn complete(&self, prompt: &str, params: &GenParams) -> Result<Completion, TransportError>;
}

/// Hex SHA-256 of the prompt text; the replay fixture lookup key.
pub fn prompt_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

#[derive(Debug, Serialize, Deserialize)]
struct FixtureRecord {
    hash: String,
    response: String,
    usage: Usage,
}

/// Replays recorded completions from a line-delimited fixture file, keyed by
/// prompt hash. Replays are byte-identical across runs and safe to share
/// across threads.
pub struct ReplayClient {
    fixture: String,
    records: HashMap<String, (String, Usage)>,
}

impl ReplayClient {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, TransportError> {
        let path = path.as_ref();
        let file = File::open(path)?;
        let mut records = HashMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: FixtureRecord = serde_json::from_str(&line)
                .map_err(|e| TransportError::Fixture(format!("line {}: {e}", i + 1)))?;
            records.insert(record.hash, (record.response, record.usage));
        }
        Ok(ReplayClient {
            fixture: path.display().to_string(),
            records,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl LlmClient for ReplayClient {
    fn complete(&self, prompt: &str, _params: &GenParams) -> Result<Completion, TransportError> {
        let hash = prompt_hash(prompt);
        match self.records.get(&hash) {
            Some((text, usage)) => Ok(Completion {
                text: text.clone(),
                usage: *usage,
            }),
            None => Err(TransportError::ReplayMiss {
                hash,
                fixture: self.fixture.clone(),
            }),
        }
    }
}

/// Wraps another client and appends every completion to a fixture file that
/// [`ReplayClient`] can replay later.
pub struct RecordingClient<C> {
    inner: C,
    sink: Mutex<File>,
}

impl<C: LlmClient> RecordingClient<C> {
    pub fn create(inner: C, path: impl AsRef<Path>) -> Result<Self, TransportError> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path.as_ref())?;
        Ok(RecordingClient {
            inner,
            sink: Mutex::new(file),
        })
    }
}

impl<C: LlmClient> LlmClient for RecordingClient<C> {
    fn complete(&self, prompt: &str, params: &GenParams) -> Result<Completion, TransportError> {
        let completion = self.inner.complete(prompt, params)?;
        let record = FixtureRecord {
            hash: prompt_hash(prompt),
            response: completion.text.clone(),
            usage: completion.usage,
        };
        let line = serde_json::to_string(&record)
            .map_err(|e| TransportError::Fixture(e.to_string()))?;
        let mut sink = self.sink.lock().expect("recording sink poisoned");
        writeln!(sink, "{line}")?;
        Ok(completion)
    }
}

/// Live client for an OpenAI-compatible chat completions endpoint. Endpoint,
/// key, and model come from `EASEJSON_API_BASE`, `EASEJSON_API_KEY`, and
/// `EASEJSON_MODEL`; no vendor is privileged.
pub struct LiveClient {
    base_url: String,
    api_key: String,
    model: String,
    http: reqwest::blocking::Client,
}

impl LiveClient {
    pub fn from_env() -> Result<Self, TransportError> {
        let get = |name: &str| {
            std::env::var(name)
                .map_err(|_| TransportError::Provider(format!("{name} is not set")))
        };
        Ok(LiveClient {
            base_url: get("EASEJSON_API_BASE")?,
            api_key: get("EASEJSON_API_KEY")?,
            model: get("EASEJSON_MODEL")?,
            http: reqwest::blocking::Client::new(),
        })
    }
}

impl LlmClient for LiveClient {
    fn complete(&self, prompt: &str, params: &GenParams) -> Result<Completion, TransportError> {
        let url = format!("{}/chat/completions", self.base_url.trim_end_matches('/'));
        let mut body = serde_json::json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
        });
        if let Some(max_tokens) = params.max_tokens {
            body["max_tokens"] = serde_json::json!(max_tokens);
        }
        let response = self
            .http
            .post(&url)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| TransportError::Provider(e.to_string()))?;
        if !response.status().is_success() {
            return Err(TransportError::Provider(format!(
                "HTTP {} from {url}",
                response.status()
            )));
        }
        let payload: serde_json::Value = response
            .json()
            .map_err(|e| TransportError::Provider(e.to_string()))?;
        let text = payload["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| TransportError::Provider("response has no content".to_string()))?
            .to_string();
        let usage = Usage {
            input_tokens: payload["usage"]["prompt_tokens"].as_u64().unwrap_or(0) as usize,
            output_tokens: payload["usage"]["completion_tokens"].as_u64().unwrap_or(0) as usize,
        };
        Ok(Completion { text, usage })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::NamedTempFile;

    struct Echo;

    impl LlmClient for Echo {
        fn complete(&self, prompt: &str, _p: &GenParams) -> Result<Completion, TransportError> {
            Ok(Completion {
                text: format!("echo: {prompt}"),
                usage: Usage {
                    input_tokens: prompt.len(),
                    output_tokens: prompt.len() + 6,
                },
            })
        }
    }

    #[test]
    fn record_then_replay_is_byte_identical() {
        let fixture = NamedTempFile::new().unwrap();
        let recorder = RecordingClient::create(Echo, fixture.path()).unwrap();
        let params = GenParams::default();
        let live1 = recorder.complete("hello", &params).unwrap();
        let live2 = recorder.complete("world", &params).unwrap();
        drop(recorder);

        let replay = ReplayClient::open(fixture.path()).unwrap();
        assert_eq!(replay.len(), 2);
        assert_eq!(replay.complete("hello", &params).unwrap(), live1);
        assert_eq!(replay.complete("world", &params).unwrap(), live2);
        assert!(matches!(
            replay.complete("unseen", &params).unwrap_err(),
            TransportError::ReplayMiss { .. }
        ));
    }

    #[test]
    fn prompt_hash_is_stable() {
        assert_eq!(prompt_hash("x"), prompt_hash("x"));
        assert_ne!(prompt_hash("x"), prompt_hash("y"));
        assert_eq!(prompt_hash("").len(), 64);
    }
}
