//! Black-box completion backends, the disk response cache and the client
//! that ties them together under a concurrency limit.

mod cache;
mod config;
mod http;
mod mock;

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Condvar, Mutex};

use thiserror::Error;

pub use cache::{cache_key, CacheStats, CompletionRecord, ResponseCache};
pub use config::{BackendKind, LlmConfig, MockRule};
pub use http::{HttpBackend, HttpReply, ReqwestTransport, Transport, TransportError};
pub use mock::{MockBackend, ALIGN_TEMPLATE, ECHO_AFTER_MARKER, GLOSS_TEMPLATE};

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("authentication failed (HTTP {status}): {body}")]
    Auth { status: u16, body: String },
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("gave up after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: String },
    #[error("malformed completion response: {0}")]
    Decode(String),
    #[error("environment variable {0} with the API key is not set")]
    MissingApiKey(String),
    #[error("invalid LLM config: {0}")]
    Config(String),
    #[error("invalid mock rule {pattern:?}: {message}")]
    Rule { pattern: String, message: String },
    #[error("cache {path}: {source}")]
    Cache {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Text returned by a backend and how many attempts it took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub attempts: u32,
}

pub trait Backend: Send + Sync {
    fn model_id(&self) -> &str;
    fn complete(&self, prompt: &str) -> Result<Completion, LlmError>;
}

/// Builds the backend named by `config`.
pub fn backend_from_config(config: &LlmConfig) -> Result<Arc<dyn Backend>, LlmError> {
    config.validate()?;
    Ok(match config.backend {
        BackendKind::Http => Arc::new(HttpBackend::from_config(config.clone())?),
        BackendKind::Mock => Arc::new(MockBackend::from_config(config)?),
    })
}

/// Counting semaphore bounding in-flight backend calls.
#[derive(Debug)]
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

struct GatePass<'a>(&'a Gate);

impl Gate {
    fn new(n: usize) -> Self {
        Self {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn enter(&self) -> GatePass<'_> {
        let mut free = self.free.lock().expect("gate lock");
        while *free == 0 {
            free = self.cv.wait(free).expect("gate lock");
        }
        *free -= 1;
        GatePass(self)
    }
}

impl Drop for GatePass<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("gate lock") += 1;
        self.0.cv.notify_one();
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct ClientCounters {
    pub cache_hits: usize,
    pub backend_calls: usize,
}

/// Shareable completion client: optional cache in front of a backend, with
/// at most `max_in_flight` concurrent backend calls.
pub struct LlmClient {
    backend: Arc<dyn Backend>,
    cache: Option<ResponseCache>,
    gate: Gate,
    hits: AtomicUsize,
    calls: AtomicUsize,
}

impl LlmClient {
    pub fn new(backend: Arc<dyn Backend>, max_in_flight: usize) -> Self {
        Self {
            backend,
            cache: None,
            gate: Gate::new(max_in_flight),
            hits: AtomicUsize::new(0),
            calls: AtomicUsize::new(0),
        }
    }

    pub fn with_cache(mut self, cache: ResponseCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn model_id(&self) -> &str {
        self.backend.model_id()
    }

    pub fn counters(&self) -> ClientCounters {
        ClientCounters {
            cache_hits: self.hits.load(Ordering::Relaxed),
            backend_calls: self.calls.load(Ordering::Relaxed),
        }
    }

    /// Calls the backend directly, bypassing the cache.
    pub fn complete(&self, prompt: &str) -> Result<Completion, LlmError> {
        let _pass = self.gate.enter();
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.backend.complete(prompt)
    }

    /// Returns the cached response when present, otherwise completes and
    /// stores the raw response. Without a cache this is [`Self::complete`].
    pub fn cached_complete(&self, prompt: &str) -> Result<String, LlmError> {
        let Some(cache) = &self.cache else {
            return self.complete(prompt).map(|c| c.text);
        };
        let model = self.backend.model_id();
        if let Some(rec) = cache.get(model, prompt) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(rec.response);
        }
        let completion = self.complete(prompt)?;
        cache.put(model, prompt, &completion.text, completion.attempts)?;
        Ok(completion.text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::thread;
    use std::time::Duration;

    struct Slow {
        now: AtomicUsize,
        peak: AtomicUsize,
    }

    impl Backend for Slow {
        fn model_id(&self) -> &str {
            "slow"
        }
        fn complete(&self, prompt: &str) -> Result<Completion, LlmError> {
            let n = self.now.fetch_add(1, Ordering::SeqCst) + 1;
            self.peak.fetch_max(n, Ordering::SeqCst);
            thread::sleep(Duration::from_millis(5));
            self.now.fetch_sub(1, Ordering::SeqCst);
            Ok(Completion {
                text: prompt.to_string(),
                attempts: 1,
            })
        }
    }

    #[test]
    fn in_flight_never_exceeds_limit() {
        let backend = Arc::new(Slow {
            now: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
        });
        let client = LlmClient::new(backend.clone(), 3);
        thread::scope(|s| {
            for i in 0..24 {
                let c = &client;
                s.spawn(move || c.complete(&format!("p{i}")).unwrap());
            }
        });
        let peak = backend.peak.load(Ordering::SeqCst);
        assert!((1..=3).contains(&peak), "peak {peak}");
        assert_eq!(client.counters().backend_calls, 24);
    }
}
