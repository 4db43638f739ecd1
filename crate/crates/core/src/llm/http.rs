use std::sync::Arc;
use std::thread;
use std::time::Duration;

use serde_json::json;

use super::{Backend, Completion, LlmConfig, LlmError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpReply {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportError {
    Timeout,
    Connect(String),
    Other(String),
}

impl std::fmt::Display for TransportError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TransportError::Timeout => f.write_str("request timed out"),
            TransportError::Connect(m) => write!(f, "connection failed: {m}"),
            TransportError::Other(m) => f.write_str(m),
        }
    }
}

/// Minimal blocking POST so the retry logic can be driven by stubs.
pub trait Transport: Send + Sync {
    fn post(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &str,
        timeout: Duration,
    ) -> Result<HttpReply, TransportError>;
}

pub struct ReqwestTransport {
    client: reqwest::blocking::Client,
}

impl ReqwestTransport {
    pub fn new() -> Result<Self, LlmError> {
        let client = reqwest::blocking::Client::builder()
            .build()
            .map_err(|e| LlmError::Config(e.to_string()))?;
        Ok(Self { client })
    }
}

impl Transport for ReqwestTransport {
    fn post(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &str,
        timeout: Duration,
    ) -> Result<HttpReply, TransportError> {
        let mut req = self
            .client
            .post(url)
            .timeout(timeout)
            .header("Content-Type", "application/json")
            .body(body.to_string());
        for (k, v) in headers {
            req = req.header(k, v);
        }
        let resp = req.send().map_err(|e| {
            if e.is_timeout() {
                TransportError::Timeout
            } else if e.is_connect() {
                TransportError::Connect(e.to_string())
            } else {
                TransportError::Other(e.to_string())
            }
        })?;
        let status = resp.status().as_u16();
        let body = resp
            .text()
            .map_err(|e| TransportError::Other(e.to_string()))?;
        Ok(HttpReply { status, body })
    }
}

fn is_transient(status: u16) -> bool {
    matches!(status, 408 | 409 | 425 | 429) || status >= 500
}

/// Chat-completion client: one user message in, one assistant message out.
pub struct HttpBackend {
    config: LlmConfig,
    api_key: Option<String>,
    transport: Arc<dyn Transport>,
}

impl HttpBackend {
    /// Reads the API key from the environment variable named in `config`.
    pub fn from_config(config: LlmConfig) -> Result<Self, LlmError> {
        let api_key = if config.api_key_env.is_empty() {
            None
        } else {
            Some(
                std::env::var(&config.api_key_env)
                    .map_err(|_| LlmError::MissingApiKey(config.api_key_env.clone()))?,
            )
        };
        Ok(Self::with_transport(
            config,
            api_key,
            Arc::new(ReqwestTransport::new()?),
        ))
    }

    pub fn with_transport(
        config: LlmConfig,
        api_key: Option<String>,
        transport: Arc<dyn Transport>,
    ) -> Self {
        Self {
            config,
            api_key,
            transport,
        }
    }

    pub fn request_body(&self, prompt: &str) -> String {
        json!({
            "model": self.config.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_output_tokens,
        })
        .to_string()
    }

    fn headers(&self) -> Vec<(String, String)> {
        match &self.api_key {
            Some(key) => {
                let value = if self.config.auth_scheme.is_empty() {
                    key.clone()
                } else {
                    format!("{} {key}", self.config.auth_scheme)
                };
                vec![(self.config.auth_header.clone(), value)]
            }
            None => Vec::new(),
        }
    }
}

/// Pulls `choices[0].message.content` out of a chat-completion body.
pub(crate) fn extract_content(body: &str) -> Result<String, LlmError> {
    let v: serde_json::Value =
        serde_json::from_str(body).map_err(|e| LlmError::Decode(e.to_string()))?;
    v.pointer("/choices/0/message/content")
        .and_then(|c| c.as_str())
        .map(str::to_string)
        .ok_or_else(|| LlmError::Decode("missing choices[0].message.content".into()))
}

impl Backend for HttpBackend {
    fn model_id(&self) -> &str {
        &self.config.model_id
    }

    fn complete(&self, prompt: &str) -> Result<Completion, LlmError> {
        let body = self.request_body(prompt);
        let headers = self.headers();
        let max_attempts = self.config.max_retries + 1;
        let mut last = String::new();
        for attempt in 1..=max_attempts {
            if attempt > 1 {
                thread::sleep(self.config.backoff(attempt - 1));
            }
            match self.transport.post(
                &self.config.endpoint,
                &headers,
                &body,
                self.config.timeout(),
            ) {
                Ok(reply) if (200..300).contains(&reply.status) => {
                    return Ok(Completion {
                        text: extract_content(&reply.body)?,
                        attempts: attempt,
                    })
                }
                Ok(reply) if reply.status == 401 || reply.status == 403 => {
                    return Err(LlmError::Auth {
                        status: reply.status,
                        body: reply.body,
                    })
                }
                Ok(reply) if !is_transient(reply.status) => {
                    return Err(LlmError::Http {
                        status: reply.status,
                        body: reply.body,
                    })
                }
                Ok(reply) => last = format!("HTTP {}: {}", reply.status, reply.body),
                Err(e) => last = e.to_string(),
            }
        }
        Err(LlmError::RetriesExhausted {
            attempts: max_attempts,
            last,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    type Request = (Vec<(String, String)>, String);

    /// Replays canned replies in order and records requests.
    struct Scripted {
        replies: Mutex<Vec<Result<HttpReply, TransportError>>>,
        seen: Mutex<Vec<Request>>,
    }

    impl Scripted {
        fn new(mut replies: Vec<Result<HttpReply, TransportError>>) -> Arc<Self> {
            replies.reverse();
            Arc::new(Self {
                replies: Mutex::new(replies),
                seen: Mutex::new(Vec::new()),
            })
        }
        fn count(&self) -> usize {
            self.seen.lock().unwrap().len()
        }
    }

    impl Transport for Scripted {
        fn post(
            &self,
            _: &str,
            h: &[(String, String)],
            b: &str,
            _: Duration,
        ) -> Result<HttpReply, TransportError> {
            self.seen.lock().unwrap().push((h.to_vec(), b.to_string()));
            self.replies
                .lock()
                .unwrap()
                .pop()
                .expect("script exhausted")
        }
    }

    fn reply(status: u16, body: &str) -> Result<HttpReply, TransportError> {
        Ok(HttpReply {
            status,
            body: body.to_string(),
        })
    }

    fn ok_body(text: &str) -> String {
        json!({"choices": [{"message": {"role": "assistant", "content": text}}]}).to_string()
    }

    fn config() -> LlmConfig {
        LlmConfig {
            initial_backoff_ms: 1,
            max_backoff_ms: 2,
            max_retries: 3,
            ..LlmConfig::default()
        }
    }

    #[test]
    fn retries_transient_then_succeeds() {
        let t = Scripted::new(vec![
            reply(429, "slow down"),
            reply(429, "slow down"),
            reply(200, &ok_body("hi")),
        ]);
        let b = HttpBackend::with_transport(config(), Some("k".into()), t.clone());
        let c = b.complete("hello").unwrap();
        assert_eq!(
            c,
            Completion {
                text: "hi".into(),
                attempts: 3
            }
        );
        assert_eq!(t.count(), 3);
    }

    #[test]
    fn auth_error_is_not_retried() {
        let t = Scripted::new(vec![reply(401, "bad key")]);
        let b = HttpBackend::with_transport(config(), Some("k".into()), t.clone());
        assert!(matches!(
            b.complete("x"),
            Err(LlmError::Auth { status: 401, .. })
        ));
        assert_eq!(t.count(), 1);
    }

    #[test]
    fn client_error_surfaces_status() {
        let t = Scripted::new(vec![reply(400, "bad request")]);
        let b = HttpBackend::with_transport(config(), None, t.clone());
        assert!(matches!(
            b.complete("x"),
            Err(LlmError::Http { status: 400, .. })
        ));
        assert_eq!(t.count(), 1);
    }

    #[test]
    fn exhaustion_carries_last_error() {
        let t = Scripted::new(vec![
            reply(503, "down"),
            Err(TransportError::Timeout),
            reply(500, "oops"),
            reply(502, "gateway"),
        ]);
        let b = HttpBackend::with_transport(config(), None, t.clone());
        match b.complete("x") {
            Err(LlmError::RetriesExhausted { attempts: 4, last }) => assert!(last.contains("502")),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(t.count(), 4);
    }

    #[test]
    fn request_shape_and_auth_header() {
        let t = Scripted::new(vec![reply(200, &ok_body("ok"))]);
        let b = HttpBackend::with_transport(config(), Some("sekrit".into()), t.clone());
        b.complete("Translate this").unwrap();
        let seen = t.seen.lock().unwrap();
        let (headers, body) = &seen[0];
        assert_eq!(
            headers,
            &[("Authorization".to_string(), "Bearer sekrit".to_string())]
        );
        let v: serde_json::Value = serde_json::from_str(body).unwrap();
        assert_eq!(v["messages"][0]["role"], "user");
        assert_eq!(v["messages"][0]["content"], "Translate this");
        assert_eq!(v["model"], "gpt-4o-mini");
        assert_eq!(v["temperature"], 0.0);
    }

    #[test]
    fn malformed_success_body() {
        let t = Scripted::new(vec![reply(200, "{\"choices\": []}")]);
        let b = HttpBackend::with_transport(config(), None, t);
        assert!(matches!(b.complete("x"), Err(LlmError::Decode(_))));
    }
}
