use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::LlmError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Http,
    Mock,
}

/// `pattern` is a regex matched against the whole prompt; `template` is
/// expanded with its captures (`$1`, `${name}`). The template
/// [`ALIGN_TEMPLATE`](super::ALIGN_TEMPLATE) instead answers with a
/// `dictionary:` line pairing the words of capture 2 with the words of
/// capture 1 by position, and [`GLOSS_TEMPLATE`](super::GLOSS_TEMPLATE)
/// applies the prompt dictionary to the sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockRule {
    pub pattern: String,
    pub template: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmConfig {
    pub backend: BackendKind,
    pub endpoint: String,
    pub model_id: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub max_in_flight: usize,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
    /// Environment variable holding the API key; empty disables auth.
    pub api_key_env: String,
    pub auth_header: String,
    /// Prefix placed before the key in the auth header, e.g. `Bearer`.
    pub auth_scheme: String,
    /// Built-in mock rule set applied after `mock_rules`.
    pub mock_preset: Option<String>,
    pub mock_rules: Vec<MockRule>,
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self {
            backend: BackendKind::Http,
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model_id: "gpt-4o-mini".into(),
            temperature: 0.0,
            max_output_tokens: 1024,
            timeout_secs: 60,
            max_retries: 4,
            max_in_flight: 4,
            initial_backoff_ms: 500,
            max_backoff_ms: 30_000,
            api_key_env: "OPENAI_API_KEY".into(),
            auth_header: "Authorization".into(),
            auth_scheme: "Bearer".into(),
            mock_preset: None,
            mock_rules: Vec::new(),
        }
    }
}

impl LlmConfig {
    pub fn mock() -> Self {
        Self {
            backend: BackendKind::Mock,
            model_id: "mock".into(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        let bad = |m: &str| Err(LlmError::Config(m.to_string()));
        if self.max_in_flight == 0 {
            return bad("max_in_flight must be at least 1");
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return bad("temperature must be a finite value >= 0");
        }
        if self.model_id.trim().is_empty() {
            return bad("model_id must not be empty");
        }
        if self.backend == BackendKind::Http && reqwest::Url::parse(&self.endpoint).is_err() {
            return bad("endpoint is not a valid URL");
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    /// Delay before retry number `retry` (1-based): doubling from the
    /// initial backoff, capped.
    pub fn backoff(&self, retry: u32) -> Duration {
        let factor = 1u64
            .checked_shl(retry.saturating_sub(1))
            .unwrap_or(u64::MAX);
        Duration::from_millis(
            self.initial_backoff_ms
                .saturating_mul(factor)
                .min(self.max_backoff_ms),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(LlmConfig::default().validate().is_ok());
        assert!(LlmConfig {
            max_in_flight: 0,
            ..LlmConfig::default()
        }
        .validate()
        .is_err());
        assert!(LlmConfig {
            temperature: -1.0,
            ..LlmConfig::default()
        }
        .validate()
        .is_err());
        assert!(LlmConfig {
            endpoint: "not a url".into(),
            ..LlmConfig::default()
        }
        .validate()
        .is_err());
        assert!(LlmConfig {
            endpoint: "x".into(),
            ..LlmConfig::mock()
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn backoff_doubles_and_caps() {
        let c = LlmConfig {
            initial_backoff_ms: 100,
            max_backoff_ms: 1000,
            ..LlmConfig::default()
        };
        let ms: Vec<u128> = (1..=6).map(|r| c.backoff(r).as_millis()).collect();
        assert_eq!(ms, [100, 200, 400, 800, 1000, 1000]);
        assert_eq!(c.backoff(200).as_millis(), 1000);
    }

    #[test]
    fn toml_defaults_fill_in() {
        let c: LlmConfig = toml::from_str("backend = \"mock\"\nmodel_id = \"m\"").unwrap();
        assert_eq!(c.backend, BackendKind::Mock);
        assert_eq!(c.max_in_flight, 4);
        assert!(toml::from_str::<LlmConfig>("bogus = 1").is_err());
    }
}
