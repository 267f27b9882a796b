//! Chat-completion client implementing [`Generator`].
//!
//! Sends the fixed prompt as a single user message at temperature 0, retries
//! transport errors and 5xx responses with exponential backoff, and bounds the
//! number of in-flight requests.

use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use licensing_core::generator::{build_prompt, Generator, GeneratorError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_RETRIES_LIMIT: u32 = 5;
pub const DEFAULT_CONCURRENCY: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub endpoint_url: String,
    pub model_name: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub timeout: Duration,
    pub max_retries: u32,
    /// First retry delay; doubles on each further retry.
    pub backoff_base: Duration,
    pub concurrency: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("timeout must be positive")]
    ZeroTimeout,
    #[error("max_retries must be at most {MAX_RETRIES_LIMIT}, got {0}")]
    TooManyRetries(u32),
    #[error("concurrency must be at least 1")]
    ZeroConcurrency,
    #[error("endpoint url must start with http:// or https://: {0:?}")]
    BadEndpoint(String),
}

impl GeneratorConfig {
    pub fn new(endpoint_url: impl Into<String>, model_name: impl Into<String>, api_key_env: impl Into<String>) -> Self {
        Self {
            endpoint_url: endpoint_url.into(),
            model_name: model_name.into(),
            api_key_env: api_key_env.into(),
            timeout: Duration::from_secs(60),
            max_retries: 2,
            backoff_base: Duration::from_secs(1),
            concurrency: DEFAULT_CONCURRENCY,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.timeout.is_zero() {
            return Err(ConfigError::ZeroTimeout);
        }
        if self.max_retries > MAX_RETRIES_LIMIT {
            return Err(ConfigError::TooManyRetries(self.max_retries));
        }
        if self.concurrency == 0 {
            return Err(ConfigError::ZeroConcurrency);
        }
        if !(self.endpoint_url.starts_with("http://") || self.endpoint_url.starts_with("https://")) {
            return Err(ConfigError::BadEndpoint(self.endpoint_url.clone()));
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [Message<'a>; 1],
    temperature: u8,
}

#[derive(Serialize)]
struct Message<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    content: String,
}

/// Counting semaphore over in-flight requests.
struct Permits {
    free: Mutex<usize>,
    released: Condvar,
}

impl Permits {
    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().expect("permit lock");
        while *free == 0 {
            free = self.released.wait(free).expect("permit lock");
        }
        *free -= 1;
        Permit(self)
    }
}

struct Permit<'a>(&'a Permits);

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("permit lock") += 1;
        self.0.released.notify_one();
    }
}

pub struct HttpGenerator {
    config: GeneratorConfig,
    client: reqwest::blocking::Client,
    permits: Permits,
}

enum Attempt {
    Retry(GeneratorError),
    Fatal(GeneratorError),
}

impl HttpGenerator {
    pub fn new(config: GeneratorConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .expect("TLS backend initializes");
        Ok(Self {
            permits: Permits {
                free: Mutex::new(config.concurrency),
                released: Condvar::new(),
            },
            config,
            client,
        })
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.config
    }

    fn api_key(&self) -> Result<String, GeneratorError> {
        match std::env::var(&self.config.api_key_env) {
            Ok(key) if !key.is_empty() => Ok(key),
            _ => Err(GeneratorError::Auth(format!(
                "environment variable {} is not set",
                self.config.api_key_env
            ))),
        }
    }

    fn attempt(&self, key: &str, body: &ChatRequest<'_>) -> Result<String, Attempt> {
        let response = self
            .client
            .post(&self.config.endpoint_url)
            .bearer_auth(key)
            .json(body)
            .send()
            .map_err(|e| Attempt::Retry(transport_error(e)))?;
        let status = response.status();
        let text = response.text().map_err(|e| Attempt::Retry(transport_error(e)))?;
        if status.as_u16() == 401 || status.as_u16() == 403 {
            return Err(Attempt::Fatal(GeneratorError::Auth(format!("endpoint rejected the key (HTTP {status})"))));
        }
        if !status.is_success() {
            let err = GeneratorError::Upstream {
                status: status.as_u16(),
                body: text,
            };
            return Err(if status.is_server_error() || status.as_u16() == 429 {
                Attempt::Retry(err)
            } else {
                Attempt::Fatal(err)
            });
        }
        let parsed: ChatResponse = serde_json::from_str(&text).map_err(|e| {
            Attempt::Fatal(GeneratorError::Upstream {
                status: status.as_u16(),
                body: format!("malformed completion ({e}): {text}"),
            })
        })?;
        let first = parsed.choices.into_iter().next().ok_or_else(|| {
            Attempt::Fatal(GeneratorError::Upstream {
                status: status.as_u16(),
                body: "completion has no choices".into(),
            })
        })?;
        Ok(first.message.content.trim_end().to_string())
    }
}

fn transport_error(e: reqwest::Error) -> GeneratorError {
    if e.is_timeout() {
        GeneratorError::Timeout(e.to_string())
    } else {
        GeneratorError::Transport(e.to_string())
    }
}

impl Generator for HttpGenerator {
    fn generate(&self, question: &str, context: &str) -> Result<String, GeneratorError> {
        let key = self.api_key()?;
        let prompt = build_prompt(question, context);
        let body = ChatRequest {
            model: &self.config.model_name,
            messages: [Message {
                role: "user",
                content: &prompt,
            }],
            temperature: 0,
        };
        let _permit = self.permits.acquire();
        let mut delay = self.config.backoff_base;
        let mut attempt = 0;
        loop {
            match self.attempt(&key, &body) {
                Ok(text) => return Ok(text),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(e)) if attempt >= self.config.max_retries => return Err(e),
                Err(Attempt::Retry(e)) => {
                    attempt += 1;
                    log::warn!("attempt {attempt} failed ({e}); retrying in {delay:?}");
                    thread::sleep(delay);
                    delay = delay.saturating_mul(2);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let ok = GeneratorConfig::new("https://api.example.com/v1/chat/completions", "m", "KEY");
        assert_eq!(ok.validate(), Ok(()));
        let mut c = ok.clone();
        c.max_retries = 6;
        assert_eq!(c.validate(), Err(ConfigError::TooManyRetries(6)));
        let mut c = ok.clone();
        c.timeout = Duration::ZERO;
        assert_eq!(c.validate(), Err(ConfigError::ZeroTimeout));
        let mut c = ok;
        c.endpoint_url = "ftp://x".into();
        assert!(matches!(c.validate(), Err(ConfigError::BadEndpoint(_))));
    }

    #[test]
    fn request_shape() {
        let body = ChatRequest {
            model: "m",
            messages: [Message {
                role: "user",
                content: "CONTEXT:\n\nQUESTION:\nQ\n",
            }],
            temperature: 0,
        };
        assert_eq!(
            serde_json::to_string(&body).unwrap(),
            r#"{"model":"m","messages":[{"role":"user","content":"CONTEXT:\n\nQUESTION:\nQ\n"}],"temperature":0}"#
        );
    }
}
