//! Chat-completions client.

use std::thread;
use std::time::Duration;

use graphtool_core::backend::{BackendError, CompletionConfig, LlmBackend};
use log::{debug, warn};
use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde::{Deserialize, Serialize};

pub const SYSTEM_MESSAGE: &str =
    "You are a precise assistant for graph reasoning tasks. Follow the output format exactly.";

#[derive(Serialize)]
struct Message<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [Message<'a>; 2],
    temperature: f64,
    top_p: f64,
    max_tokens: u32,
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
    content: Option<String>,
}

enum Failure {
    Retry(String),
    Timeout,
    Fatal(BackendError),
}

/// Blocking client; safe to share across worker threads.
#[derive(Debug, Clone)]
pub struct HttpBackend {
    client: Client,
    backoff: Duration,
    max_backoff: Duration,
}

impl Default for HttpBackend {
    fn default() -> Self {
        Self::new()
    }
}

impl HttpBackend {
    pub fn new() -> Self {
        Self::with_backoff(Duration::from_millis(500), Duration::from_secs(20))
    }

    /// Backoff doubles from `base` up to `max` between attempts.
    pub fn with_backoff(base: Duration, max: Duration) -> Self {
        Self {
            client: Client::new(),
            backoff: base,
            max_backoff: max,
        }
    }

    fn url(endpoint: &str) -> String {
        let trimmed = endpoint.trim_end_matches('/');
        if trimmed.ends_with("/chat/completions") {
            trimmed.to_string()
        } else {
            format!("{trimmed}/chat/completions")
        }
    }

    fn attempt(&self, url: &str, body: &ChatRequest<'_>, config: &CompletionConfig) -> Result<String, Failure> {
        let mut req = self
            .client
            .post(url)
            .timeout(Duration::from_millis(config.timeout_ms))
            .json(body);
        if !config.api_key.is_empty() {
            req = req.bearer_auth(config.api_key.expose());
        }
        let resp = req.send().map_err(|e| {
            if e.is_timeout() {
                Failure::Timeout
            } else {
                Failure::Retry(e.to_string())
            }
        })?;
        let status = resp.status();
        if status == StatusCode::UNAUTHORIZED || status == StatusCode::FORBIDDEN {
            return Err(Failure::Fatal(BackendError::Auth(format!("HTTP {status}"))));
        }
        if status == StatusCode::TOO_MANY_REQUESTS || status.is_server_error() {
            return Err(Failure::Retry(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(Failure::Fatal(BackendError::Protocol(format!("HTTP {status}"))));
        }
        let parsed: ChatResponse = resp.json().map_err(|e| {
            if e.is_timeout() {
                Failure::Timeout
            } else {
                Failure::Fatal(BackendError::Protocol(e.to_string()))
            }
        })?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| {
                Failure::Fatal(BackendError::Protocol(
                    "response has no choices[0].message.content".into(),
                ))
            })
    }
}

impl LlmBackend for HttpBackend {
    fn complete(&self, prompt: &str, config: &CompletionConfig) -> Result<String, BackendError> {
        config.validate()?;
        if config.endpoint.is_empty() {
            return Err(BackendError::InvalidConfig("no endpoint configured".into()));
        }
        let url = Self::url(&config.endpoint);
        let body = ChatRequest {
            model: &config.model,
            messages: [
                Message {
                    role: "system",
                    content: SYSTEM_MESSAGE,
                },
                Message {
                    role: "user",
                    content: prompt,
                },
            ],
            temperature: config.temperature,
            top_p: config.top_p,
            max_tokens: config.max_new_tokens,
        };
        let attempts = config.retry_count + 1;
        let mut delay = self.backoff;
        let mut last = Failure::Retry(String::new());
        for attempt in 1..=attempts {
            match self.attempt(&url, &body, config) {
                Ok(text) => return Ok(text),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(f) => {
                    if let Failure::Retry(msg) = &f {
                        warn!("attempt {attempt}/{attempts} to {url} failed: {msg}");
                    } else {
                        warn!("attempt {attempt}/{attempts} to {url} timed out");
                    }
                    last = f;
                }
            }
            if attempt < attempts {
                debug!("retrying in {delay:?}");
                thread::sleep(delay);
                delay = (delay * 2).min(self.max_backoff);
            }
        }
        Err(match last {
            Failure::Timeout => BackendError::Timeout { attempts },
            Failure::Retry(message) => BackendError::Transport { attempts, message },
            Failure::Fatal(e) => e,
        })
    }
}
