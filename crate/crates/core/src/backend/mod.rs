//! Completion interface shared by the remote client (in the std crate), the
//! gold-output oracle and the fault-injection wrapper.

mod fault;
mod oracle;

use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fault::{expected_category, FaultBackend, FaultMode, FaultPlan, FaultPlanError, InjectedFault};
pub use oracle::{detect_stage, make_oracle_backend, parse_query_id, OracleBackend};

/// Secret that never shows up in `Debug` output or serialized configs.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct ApiKey(String);

impl ApiKey {
    pub fn new(key: impl Into<String>) -> Self {
        Self(key.into())
    }

    pub fn expose(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0.is_empty() {
            "ApiKey(<unset>)"
        } else {
            "ApiKey(<redacted>)"
        })
    }
}

/// Sampling and transport settings. Defaults: 4096 new tokens, top_p 1,
/// temperature 0.7.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionConfig {
    pub max_new_tokens: u32,
    pub top_p: f64,
    pub temperature: f64,
    pub model: String,
    pub endpoint: String,
    #[serde(skip)]
    pub api_key: ApiKey,
    pub retry_count: u32,
    pub timeout_ms: u64,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        Self {
            max_new_tokens: 4096,
            top_p: 1.0,
            temperature: 0.7,
            model: String::new(),
            endpoint: String::new(),
            api_key: ApiKey::default(),
            retry_count: 3,
            timeout_ms: 120_000,
        }
    }
}

impl CompletionConfig {
    pub fn validate(&self) -> Result<(), BackendError> {
        if self.max_new_tokens == 0 {
            return Err(BackendError::InvalidConfig("max_new_tokens must be positive".into()));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(BackendError::InvalidConfig("top_p must lie in (0, 1]".into()));
        }
        if !(self.temperature >= 0.0) {
            return Err(BackendError::InvalidConfig("temperature must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum BackendError {
    #[error("transport failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("authentication rejected: {0}")]
    Auth(String),
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("malformed completion response: {0}")]
    Protocol(String),
    #[error("no instance id found in prompt or id `{0}` unknown")]
    UnknownInstance(String),
    #[error("invalid completion config: {0}")]
    InvalidConfig(String),
}

/// A language model, or anything standing in for one.
pub trait LlmBackend: Send + Sync {
    fn complete(&self, prompt: &str, config: &CompletionConfig) -> Result<String, BackendError>;
}

impl<T: LlmBackend + ?Sized> LlmBackend for &T {
    fn complete(&self, prompt: &str, config: &CompletionConfig) -> Result<String, BackendError> {
        (**self).complete(prompt, config)
    }
}

impl<T: LlmBackend + ?Sized> LlmBackend for alloc::boxed::Box<T> {
    fn complete(&self, prompt: &str, config: &CompletionConfig) -> Result<String, BackendError> {
        (**self).complete(prompt, config)
    }
}
