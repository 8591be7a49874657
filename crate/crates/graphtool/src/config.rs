//! Configuration: TOML file, then environment variables, then command-line
//! flags, with later sources winning.

use std::path::{Path, PathBuf};

use graphtool_core::backend::{ApiKey, CompletionConfig, FaultMode};
use serde::Deserialize;

pub const ENV_ENDPOINT: &str = "GRAPHTOOL_ENDPOINT";
pub const ENV_API_KEY: &str = "GRAPHTOOL_API_KEY";
pub const ENV_MODEL: &str = "GRAPHTOOL_MODEL";
pub const ENV_BACKEND: &str = "GRAPHTOOL_BACKEND";
pub const ENV_WORKERS: &str = "GRAPHTOOL_WORKERS";
pub const ENV_LOG_LEVEL: &str = "GRAPHTOOL_LOG_LEVEL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Http,
    Oracle,
    Fault,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum FaultModeArg {
    DropGraphEdges,
    WrongToolName,
    SwapParameters,
    EmitGarbage,
}

impl From<FaultModeArg> for FaultMode {
    fn from(m: FaultModeArg) -> Self {
        match m {
            FaultModeArg::DropGraphEdges => FaultMode::DropGraphEdges,
            FaultModeArg::WrongToolName => FaultMode::WrongToolName,
            FaultModeArg::SwapParameters => FaultMode::SwapParameters,
            FaultModeArg::EmitGarbage => FaultMode::EmitGarbage,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub workers: Option<usize>,
    pub log_level: Option<String>,
    pub paths: PathsConfig,
    pub backend: BackendConfig,
    pub generate: GenerateConfig,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub corpus: Option<PathBuf>,
    pub traces: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: Option<BackendKind>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key: Option<String>,
    pub max_new_tokens: Option<u32>,
    pub top_p: Option<f64>,
    pub temperature: Option<f64>,
    pub retry_count: Option<u32>,
    pub timeout_ms: Option<u64>,
    pub fault_rate: Option<f64>,
    pub fault_mode: Option<FaultModeArg>,
    pub fault_seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateConfig {
    pub tasks: Option<String>,
    pub count: Option<usize>,
    pub size: Option<String>,
    pub seed: Option<u64>,
    pub token_budget: Option<usize>,
    pub graph_dir: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }
}

/// Environment lookups, injectable for tests.
pub trait Env {
    fn var(&self, key: &str) -> Option<String>;
}

pub struct ProcessEnv;

impl Env for ProcessEnv {
    fn var(&self, key: &str) -> Option<String> {
        std::env::var(key).ok().filter(|v| !v.is_empty())
    }
}

impl<F: Fn(&str) -> Option<String>> Env for F {
    fn var(&self, key: &str) -> Option<String> {
        self(key)
    }
}

/// Backend settings given on the command line.
#[derive(Debug, Clone, Default)]
pub struct BackendFlags {
    pub kind: Option<BackendKind>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key: Option<String>,
    pub max_new_tokens: Option<u32>,
    pub top_p: Option<f64>,
    pub temperature: Option<f64>,
    pub retry_count: Option<u32>,
    pub timeout_ms: Option<u64>,
    pub fault_rate: Option<f64>,
    pub fault_mode: Option<FaultModeArg>,
    pub fault_seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct BackendSettings {
    pub kind: BackendKind,
    pub completion: CompletionConfig,
    pub fault_rate: f64,
    pub fault_mode: Option<FaultMode>,
    pub fault_seed: u64,
}

fn parse_env<T: std::str::FromStr>(env: &dyn Env, key: &str) -> anyhow::Result<Option<T>> {
    match env.var(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| anyhow::anyhow!("environment variable {key} has invalid value `{v}`")),
    }
}

pub fn resolve_backend(flags: &BackendFlags, env: &dyn Env, file: &FileConfig) -> anyhow::Result<BackendSettings> {
    let f = &file.backend;
    let env_kind = match env.var(ENV_BACKEND) {
        None => None,
        Some(v) => Some(
            <BackendKind as clap::ValueEnum>::from_str(&v, true)
                .map_err(|_| anyhow::anyhow!("environment variable {ENV_BACKEND} has invalid value `{v}`"))?,
        ),
    };
    let defaults = CompletionConfig::default();
    let completion = CompletionConfig {
        max_new_tokens: flags
            .max_new_tokens
            .or(f.max_new_tokens)
            .unwrap_or(defaults.max_new_tokens),
        top_p: flags.top_p.or(f.top_p).unwrap_or(defaults.top_p),
        temperature: flags.temperature.or(f.temperature).unwrap_or(defaults.temperature),
        model: flags
            .model
            .clone()
            .or_else(|| env.var(ENV_MODEL))
            .or_else(|| f.model.clone())
            .unwrap_or_default(),
        endpoint: flags
            .endpoint
            .clone()
            .or_else(|| env.var(ENV_ENDPOINT))
            .or_else(|| f.endpoint.clone())
            .unwrap_or_default(),
        api_key: ApiKey::new(
            flags
                .api_key
                .clone()
                .or_else(|| env.var(ENV_API_KEY))
                .or_else(|| f.api_key.clone())
                .unwrap_or_default(),
        ),
        retry_count: flags.retry_count.or(f.retry_count).unwrap_or(defaults.retry_count),
        timeout_ms: flags.timeout_ms.or(f.timeout_ms).unwrap_or(defaults.timeout_ms),
    };
    completion.validate()?;
    let fault_rate = flags.fault_rate.or(f.fault_rate).unwrap_or(0.0);
    if !(0.0..=1.0).contains(&fault_rate) {
        anyhow::bail!("fault rate {fault_rate} outside [0, 1]");
    }
    Ok(BackendSettings {
        kind: flags.kind.or(env_kind).or(f.kind).unwrap_or(BackendKind::Http),
        completion,
        fault_rate,
        fault_mode: flags.fault_mode.or(f.fault_mode).map(FaultMode::from),
        fault_seed: flags.fault_seed.or(f.fault_seed).unwrap_or(0),
    })
}

pub fn resolve_workers(flag: Option<usize>, env: &dyn Env, file: &FileConfig) -> anyhow::Result<usize> {
    let workers = match flag {
        Some(w) => w,
        None => match parse_env(env, ENV_WORKERS)? {
            Some(w) => w,
            None => file
                .workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        },
    };
    if workers == 0 {
        anyhow::bail!("worker count must be at least 1");
    }
    Ok(workers)
}

pub fn resolve_log_level(flag: Option<String>, env: &dyn Env, file: &FileConfig) -> String {
    flag.or_else(|| env.var(ENV_LOG_LEVEL))
        .or_else(|| file.log_level.clone())
        .unwrap_or_else(|| "warn".into())
}
