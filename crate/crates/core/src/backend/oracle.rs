use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{BackendError, CompletionConfig, LlmBackend};
use crate::codec::render_edge_list;
use crate::pipeline::StageKind;
use crate::prompts::{GRAPH_EDGE_LIST_HEADER, GRAPH_FILE_PATH_HEADER, PARAMETER_HEADER, QUERY_ID_PREFIX, TASK_HEADER};
use crate::registry::ToolRegistry;
use crate::task::{SizeClass, TaskInstance};

/// Which stage a prompt belongs to, judged by its instruction header.
pub fn detect_stage(prompt: &str) -> Option<StageKind> {
    let head = prompt.trim_start();
    if head.starts_with(GRAPH_EDGE_LIST_HEADER) || head.starts_with(GRAPH_FILE_PATH_HEADER) {
        Some(StageKind::GraphExtraction)
    } else if head.starts_with(TASK_HEADER) {
        Some(StageKind::ToolNameIdentification)
    } else if head.starts_with(PARAMETER_HEADER) {
        Some(StageKind::ToolParameterExtraction)
    } else {
        None
    }
}

/// The id on the last `Query ID:` line of a prompt.
pub fn parse_query_id(prompt: &str) -> Option<&str> {
    prompt
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix(QUERY_ID_PREFIX))
        .map(str::trim)
        .filter(|id| !id.is_empty())
}

fn template_tool_name(prompt: &str) -> Option<&str> {
    let rest = &prompt[prompt.find("Tool template:")?..];
    let line = rest.lines().find_map(|l| l.trim().strip_prefix("Tool name:"))?;
    Some(line.trim())
}

/// Answers every stage prompt with the perfectly formatted gold output of the
/// instance named in the prompt.
#[derive(Debug, Clone)]
pub struct OracleBackend {
    registry: ToolRegistry,
    instances: BTreeMap<String, TaskInstance>,
}

pub fn make_oracle_backend<'a>(corpus: impl IntoIterator<Item = &'a TaskInstance>) -> OracleBackend {
    OracleBackend::new(corpus, ToolRegistry::default())
}

impl OracleBackend {
    pub fn new<'a>(corpus: impl IntoIterator<Item = &'a TaskInstance>, registry: ToolRegistry) -> Self {
        let instances = corpus.into_iter().map(|i| (i.id.clone(), i.clone())).collect();
        Self { registry, instances }
    }

    pub fn registry(&self) -> &ToolRegistry {
        &self.registry
    }

    pub fn instance(&self, id: &str) -> Option<&TaskInstance> {
        self.instances.get(id)
    }

    pub fn instances(&self) -> impl Iterator<Item = &TaskInstance> {
        self.instances.values()
    }

    /// Resolves the instance and stage a prompt is asking about.
    pub(crate) fn locate(&self, prompt: &str) -> Result<(&TaskInstance, StageKind), BackendError> {
        let id = parse_query_id(prompt).ok_or_else(|| BackendError::UnknownInstance(String::new()))?;
        let instance = self
            .instances
            .get(id)
            .ok_or_else(|| BackendError::UnknownInstance(id.to_string()))?;
        let stage = detect_stage(prompt)
            .ok_or_else(|| BackendError::Protocol("prompt has no recognizable instruction header".into()))?;
        Ok((instance, stage))
    }

    /// Gold `name=value` pairs for the template named in a parameter prompt.
    pub(crate) fn gold_parameters(&self, instance: &TaskInstance, prompt: &str) -> Vec<(String, u32)> {
        let spec = template_tool_name(prompt)
            .and_then(|n| self.registry.get(n))
            .or_else(|| self.registry.get(instance.gold_tool.as_str()));
        let names: Vec<String> = match spec {
            Some(s) => s.value_parameter_names().into_iter().map(String::from).collect(),
            None => Vec::new(),
        };
        names.into_iter().zip(instance.gold_params.iter().copied()).collect()
    }

    pub(crate) fn gold_output(&self, instance: &TaskInstance, stage: StageKind, prompt: &str) -> String {
        match stage {
            StageKind::GraphExtraction => match (instance.size_class, &instance.graph_file) {
                (SizeClass::EL, Some(path)) => format!("Path: {path}"),
                _ => format!("Graph: [{}]", render_edge_list(&instance.gold_graph)),
            },
            StageKind::ToolNameIdentification => format!("API_name: {}", instance.gold_tool),
            StageKind::ToolParameterExtraction => format_parameters(&self.gold_parameters(instance, prompt)),
        }
    }
}

pub(crate) fn format_parameters(pairs: &[(String, u32)]) -> String {
    let parts: Vec<String> = pairs.iter().map(|(n, v)| format!("{n}={v}")).collect();
    parts.join(", ")
}

impl LlmBackend for OracleBackend {
    fn complete(&self, prompt: &str, _config: &CompletionConfig) -> Result<String, BackendError> {
        let (instance, stage) = self.locate(prompt)?;
        Ok(self.gold_output(instance, stage, prompt))
    }
}
