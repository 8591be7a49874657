//! Staged execution: graph extraction, tool-name identification, parameter
//! extraction (PGQ kinds only), then tool dispatch.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::backend::{CompletionConfig, LlmBackend};
use crate::codec::{extract_file_path, extract_graph, extract_parameters, extract_tool_name, ExtractionResult};
use crate::graph::{Graph, WeightKind};
use crate::prompts::{build_graph_instruction, build_parameter_instruction, build_task_instruction, StagePrompt};
use crate::registry::{retrieve_tool_template, ToolRegistry, ToolSpec};
use crate::task::{SizeClass, TaskInstance};
use crate::tools::{dispatch, Answer, ToolError, ToolName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    GraphExtraction,
    ToolNameIdentification,
    ToolParameterExtraction,
}

impl StageKind {
    pub const ALL: [StageKind; 3] = [
        StageKind::GraphExtraction,
        StageKind::ToolNameIdentification,
        StageKind::ToolParameterExtraction,
    ];

    pub fn letter(self) -> char {
        match self {
            StageKind::GraphExtraction => 'G',
            StageKind::ToolNameIdentification => 'N',
            StageKind::ToolParameterExtraction => 'P',
        }
    }

    pub fn ordinal(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: StageKind,
    pub instruction_text: String,
    pub prompt: String,
    pub raw_output: String,
    pub parsed: ExtractionResult,
    pub latency_ms: u64,
    /// Graph loaded from the extracted file path (EL graph stage only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved_graph: Option<Graph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ToolOutcome {
    Answer { answer: Answer },
    Error { error: ToolError },
    NotRun { reason: String },
}

impl ToolOutcome {
    pub fn answer(&self) -> Option<&Answer> {
        match self {
            ToolOutcome::Answer { answer } => Some(answer),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub instance_id: String,
    pub stages: Vec<StageRecord>,
    pub tool_result: ToolOutcome,
    pub skipped_parameter_stage: bool,
}

impl PipelineTrace {
    pub fn stage(&self, kind: StageKind) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.stage == kind)
    }

    /// Graph handed to the tool: the parsed edge list, or the graph loaded
    /// from the extracted path.
    pub fn extracted_graph(&self) -> Option<&Graph> {
        let g = self.stage(StageKind::GraphExtraction)?;
        match &g.parsed {
            ExtractionResult::Graph(graph) => Some(graph),
            ExtractionResult::Path(_) => g.resolved_graph.as_ref(),
            _ => None,
        }
    }

    pub fn extracted_name(&self) -> Option<&str> {
        match &self.stage(StageKind::ToolNameIdentification)?.parsed {
            ExtractionResult::Name(n) => Some(n),
            _ => None,
        }
    }

    pub fn extracted_params(&self) -> Option<&[u32]> {
        match &self.stage(StageKind::ToolParameterExtraction)?.parsed {
            ExtractionResult::Params(p) => Some(p),
            _ => None,
        }
    }
}

/// Side effects the pipeline needs from its host: graph files and a clock.
pub trait PipelineEnv: Sync {
    fn load_graph(&self, path: &str) -> Result<Graph, String>;

    fn now_ms(&self) -> u64 {
        0
    }
}

/// Environment without a file system; every graph path fails to load.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoFiles;

impl PipelineEnv for NoFiles {
    fn load_graph(&self, path: &str) -> Result<Graph, String> {
        Err(format!("no file system available to read `{path}`"))
    }
}

fn call_stage(
    stage: StageKind,
    prompt: StagePrompt,
    backend: &dyn LlmBackend,
    config: &CompletionConfig,
    env: &dyn PipelineEnv,
    parse: impl FnOnce(&str) -> ExtractionResult,
) -> StageRecord {
    let start = env.now_ms();
    let reply = backend.complete(&prompt.text, config);
    let latency_ms = env.now_ms().saturating_sub(start);
    let (raw_output, parsed, backend_error) = match reply {
        Ok(text) => {
            let parsed = parse(&text);
            (text, parsed, None)
        }
        Err(e) => {
            let msg = e.to_string();
            (
                String::new(),
                ExtractionResult::ParseFailure(format!("backend error: {msg}")),
                Some(msg),
            )
        }
    };
    StageRecord {
        stage,
        instruction_text: prompt.instruction,
        prompt: prompt.text,
        raw_output,
        parsed,
        latency_ms,
        resolved_graph: None,
        backend_error,
    }
}

fn skipped_parameter_record(reason: String) -> StageRecord {
    StageRecord {
        stage: StageKind::ToolParameterExtraction,
        instruction_text: String::new(),
        prompt: String::new(),
        raw_output: String::new(),
        parsed: ExtractionResult::ParseFailure(reason),
        latency_ms: 0,
        resolved_graph: None,
        backend_error: None,
    }
}

fn resolve_path(record: &mut StageRecord, expected: WeightKind, env: &dyn PipelineEnv) {
    let ExtractionResult::Path(path) = &record.parsed else {
        return;
    };
    let loaded = env.load_graph(path).and_then(|g| {
        if g.weight_kind() == WeightKind::Weight && expected == WeightKind::Capacity {
            g.with_weight_kind(expected).map_err(|e| e.to_string())
        } else {
            Ok(g)
        }
    });
    match loaded {
        Ok(g) => record.resolved_graph = Some(g),
        Err(e) => record.parsed = ExtractionResult::ParseFailure(format!("cannot load graph file `{path}`: {e}")),
    }
}

/// Runs every stage once and dispatches the tool when all stages parsed.
/// Backend failures end up in the stage records; nothing is thrown.
pub fn run_pipeline(
    instance: &TaskInstance,
    backend: &dyn LlmBackend,
    registry: &ToolRegistry,
    config: &CompletionConfig,
    env: &dyn PipelineEnv,
) -> PipelineTrace {
    let kind = instance.kind;
    let mut stages = Vec::with_capacity(3);

    let mut graph_stage = call_stage(
        StageKind::GraphExtraction,
        build_graph_instruction(instance),
        backend,
        config,
        env,
        |text| match instance.size_class {
            SizeClass::WL => extract_graph(text, kind.weight_kind(), kind.directed()),
            SizeClass::EL => extract_file_path(text),
        },
    );
    resolve_path(&mut graph_stage, kind.weight_kind(), env);
    stages.push(graph_stage);

    let name_stage = call_stage(
        StageKind::ToolNameIdentification,
        build_task_instruction(instance, registry),
        backend,
        config,
        env,
        extract_tool_name,
    );
    let template: Result<&ToolSpec, String> = match &name_stage.parsed {
        ExtractionResult::Name(n) => retrieve_tool_template(n, registry).map_err(|e| e.to_string()),
        ExtractionResult::ParseFailure(r) => Err(format!("no tool name: {r}")),
        other => Err(format!("unexpected name-stage value {other:?}")),
    };
    stages.push(name_stage);

    let skipped_parameter_stage = kind.is_bga();
    if !skipped_parameter_stage {
        let record = match &template {
            Ok(spec) => call_stage(
                StageKind::ToolParameterExtraction,
                build_parameter_instruction(instance, spec),
                backend,
                config,
                env,
                |text| extract_parameters(text, spec),
            ),
            Err(reason) => skipped_parameter_record(format!("no tool template: {reason}")),
        };
        stages.push(record);
    }

    let mut trace = PipelineTrace {
        instance_id: instance.id.clone(),
        stages,
        tool_result: ToolOutcome::NotRun { reason: String::new() },
        skipped_parameter_stage,
    };
    trace.tool_result = execute(&trace, template);
    trace
}

fn execute(trace: &PipelineTrace, template: Result<&ToolSpec, String>) -> ToolOutcome {
    if let Some(failed) = trace.stages.iter().find(|s| s.parsed.is_failure()) {
        let ExtractionResult::ParseFailure(reason) = &failed.parsed else {
            unreachable!()
        };
        return ToolOutcome::NotRun {
            reason: format!("stage {} failed: {reason}", failed.stage.letter()),
        };
    }
    let spec = match template {
        Ok(spec) => spec,
        Err(reason) => return ToolOutcome::NotRun { reason },
    };
    let Some(graph) = trace.extracted_graph() else {
        return ToolOutcome::NotRun {
            reason: "no graph".into(),
        };
    };
    let params = trace.extracted_params().unwrap_or(&[]);
    let outcome = match spec.name.parse::<ToolName>() {
        Ok(tool) => dispatch(tool, graph, params),
        Err(_) => Err(ToolError::UnknownTool(spec.name.clone())),
    };
    match outcome {
        Ok(answer) => ToolOutcome::Answer { answer },
        Err(error) => ToolOutcome::Error { error },
    }
}
