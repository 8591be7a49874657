//! Graph-, Task- and Parameter-Instruction prompt builders.
//!
//! All builders are pure and read only the task text, the instance id and the
//! graph type, never the gold labels.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::registry::{ToolRegistry, ToolSpec};
use crate::task::{SizeClass, TaskInstance};

pub const GRAPH_EDGE_LIST_HEADER: &str = "Graph-Instruction (edge list)";
pub const GRAPH_FILE_PATH_HEADER: &str = "Graph-Instruction (file path)";
pub const TASK_HEADER: &str = "Task-Instruction";
pub const PARAMETER_HEADER: &str = "Parameter-Instruction";
/// Marker line carrying the instance id in every prompt.
pub const QUERY_ID_PREFIX: &str = "Query ID: ";

const GRAPH_EDGE_LIST_INSTRUCTION: &str = "\
Graph-Instruction (edge list): extract the structure of the graph described in the task.
Write every edge of the graph as a list in the NetworkX edge-list format. An unweighted edge is \
written (u, v), a weighted edge is written (u, v, {'weight': w}) and an edge of a flow network is \
written (u, v, {'capacity': c}). Copy every edge exactly as given, keep the order of the two nodes \
and do not add or drop edges. Answer with a single line that starts with \"Graph:\".

Example 1
Task: In an undirected graph, the edges are [(0, 1), (1, 2), (2, 3), (3, 0)]. Is there a cycle in this graph?
Output: Graph: [(0, 1), (1, 2), (2, 3), (3, 0)]

Example 2
Task: Given a directed graph with the following edges: [(0, 2, {'weight': 4}), (2, 1, {'weight': 7}), (0, 1, {'weight': 12})]. What is the shortest path distance from node 0 to node 1?
Output: Graph: [(0, 2, {'weight': 4}), (2, 1, {'weight': 7}), (0, 1, {'weight': 12})]";

const GRAPH_FILE_PATH_INSTRUCTION: &str = "\
Graph-Instruction (file path): the graph in this task is too large to be written out and is \
stored in a file. Identify the path of the graph file mentioned in the task and answer with a \
single line that starts with \"Path:\".

Example
Task: Given an undirected graph stored in the file graphs/example.edges. Is there a cycle in this graph?
Output: Path: graphs/example.edges";

/// One stage's instruction, the task input it is applied to, and the full prompt text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagePrompt {
    pub instruction: String,
    pub input: String,
    pub text: String,
}

fn assemble(instruction: String, instance: &TaskInstance) -> StagePrompt {
    let text = format!(
        "{instruction}\n\nTask: {}\n{QUERY_ID_PREFIX}{}\nOutput:",
        instance.task_text, instance.id
    );
    StagePrompt {
        instruction,
        input: instance.task_text.clone(),
        text,
    }
}

/// Two-shot edge-list extraction for WL tasks, one-shot path extraction for EL tasks.
pub fn build_graph_instruction(instance: &TaskInstance) -> StagePrompt {
    let instruction = match instance.size_class {
        SizeClass::WL => GRAPH_EDGE_LIST_INSTRUCTION,
        SizeClass::EL => GRAPH_FILE_PATH_INSTRUCTION,
    };
    assemble(instruction.into(), instance)
}

fn describe_tool(spec: &ToolSpec, indent: &str) -> String {
    let params: Vec<String> = spec
        .parameters
        .iter()
        .map(|p| format!("{} ({})", p.name, p.ty))
        .collect();
    format!(
        "{indent}Tool name: {}\n{indent}Description: {}\n{indent}Parameters: {}\n{indent}Return type: {}",
        spec.name,
        spec.description,
        params.join(", "),
        spec.returns
    )
}

/// Full tool set plus the `API_name:` output constraint.
pub fn build_task_instruction(instance: &TaskInstance, registry: &ToolRegistry) -> StagePrompt {
    let mut instruction = String::from(
        "Task-Instruction: choose the one tool from the tool set below that solves the graph task.\n\nTool set:\n",
    );
    for (i, spec) in registry.tools().iter().enumerate() {
        instruction.push_str(&format!("{}.\n{}\n", i + 1, describe_tool(spec, "   ")));
    }
    instruction.push_str(
        "\nOutput format: reply with exactly one line of the form \"API_name: <tool name>\", where \
<tool name> is copied from the tool set above. Do not write parameters, code or explanations.",
    );
    assemble(instruction, instance)
}

/// Retrieved tool template plus the required `name=<int>` format.
pub fn build_parameter_instruction(instance: &TaskInstance, spec: &ToolSpec) -> StagePrompt {
    let instruction = format!(
        "Parameter-Instruction: extract the parameters of the selected tool from the task.\n\n\
Tool template:\n{}\n\nOutput format: reply with exactly one line of the form \"{}\". The graph G \
is passed to the tool separately; do not repeat it.",
        describe_tool(spec, "  "),
        spec.parameter_format()
    );
    assemble(instruction, instance)
}
