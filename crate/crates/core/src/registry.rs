//! Tool set shown to the model and the tool template retriever.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tools::ToolName;

/// Name reserved for the graph argument every tool takes first.
pub const GRAPH_PARAMETER: &str = "G";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

impl ParamSpec {
    pub fn new(name: &str, ty: &str) -> Self {
        Self {
            name: name.to_string(),
            ty: ty.to_string(),
        }
    }
}

/// Tool name, description, ordered parameters and return type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolSpec {
    pub name: String,
    pub description: String,
    pub parameters: Vec<ParamSpec>,
    pub returns: String,
}

impl ToolSpec {
    /// Parameters other than the graph, in order.
    pub fn value_parameter_names(&self) -> Vec<&str> {
        self.parameters
            .iter()
            .filter(|p| p.name != GRAPH_PARAMETER)
            .map(|p| p.name.as_str())
            .collect()
    }

    /// `source=<int>, target=<int>` style format line.
    pub fn parameter_format(&self) -> String {
        let parts: Vec<String> = self
            .value_parameter_names()
            .iter()
            .map(|n| alloc::format!("{n}=<int>"))
            .collect();
        parts.join(", ")
    }

    fn builtin(tool: ToolName) -> Self {
        let g = ParamSpec::new(GRAPH_PARAMETER, "graph");
        let node = |name: &str| ParamSpec::new(name, "node");
        let (description, params, returns) = match tool {
            ToolName::CycleDetection => (
                "Determine whether there exists any cycle in a given graph.",
                alloc::vec![g],
                "bool",
            ),
            ToolName::MaxTriangleSum => (
                "Find the triangle with the largest sum of edge weights in a given undirected graph and return that sum.",
                alloc::vec![g],
                "integer",
            ),
            ToolName::EdgeCount => ("Count the total number of edges in a given graph.", alloc::vec![g], "integer"),
            ToolName::NodeCount => ("Count the total number of nodes in a given graph.", alloc::vec![g], "integer"),
            ToolName::TopologicalSort => (
                "Arrange the nodes of a given directed graph in topological order.",
                alloc::vec![g],
                "list of nodes",
            ),
            ToolName::DegreeCount => (
                "Count the number of edges connected to a specific node in a given graph.",
                alloc::vec![g, node("node")],
                "integer",
            ),
            ToolName::EdgeExistence => (
                "Determine whether a specific edge exists between two nodes in a given graph.",
                alloc::vec![g, node("source"), node("target")],
                "bool",
            ),
            ToolName::NodeExistence => (
                "Determine whether a specific node exists in a given graph.",
                alloc::vec![g, node("node")],
                "bool",
            ),
            ToolName::MaximumFlow => (
                "Determine the largest amount of flow from a source node to a sink node.",
                alloc::vec![g, node("source"), node("sink")],
                "integer",
            ),
            ToolName::PathExistence => (
                "Determine whether a path exists between two nodes in a given graph.",
                alloc::vec![g, node("source"), node("target")],
                "bool",
            ),
            ToolName::ShortestPath => (
                "Determine the minimum distance between two nodes in a given weighted graph.",
                alloc::vec![g, node("source"), node("target")],
                "integer",
            ),
        };
        Self {
            name: tool.as_str().to_string(),
            description: description.to_string(),
            parameters: params,
            returns: returns.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("unknown tool `{0}`")]
    UnknownTool(String),
    #[error("tool `{0}` is already registered")]
    Duplicate(String),
    #[error("parameter name `{0}` is not a valid identifier")]
    InvalidParameter(String),
}

/// Ordered tool set; the eleven built-in tools by default.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolRegistry {
    tools: Vec<ToolSpec>,
}

impl Default for ToolRegistry {
    fn default() -> Self {
        Self {
            tools: ToolName::ALL.into_iter().map(ToolSpec::builtin).collect(),
        }
    }
}

fn fold(name: &str) -> String {
    name.trim().to_ascii_lowercase()
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ToolRegistry {
    pub fn empty() -> Self {
        Self { tools: Vec::new() }
    }

    pub fn tools(&self) -> &[ToolSpec] {
        &self.tools
    }

    /// Adds a tool; the prompt builders pick it up without further changes.
    pub fn register(&mut self, spec: ToolSpec) -> Result<(), RegistryError> {
        if self.get(&spec.name).is_some() {
            return Err(RegistryError::Duplicate(spec.name));
        }
        if let Some(bad) = spec.parameters.iter().find(|p| !is_identifier(&p.name)) {
            return Err(RegistryError::InvalidParameter(bad.name.clone()));
        }
        self.tools.push(spec);
        Ok(())
    }

    /// Exact match after trimming and lowercasing.
    pub fn get(&self, name: &str) -> Option<&ToolSpec> {
        let folded = fold(name);
        self.tools.iter().find(|t| fold(&t.name) == folded)
    }
}

/// Tool template retriever.
pub fn retrieve_tool_template<'r>(name: &str, registry: &'r ToolRegistry) -> Result<&'r ToolSpec, RegistryError> {
    registry
        .get(name)
        .ok_or_else(|| RegistryError::UnknownTool(name.trim().to_string()))
}
