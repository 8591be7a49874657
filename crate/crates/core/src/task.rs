//! Task kinds, size classes and benchmark instances.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId, WeightKind};
use crate::tools::{Answer, ToolName};

/// Largest node count of a within-limit graph.
pub const WL_MAX_NODES: u32 = 40;
pub const WL_MAX_EDGES: usize = 300;
pub const EL_MIN_NODES: u32 = 41;
pub const EL_MAX_NODES: u32 = 100;
pub const EL_MAX_EDGES: usize = 1000;
pub const DEFAULT_TOKEN_BUDGET: usize = 4096;
/// Five description templates per task.
pub const DESCRIPTION_VARIANTS: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    /// Rendered task fits the token budget; the edge list is inline.
    WL,
    /// Graph lives in a file referenced by path.
    EL,
}

impl SizeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SizeClass::WL => "wl",
            SizeClass::EL => "el",
        }
    }

    pub fn node_range(self) -> (u32, u32) {
        match self {
            SizeClass::WL => (2, WL_MAX_NODES),
            SizeClass::EL => (EL_MIN_NODES, EL_MAX_NODES),
        }
    }

    pub fn max_edges(self) -> usize {
        match self {
            SizeClass::WL => WL_MAX_EDGES,
            SizeClass::EL => EL_MAX_EDGES,
        }
    }
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskKindError {
    #[error("{tool} is not defined on {} graphs", if *.directed { "directed" } else { "undirected" })]
    Unsupported { tool: ToolName, directed: bool },
    #[error("cannot parse task kind `{0}`")]
    Parse(String),
}

/// A tool paired with a graph type. Triangle sums exist only for undirected
/// graphs and topological sorting only for directed ones, leaving 20 kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawKind")]
pub struct TaskKind {
    tool: ToolName,
    directed: bool,
}

#[derive(Deserialize)]
struct RawKind {
    tool: ToolName,
    directed: bool,
}

impl TryFrom<RawKind> for TaskKind {
    type Error = TaskKindError;

    fn try_from(raw: RawKind) -> Result<Self, Self::Error> {
        TaskKind::new(raw.tool, raw.directed)
    }
}

impl TaskKind {
    pub fn new(tool: ToolName, directed: bool) -> Result<Self, TaskKindError> {
        match (tool, directed) {
            (ToolName::MaxTriangleSum, true) | (ToolName::TopologicalSort, false) => {
                Err(TaskKindError::Unsupported { tool, directed })
            }
            _ => Ok(Self { tool, directed }),
        }
    }

    /// All 20 kinds, tool-major, directed before undirected.
    pub fn all() -> Vec<TaskKind> {
        ToolName::ALL
            .into_iter()
            .flat_map(|t| [true, false].into_iter().filter_map(move |d| TaskKind::new(t, d).ok()))
            .collect()
    }

    pub fn tool(self) -> ToolName {
        self.tool
    }

    pub fn directed(self) -> bool {
        self.directed
    }

    pub fn is_bga(self) -> bool {
        self.tool.is_bga()
    }

    pub fn weight_kind(self) -> WeightKind {
        match self.tool {
            ToolName::MaximumFlow => WeightKind::Capacity,
            ToolName::MaxTriangleSum | ToolName::ShortestPath => WeightKind::Weight,
            _ => WeightKind::None,
        }
    }

    /// Position in [`TaskKind::all`].
    pub fn ordinal(self) -> usize {
        TaskKind::all().iter().position(|k| *k == self).expect("valid kind")
    }

    pub fn graph_type(self) -> &'static str {
        if self.directed {
            "directed"
        } else {
            "undirected"
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tool, self.graph_type())
    }
}

impl FromStr for TaskKind {
    type Err = TaskKindError;

    /// `tool:directed` or `tool:undirected`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (tool, ty) = s.split_once(':').ok_or_else(|| TaskKindError::Parse(s.into()))?;
        let tool: ToolName = tool.parse().map_err(|_| TaskKindError::Parse(s.into()))?;
        let directed = match ty.trim() {
            "directed" => true,
            "undirected" => false,
            _ => return Err(TaskKindError::Parse(s.into())),
        };
        TaskKind::new(tool, directed)
    }
}

/// One benchmark question with gold labels for all three subtasks and the answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub id: String,
    pub kind: TaskKind,
    pub graph: Graph,
    pub params: Vec<NodeId>,
    pub description_variant: u8,
    pub size_class: SizeClass,
    pub task_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_file: Option<String>,
    pub gold_graph: Graph,
    pub gold_tool: ToolName,
    pub gold_params: Vec<NodeId>,
    pub gold_answer: Answer,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_twenty_kinds() {
        let all = TaskKind::all();
        assert_eq!(all.len(), 20);
        assert!(TaskKind::new(ToolName::MaxTriangleSum, true).is_err());
        assert!(TaskKind::new(ToolName::TopologicalSort, false).is_err());
        for (i, k) in all.iter().enumerate() {
            assert_eq!(k.ordinal(), i);
        }
    }

    #[test]
    fn parse_and_serde() {
        let k: TaskKind = "shortest_path:directed".parse().unwrap();
        assert_eq!(k.tool(), ToolName::ShortestPath);
        assert!(k.directed());
        assert!("topological_sort:undirected".parse::<TaskKind>().is_err());
        assert!(serde_json::from_str::<TaskKind>(r#"{"tool":"max_triangle_sum","directed":true}"#).is_err());
        let back: TaskKind = serde_json::from_str(&serde_json::to_string(&k).unwrap()).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn weight_kinds() {
        assert_eq!(
            "maximum_flow:undirected".parse::<TaskKind>().unwrap().weight_kind(),
            WeightKind::Capacity
        );
        assert_eq!(
            "max_triangle_sum:undirected".parse::<TaskKind>().unwrap().weight_kind(),
            WeightKind::Weight
        );
        assert_eq!(
            "cycle_detection:directed".parse::<TaskKind>().unwrap().weight_kind(),
            WeightKind::None
        );
    }
}
