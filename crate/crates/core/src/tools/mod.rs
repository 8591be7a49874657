//! The eleven graph reasoning tools and the name-based dispatcher.

mod flow;
mod shortest;
mod traversal;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

pub use flow::maximum_flow;
pub use shortest::shortest_path;
pub use traversal::{cycle_detection, has_unique_topological_order, path_existence, reachable_from, topological_sort};

/// Output of a tool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Answer {
    Bool(bool),
    Count(u64),
    NodeSeq(Vec<NodeId>),
    Value(u64),
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Bool(b) => write!(f, "{b}"),
            Answer::Count(c) | Answer::Value(c) => write!(f, "{c}"),
            Answer::NodeSeq(seq) => {
                f.write_str("[")?;
                for (i, n) in seq.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{n}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToolName {
    CycleDetection,
    MaxTriangleSum,
    EdgeCount,
    NodeCount,
    TopologicalSort,
    DegreeCount,
    EdgeExistence,
    NodeExistence,
    MaximumFlow,
    PathExistence,
    ShortestPath,
}

impl ToolName {
    pub const ALL: [ToolName; 11] = [
        ToolName::CycleDetection,
        ToolName::MaxTriangleSum,
        ToolName::EdgeCount,
        ToolName::NodeCount,
        ToolName::TopologicalSort,
        ToolName::DegreeCount,
        ToolName::EdgeExistence,
        ToolName::NodeExistence,
        ToolName::MaximumFlow,
        ToolName::PathExistence,
        ToolName::ShortestPath,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ToolName::CycleDetection => "cycle_detection",
            ToolName::MaxTriangleSum => "max_triangle_sum",
            ToolName::EdgeCount => "edge_count",
            ToolName::NodeCount => "node_count",
            ToolName::TopologicalSort => "topological_sort",
            ToolName::DegreeCount => "degree_count",
            ToolName::EdgeExistence => "edge_existence",
            ToolName::NodeExistence => "node_existence",
            ToolName::MaximumFlow => "maximum_flow",
            ToolName::PathExistence => "path_existence",
            ToolName::ShortestPath => "shortest_path",
        }
    }

    /// Number of parameters besides the graph.
    pub fn arity(self) -> usize {
        match self {
            ToolName::CycleDetection
            | ToolName::MaxTriangleSum
            | ToolName::EdgeCount
            | ToolName::NodeCount
            | ToolName::TopologicalSort => 0,
            ToolName::DegreeCount | ToolName::NodeExistence => 1,
            ToolName::EdgeExistence | ToolName::MaximumFlow | ToolName::PathExistence | ToolName::ShortestPath => 2,
        }
    }

    /// Basic graph analysis tools need nothing but the graph.
    pub fn is_bga(self) -> bool {
        self.arity() == 0
    }

    pub fn returns_bool(self) -> bool {
        matches!(
            self,
            ToolName::CycleDetection | ToolName::EdgeExistence | ToolName::NodeExistence | ToolName::PathExistence
        )
    }
}

impl fmt::Display for ToolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ToolName {
    type Err = ToolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let folded = s.trim().to_ascii_lowercase();
        ToolName::ALL
            .into_iter()
            .find(|t| t.as_str() == folded)
            .ok_or_else(|| ToolError::UnknownTool(s.trim().to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ToolError {
    #[error("unknown tool `{0}`")]
    UnknownTool(String),
    #[error("{tool} expects {expected} parameter(s), got {got}")]
    ArityMismatch {
        tool: ToolName,
        expected: usize,
        got: usize,
    },
    #[error("graph contains no triangle")]
    NoTriangle,
    #[error("tool requires an undirected graph")]
    NotUndirected,
    #[error("tool requires a directed graph")]
    NotDirected,
    #[error("graph contains a cycle; no topological order exists")]
    CyclicGraph,
    #[error("node {0} does not exist")]
    UnknownNode(NodeId),
    #[error("source and sink must differ")]
    SameSourceSink,
    #[error("node {to} is unreachable from node {from}")]
    Unreachable { from: NodeId, to: NodeId },
}

pub(crate) fn check_node(g: &Graph, node: NodeId) -> Result<(), ToolError> {
    if node < g.node_count() {
        Ok(())
    } else {
        Err(ToolError::UnknownNode(node))
    }
}

/// Finds the triangle with the largest sum of edge weights (undirected only).
pub fn max_triangle_sum(g: &Graph) -> Result<Answer, ToolError> {
    if g.directed() {
        return Err(ToolError::NotUndirected);
    }
    let n = g.node_count() as usize;
    let mut w = vec![None; n * n];
    for e in g.edges() {
        let (u, v) = (e.u as usize, e.v as usize);
        w[u * n + v] = Some(e.cost());
        w[v * n + u] = Some(e.cost());
    }
    let mut best = None;
    for a in 0..n {
        for b in a + 1..n {
            let Some(ab) = w[a * n + b] else { continue };
            for c in b + 1..n {
                if let (Some(bc), Some(ac)) = (w[b * n + c], w[a * n + c]) {
                    let sum = ab + bc + ac;
                    best = Some(best.map_or(sum, |m: u64| m.max(sum)));
                }
            }
        }
    }
    best.map(Answer::Value).ok_or(ToolError::NoTriangle)
}

pub fn edge_count(g: &Graph) -> Answer {
    Answer::Count(g.edges().len() as u64)
}

pub fn node_count(g: &Graph) -> Answer {
    Answer::Count(u64::from(g.node_count()))
}

/// Total degree; for directed graphs in-degree plus out-degree.
pub fn degree_count(g: &Graph, node: NodeId) -> Result<Answer, ToolError> {
    check_node(g, node)?;
    let d = g.edges().iter().filter(|e| e.u == node || e.v == node).count();
    Ok(Answer::Count(d as u64))
}

pub fn edge_existence(g: &Graph, u: NodeId, v: NodeId) -> Answer {
    Answer::Bool(g.has_edge(u, v))
}

pub fn node_existence(g: &Graph, node: NodeId) -> Answer {
    Answer::Bool(node < g.node_count())
}

/// Runs the named tool on a graph and its extra parameters.
pub fn dispatch(name: ToolName, g: &Graph, params: &[NodeId]) -> Result<Answer, ToolError> {
    if params.len() != name.arity() {
        return Err(ToolError::ArityMismatch {
            tool: name,
            expected: name.arity(),
            got: params.len(),
        });
    }
    match name {
        ToolName::CycleDetection => Ok(cycle_detection(g)),
        ToolName::MaxTriangleSum => max_triangle_sum(g),
        ToolName::EdgeCount => Ok(edge_count(g)),
        ToolName::NodeCount => Ok(node_count(g)),
        ToolName::TopologicalSort => topological_sort(g),
        ToolName::DegreeCount => degree_count(g, params[0]),
        ToolName::EdgeExistence => Ok(edge_existence(g, params[0], params[1])),
        ToolName::NodeExistence => Ok(node_existence(g, params[0])),
        ToolName::MaximumFlow => maximum_flow(g, params[0], params[1]),
        ToolName::PathExistence => path_existence(g, params[0], params[1]),
        ToolName::ShortestPath => shortest_path(g, params[0], params[1]),
    }
}

/// Dispatch by a free-text tool name (case-folded, trimmed).
pub fn dispatch_named(name: &str, g: &Graph, params: &[NodeId]) -> Result<Answer, ToolError> {
    dispatch(name.parse()?, g, params)
}
