//! Rendering graphs into task text and extracting graph, tool name and
//! parameters back out of model output.
//!
//! The regular expressions below are the wire format. Renders are produced so
//! that exactly one of the three edge patterns matches them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use once_cell::race::OnceBox;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError, NodeId, WeightKind};
use crate::registry::ToolSpec;

/// Unweighted edge `(u, v)`.
///
/// The published form starts with a stray `$` before the first group; it is
/// read as a typesetting artifact and replaced by a literal `\(`. The closing
/// `\)` keeps this pattern from matching weighted renders.
pub const EDGE_PATTERN: &str = r"\((\d+), (\d+)\)";
/// Weighted edge `(u, v, {'weight': w})`.
pub const WEIGHTED_EDGE_PATTERN: &str = r"\((\d+), (\d+), \{'weight':\s*(\d+)\}\)";
/// Flow edge `(u, v, {'capacity': c})`.
pub const CAPACITY_EDGE_PATTERN: &str = r"\((\d+), (\d+), \{'capacity':\s*(\d+)\}\)";
/// Tool name anchor.
pub const TOOL_NAME_PATTERN: &str = r"API_name:\s*(\w+|\n\s*\w+)";
/// Named two-parameter template as published; [`named_parameter_pattern`]
/// instantiates it for any parameter list.
pub const NAMED_PARAMETERS_TEMPLATE: &str = r"(?:source\s*=\s*(\d+)[,\s]*target\s*=\s*(\d+))";
/// Positional fallback for two parameters; generalized by [`positional_parameter_pattern`].
pub const POSITIONAL_PARAMETERS_TEMPLATE: &str = r"(?:G,\s*(\d+),\s*(\d+))";
/// Graph file extension used for out-of-budget graphs.
pub const GRAPH_FILE_EXTENSION: &str = "edges";
/// A non-whitespace token containing a path separator and ending in `.edges`.
pub const FILE_PATH_PATTERN: &str = r#"[^\s'"`<>()\[\]]*[/\\][^\s'"`<>()\[\]]*\.edges\b"#;

fn compiled(cell: &'static OnceBox<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| alloc::boxed::Box::new(Regex::new(pattern).expect("static pattern")))
}

fn edge_regex(kind: WeightKind) -> &'static Regex {
    static PLAIN: OnceBox<Regex> = OnceBox::new();
    static WEIGHT: OnceBox<Regex> = OnceBox::new();
    static CAPACITY: OnceBox<Regex> = OnceBox::new();
    match kind {
        WeightKind::None => compiled(&PLAIN, EDGE_PATTERN),
        WeightKind::Weight => compiled(&WEIGHT, WEIGHTED_EDGE_PATTERN),
        WeightKind::Capacity => compiled(&CAPACITY, CAPACITY_EDGE_PATTERN),
    }
}

fn tool_name_regex() -> &'static Regex {
    static CELL: OnceBox<Regex> = OnceBox::new();
    compiled(&CELL, TOOL_NAME_PATTERN)
}

fn file_path_regex() -> &'static Regex {
    static CELL: OnceBox<Regex> = OnceBox::new();
    compiled(&CELL, FILE_PATH_PATTERN)
}

/// Parsed value of one pipeline stage. Failures are data, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum ExtractionResult {
    Graph(Graph),
    Name(String),
    Params(Vec<NodeId>),
    Path(String),
    ParseFailure(String),
}

impl ExtractionResult {
    fn failure(reason: impl Into<String>) -> Self {
        let reason = reason.into();
        debug_assert!(!reason.is_empty());
        ExtractionResult::ParseFailure(reason)
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, ExtractionResult::ParseFailure(_))
    }
}

/// NetworkX-style edge list: `(u, v)`, `(u, v, {'weight': w})` or
/// `(u, v, {'capacity': c})`, separated by `, `.
pub fn render_edge_list(g: &Graph) -> String {
    render_edges(g.edges(), g.weight_kind())
}

pub fn render_edges(edges: &[Edge], kind: WeightKind) -> String {
    let mut out = String::new();
    for (i, e) in edges.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        match (kind, e.weight) {
            (WeightKind::Weight, Some(w)) => out.push_str(&format!("({}, {}, {{'weight': {}}})", e.u, e.v, w)),
            (WeightKind::Capacity, Some(w)) => out.push_str(&format!("({}, {}, {{'capacity': {}}})", e.u, e.v, w)),
            _ => out.push_str(&format!("({}, {})", e.u, e.v)),
        }
    }
    out
}

fn parse_id(s: &str) -> Option<u32> {
    s.parse().ok()
}

/// Collects every non-overlapping edge match and rebuilds the graph with
/// `node_count = max id + 1`.
pub fn extract_graph(text: &str, weight_kind: WeightKind, directed: bool) -> ExtractionResult {
    let re = edge_regex(weight_kind);
    let mut edges = Vec::new();
    for caps in re.captures_iter(text) {
        let (Some(u), Some(v)) = (parse_id(&caps[1]), parse_id(&caps[2])) else {
            return ExtractionResult::failure("node id out of range");
        };
        let weight = match weight_kind {
            WeightKind::None => None,
            _ => match parse_id(&caps[3]) {
                Some(w) => Some(w),
                None => return ExtractionResult::failure("edge weight out of range"),
            },
        };
        edges.push(Edge { u, v, weight });
    }
    if edges.is_empty() {
        return ExtractionResult::failure("no edge matches");
    }
    match Graph::from_edge_list(directed, edges, weight_kind) {
        Ok(g) => ExtractionResult::Graph(g),
        Err(e) => ExtractionResult::failure(format!("invalid graph: {e}")),
    }
}

/// First `API_name:` match, trimmed.
pub fn extract_tool_name(text: &str) -> ExtractionResult {
    match tool_name_regex().captures(text) {
        Some(caps) => ExtractionResult::Name(caps[1].trim().to_string()),
        None => ExtractionResult::failure("no API_name anchor"),
    }
}

/// Named template for the tool's parameters in declaration order, e.g.
/// `(?:source\s*=\s*(\d+)[,\s]*target\s*=\s*(\d+))`.
pub fn named_parameter_pattern(names: &[&str]) -> String {
    let body: Vec<String> = names
        .iter()
        .map(|n| format!(r"{}\s*=\s*(\d+)", regex::escape(n)))
        .collect();
    format!("(?:{})", body.join(r"[,\s]*"))
}

/// Positional fallback, e.g. `(?:G,\s*(\d+),\s*(\d+))` for two parameters.
pub fn positional_parameter_pattern(arity: usize) -> String {
    let mut p = String::from("(?:G");
    for _ in 0..arity {
        p.push_str(r",\s*(\d+)");
    }
    p.push(')');
    p
}

fn captures_to_ids(caps: &regex::Captures<'_>, arity: usize) -> Option<Vec<NodeId>> {
    (1..=arity)
        .map(|i| caps.get(i).and_then(|m| parse_id(m.as_str())))
        .collect()
}

/// Named template first (declaration order, then any order), positional fallback last.
pub fn extract_parameters(text: &str, spec: &ToolSpec) -> ExtractionResult {
    let names = spec.value_parameter_names();
    if names.is_empty() {
        return ExtractionResult::Params(Vec::new());
    }
    let arity = names.len();

    let ordered = Regex::new(&named_parameter_pattern(&names)).expect("escaped names");
    if let Some(caps) = ordered.captures(text) {
        if let Some(values) = captures_to_ids(&caps, arity) {
            return ExtractionResult::Params(values);
        }
    }

    let mut found = Vec::with_capacity(arity);
    for name in &names {
        let re = Regex::new(&format!(r"\b{}\s*=\s*(\d+)", regex::escape(name))).expect("escaped name");
        if let Some(v) = re.captures(text).and_then(|c| parse_id(&c[1])) {
            found.push(v);
        }
    }
    if found.len() == arity {
        return ExtractionResult::Params(found);
    }
    let any_named = !found.is_empty();

    let positional = Regex::new(&positional_parameter_pattern(arity)).expect("static shape");
    if let Some(values) = positional.captures(text).and_then(|c| captures_to_ids(&c, arity)) {
        return ExtractionResult::Params(values);
    }
    if any_named {
        ExtractionResult::failure("arity")
    } else {
        ExtractionResult::failure("no parameter matches")
    }
}

/// First path-shaped token ending in the graph file extension.
pub fn extract_file_path(text: &str) -> ExtractionResult {
    match file_path_regex().find(text) {
        Some(m) => ExtractionResult::Path(m.as_str().to_string()),
        None => ExtractionResult::failure("no graph file path"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElFormatError {
    #[error("malformed graph file at line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
}

fn malformed(line: usize, reason: impl Into<String>) -> ElFormatError {
    ElFormatError::MalformedLine {
        line,
        reason: reason.into(),
    }
}

/// Graph file body: `directed`/`undirected` header, then one `u, v` or
/// `u, v, w` line per edge.
pub fn format_el_graph(g: &Graph) -> String {
    let mut out = String::from(if g.directed() { "directed\n" } else { "undirected\n" });
    for e in g.edges() {
        match e.weight {
            Some(w) => out.push_str(&format!("{}, {}, {}\n", e.u, e.v, w)),
            None => out.push_str(&format!("{}, {}\n", e.u, e.v)),
        }
    }
    out
}

/// Parses a graph file body. Weighted files come back as [`WeightKind::Weight`];
/// use [`Graph::with_weight_kind`] to reinterpret them as capacities.
pub fn parse_el_graph(text: &str) -> Result<Graph, ElFormatError> {
    let mut lines = text.lines().enumerate();
    let directed = match lines.next().map(|(_, l)| l.trim()) {
        Some("directed") => true,
        Some("undirected") => false,
        _ => return Err(malformed(1, "expected `directed` or `undirected` header")),
    };
    let mut edges = Vec::new();
    let mut width = None;
    let mut seen = alloc::collections::BTreeSet::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(malformed(line_no, "expected `u, v` or `u, v, w`"));
        }
        if *width.get_or_insert(fields.len()) != fields.len() {
            return Err(malformed(line_no, "mixed weighted and unweighted lines"));
        }
        let nums: Option<Vec<u32>> = fields.iter().map(|f| f.parse().ok()).collect();
        let nums = nums.ok_or_else(|| malformed(line_no, "non-integer field"))?;
        let edge = Edge {
            u: nums[0],
            v: nums[1],
            weight: nums.get(2).copied(),
        };
        if edge.u == edge.v {
            return Err(malformed(line_no, "self-loop"));
        }
        if edge.weight == Some(0) {
            return Err(malformed(line_no, "weight must be positive"));
        }
        let key = if directed {
            (edge.u, edge.v)
        } else {
            (edge.u.min(edge.v), edge.u.max(edge.v))
        };
        if !seen.insert(key) {
            return Err(malformed(line_no, "duplicate edge"));
        }
        edges.push(edge);
    }
    let kind = if width == Some(3) {
        WeightKind::Weight
    } else {
        WeightKind::None
    };
    Graph::from_edge_list(directed, edges, kind).map_err(|e: GraphError| malformed(0, e.to_string()))
}
