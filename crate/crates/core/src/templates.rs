//! Five natural-language descriptions per task.
//!
//! Templates never write node pairs in parentheses or `name=value` forms, so the
//! only text the extraction patterns can match is the edge list itself.

use alloc::format;
use alloc::string::String;

use crate::codec::render_edge_list;
use crate::task::{SizeClass, TaskInstance};
use crate::tools::ToolName;

fn wl_intro(variant: u8, ty: &str, edges: &str) -> String {
    match variant % 5 {
        0 => format!("Given a {ty} graph with the following edges: [{edges}]."),
        1 => format!("Consider the {ty} graph described by this edge list: [{edges}]."),
        2 => format!("In a {ty} graph, the edges are [{edges}]."),
        3 => format!("A {ty} graph is defined by the edges [{edges}]."),
        _ => format!("The {ty} graph below is given as a list of edges: [{edges}]."),
    }
}

fn el_intro(variant: u8, ty: &str, path: &str) -> String {
    match variant % 5 {
        0 => format!("Given a {ty} graph stored in the file {path}."),
        1 => format!("Consider the {ty} graph saved at {path}."),
        2 => format!("The edges of a {ty} graph are listed in the file {path}."),
        3 => format!("A {ty} graph is too large to show here; it is stored at {path}."),
        _ => format!("Load the {ty} graph from {path}."),
    }
}

fn question(tool: ToolName, variant: u8, a: u32, b: u32) -> String {
    use ToolName::*;
    let v = variant % 5;
    match tool {
        CycleDetection => match v {
            0 => "Is there a cycle in this graph?".into(),
            1 => "Does the graph contain any cycle?".into(),
            2 => "Determine whether the graph has a cycle.".into(),
            3 => "Can a cycle be found anywhere in this graph?".into(),
            _ => "Check whether any cycle exists in the graph.".into(),
        },
        MaxTriangleSum => match v {
            0 => "What is the largest sum of edge weights over all triangles in the graph?".into(),
            1 => "Find the triangle whose three edge weights add up to the maximum, and report that sum.".into(),
            2 => "Among all triangles in the graph, which total edge weight is the highest?".into(),
            3 => "Compute the maximum triangle weight sum of this graph.".into(),
            _ => "Report the biggest total weight of any three mutually connected nodes.".into(),
        },
        EdgeCount => match v {
            0 => "How many edges are in this graph?".into(),
            1 => "Count the total number of edges in the graph.".into(),
            2 => "What is the number of edges of the graph?".into(),
            3 => "Determine how many edges the graph has.".into(),
            _ => "Report the edge count of this graph.".into(),
        },
        NodeCount => match v {
            0 => "How many nodes are in this graph?".into(),
            1 => "Count the total number of nodes in the graph.".into(),
            2 => "What is the number of nodes of the graph?".into(),
            3 => "Determine how many nodes the graph has.".into(),
            _ => "Report the node count of this graph.".into(),
        },
        TopologicalSort => match v {
            0 => "Give a topological ordering of the nodes of this graph.".into(),
            1 => "Arrange all nodes of the graph in topological order.".into(),
            2 => "What is the topological sort of this graph?".into(),
            3 => "Order the nodes so that every edge points from an earlier node to a later one.".into(),
            _ => "List the nodes of the graph in a valid topological order.".into(),
        },
        DegreeCount => match v {
            0 => format!("What is the degree of node {a}?"),
            1 => format!("How many edges are connected to node {a}?"),
            2 => format!("Count the edges incident to node {a}."),
            3 => format!("Determine the number of edges touching node {a}."),
            _ => format!("Report the degree of node {a} in this graph."),
        },
        EdgeExistence => match v {
            0 => format!("Is there an edge from node {a} to node {b}?"),
            1 => format!("Does an edge exist between node {a} and node {b}?"),
            2 => format!("Determine whether node {a} is directly connected to node {b} by an edge."),
            3 => format!("Check if the graph has an edge linking node {a} with node {b}."),
            _ => format!("Is node {a} joined to node {b} by a single edge?"),
        },
        NodeExistence => match v {
            0 => format!("Does node {a} exist in this graph?"),
            1 => format!("Is node {a} one of the nodes of the graph?"),
            2 => format!("Determine whether the graph contains node {a}."),
            3 => format!("Check if node {a} is present in the graph."),
            _ => format!("Can node {a} be found in this graph?"),
        },
        MaximumFlow => match v {
            0 => format!("What is the maximum flow from node {a} to node {b}?"),
            1 => format!("Compute the largest amount of flow that can be sent from source node {a} to sink node {b}."),
            2 => format!("Determine the maximum flow value with node {a} as source and node {b} as sink."),
            3 => format!("How much flow can travel from node {a} to node {b} at most?"),
            _ => format!("Find the max flow between source {a} and sink {b}."),
        },
        PathExistence => match v {
            0 => format!("Is there a path from node {a} to node {b}?"),
            1 => format!("Can node {b} be reached starting from node {a}?"),
            2 => format!("Determine whether a path exists between node {a} and node {b}."),
            3 => format!("Check if node {a} is connected to node {b} through some path."),
            _ => format!("Does any route lead from node {a} to node {b}?"),
        },
        ShortestPath => match v {
            0 => format!("What is the shortest path distance from node {a} to node {b}?"),
            1 => format!("Find the minimum total weight of a path from node {a} to node {b}."),
            2 => format!("Determine the shortest distance between node {a} and node {b}."),
            3 => format!("How long is the shortest path starting at node {a} and ending at node {b}?"),
            _ => format!("Compute the length of the cheapest route from node {a} to node {b}."),
        },
    }
}

/// Task text for an instance: description template `description_variant`,
/// with the inline edge list (WL) or the graph file path (EL).
pub fn render_task_text(instance: &TaskInstance) -> String {
    let kind = instance.kind;
    let ty = kind.graph_type();
    let variant = instance.description_variant;
    let intro = match (instance.size_class, &instance.graph_file) {
        (SizeClass::EL, Some(path)) => el_intro(variant, ty, path),
        _ => wl_intro(variant, ty, &render_edge_list(&instance.graph)),
    };
    let a = instance.params.first().copied().unwrap_or(0);
    let b = instance.params.get(1).copied().unwrap_or(0);
    format!("{intro} {}", question(kind.tool(), variant, a, b))
}
