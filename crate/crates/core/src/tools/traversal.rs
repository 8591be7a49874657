use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::{check_node, Answer, ToolError};
use crate::graph::{Graph, NodeId};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    White,
    Grey,
    Black,
}

/// Iterative DFS. Directed graphs look for a back edge to a grey node; undirected
/// graphs for a visited neighbor reached through an edge other than the tree edge.
pub fn cycle_detection(g: &Graph) -> Answer {
    let adj = g.adjacency();
    let n = adj.len();
    let mut mark = vec![Mark::White; n];
    // (node, parent, next neighbor index)
    let mut stack: Vec<(usize, Option<usize>, usize)> = Vec::new();

    for root in 0..n {
        if mark[root] != Mark::White {
            continue;
        }
        mark[root] = Mark::Grey;
        stack.push((root, None, 0));
        while let Some(top) = stack.last_mut() {
            let (node, parent, idx) = *top;
            if idx == adj[node].len() {
                mark[node] = Mark::Black;
                stack.pop();
                continue;
            }
            top.2 += 1;
            let next = adj[node][idx].0 as usize;
            if g.directed() {
                match mark[next] {
                    Mark::Grey => return Answer::Bool(true),
                    Mark::White => {
                        mark[next] = Mark::Grey;
                        stack.push((next, Some(node), 0));
                    }
                    Mark::Black => {}
                }
            } else if Some(next) != parent {
                // no multi-edges, so skipping the parent once is exact
                if mark[next] != Mark::White {
                    return Answer::Bool(true);
                }
                mark[next] = Mark::Grey;
                stack.push((next, Some(node), 0));
            }
        }
    }
    Answer::Bool(false)
}

fn in_degrees(g: &Graph) -> Vec<usize> {
    let mut indeg = vec![0usize; g.node_count() as usize];
    for e in g.edges() {
        indeg[e.v as usize] += 1;
    }
    indeg
}

/// Kahn's algorithm; ties broken by the smallest node id.
pub fn topological_sort(g: &Graph) -> Result<Answer, ToolError> {
    if !g.directed() {
        return Err(ToolError::NotDirected);
    }
    let adj = g.adjacency();
    let mut indeg = in_degrees(g);
    let mut ready: BinaryHeap<Reverse<usize>> = (0..indeg.len()).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(indeg.len());
    while let Some(Reverse(node)) = ready.pop() {
        order.push(node as NodeId);
        for &(next, _) in &adj[node] {
            let next = next as usize;
            indeg[next] -= 1;
            if indeg[next] == 0 {
                ready.push(Reverse(next));
            }
        }
    }
    if order.len() == indeg.len() {
        Ok(Answer::NodeSeq(order))
    } else {
        Err(ToolError::CyclicGraph)
    }
}

/// True iff Kahn's algorithm sees exactly one zero-in-degree node at every step
/// (equivalently: the graph is a DAG with a Hamiltonian path).
pub fn has_unique_topological_order(g: &Graph) -> bool {
    if !g.directed() {
        return false;
    }
    let adj = g.adjacency();
    let mut indeg = in_degrees(g);
    let mut ready: Vec<usize> = (0..indeg.len()).filter(|&i| indeg[i] == 0).collect();
    let mut placed = 0;
    while let Some(node) = ready.pop() {
        if !ready.is_empty() {
            return false;
        }
        placed += 1;
        for &(next, _) in &adj[node] {
            let next = next as usize;
            indeg[next] -= 1;
            if indeg[next] == 0 {
                ready.push(next);
            }
        }
    }
    placed == indeg.len()
}

/// Nodes reachable from `start` (including itself), by DFS.
pub fn reachable_from(g: &Graph, start: NodeId) -> Vec<bool> {
    let adj = g.adjacency();
    let mut seen = vec![false; adj.len()];
    if (start as usize) >= adj.len() {
        return seen;
    }
    let mut stack = vec![start as usize];
    seen[start as usize] = true;
    while let Some(node) = stack.pop() {
        for &(next, _) in &adj[node] {
            if !seen[next as usize] {
                seen[next as usize] = true;
                stack.push(next as usize);
            }
        }
    }
    seen
}

pub fn path_existence(g: &Graph, from: NodeId, to: NodeId) -> Result<Answer, ToolError> {
    check_node(g, from)?;
    check_node(g, to)?;
    Ok(Answer::Bool(reachable_from(g, from)[to as usize]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, WeightKind};

    fn directed(n: u32, edges: &[(u32, u32)]) -> Graph {
        Graph::new(
            true,
            n,
            edges.iter().map(|&(u, v)| Edge::new(u, v)).collect(),
            WeightKind::None,
        )
        .unwrap()
    }

    fn undirected(n: u32, edges: &[(u32, u32)]) -> Graph {
        Graph::new(
            false,
            n,
            edges.iter().map(|&(u, v)| Edge::new(u, v)).collect(),
            WeightKind::None,
        )
        .unwrap()
    }

    #[test]
    fn cycles() {
        assert_eq!(
            cycle_detection(&undirected(3, &[(0, 1), (1, 2), (0, 2)])),
            Answer::Bool(true)
        );
        assert_eq!(cycle_detection(&directed(3, &[(0, 1), (1, 2)])), Answer::Bool(false));
        assert_eq!(
            cycle_detection(&directed(3, &[(0, 1), (1, 2), (2, 0)])),
            Answer::Bool(true)
        );
        assert_eq!(cycle_detection(&directed(2, &[(0, 1), (1, 0)])), Answer::Bool(true));
        // diamond is acyclic as a DAG but cyclic undirected
        let diamond = [(0, 1), (0, 2), (1, 3), (2, 3)];
        assert_eq!(cycle_detection(&directed(4, &diamond)), Answer::Bool(false));
        assert_eq!(cycle_detection(&undirected(4, &diamond)), Answer::Bool(true));
        assert_eq!(
            cycle_detection(&undirected(5, &[(0, 1), (1, 2), (3, 4)])),
            Answer::Bool(false)
        );
    }

    #[test]
    fn topo() {
        assert_eq!(
            topological_sort(&directed(3, &[(0, 1), (1, 2)])),
            Ok(Answer::NodeSeq(vec![0, 1, 2]))
        );
        assert_eq!(
            topological_sort(&directed(3, &[(2, 0), (0, 1)])),
            Ok(Answer::NodeSeq(vec![2, 0, 1]))
        );
        assert_eq!(
            topological_sort(&directed(2, &[(0, 1), (1, 0)])),
            Err(ToolError::CyclicGraph)
        );
        assert_eq!(topological_sort(&undirected(2, &[(0, 1)])), Err(ToolError::NotDirected));
    }

    #[test]
    fn uniqueness() {
        assert!(has_unique_topological_order(&directed(3, &[(0, 1), (1, 2), (0, 2)])));
        assert!(!has_unique_topological_order(&directed(3, &[(0, 1), (0, 2)])));
        assert!(!has_unique_topological_order(&directed(2, &[(0, 1), (1, 0)])));
    }

    #[test]
    fn paths() {
        let chain = directed(3, &[(0, 1), (1, 2)]);
        assert_eq!(path_existence(&chain, 0, 2), Ok(Answer::Bool(true)));
        assert_eq!(path_existence(&chain, 2, 0), Ok(Answer::Bool(false)));
        assert_eq!(path_existence(&chain, 0, 9), Err(ToolError::UnknownNode(9)));
        let u = undirected(3, &[(0, 1), (1, 2)]);
        assert_eq!(path_existence(&u, 2, 0), Ok(Answer::Bool(true)));
    }
}
