use alloc::collections::BinaryHeap;
use alloc::vec;
use core::cmp::Reverse;

use super::{check_node, Answer, ToolError};
use crate::graph::{Graph, NodeId};

/// Dijkstra distance from `from` to `to`. Unweighted edges cost 1.
pub fn shortest_path(g: &Graph, from: NodeId, to: NodeId) -> Result<Answer, ToolError> {
    check_node(g, from)?;
    check_node(g, to)?;
    let adj = g.adjacency();
    let mut dist = vec![u64::MAX; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[from as usize] = 0;
    heap.push(Reverse((0u64, from as usize)));
    while let Some(Reverse((d, node))) = heap.pop() {
        if node == to as usize {
            return Ok(Answer::Value(d));
        }
        if d > dist[node] {
            continue;
        }
        for &(next, w) in &adj[node] {
            let nd = d + w;
            if nd < dist[next as usize] {
                dist[next as usize] = nd;
                heap.push(Reverse((nd, next as usize)));
            }
        }
    }
    Err(ToolError::Unreachable { from, to })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, WeightKind};

    #[test]
    fn basics() {
        let g = Graph::new(false, 2, vec![Edge::weighted(0, 1, 5)], WeightKind::Weight).unwrap();
        assert_eq!(shortest_path(&g, 0, 1), Ok(Answer::Value(5)));
        assert_eq!(shortest_path(&g, 1, 1), Ok(Answer::Value(0)));
    }

    #[test]
    fn prefers_cheaper_detour() {
        let g = Graph::new(
            true,
            4,
            vec![
                Edge::weighted(0, 3, 10),
                Edge::weighted(0, 1, 2),
                Edge::weighted(1, 2, 3),
                Edge::weighted(2, 3, 1),
            ],
            WeightKind::Weight,
        )
        .unwrap();
        assert_eq!(shortest_path(&g, 0, 3), Ok(Answer::Value(6)));
        assert_eq!(shortest_path(&g, 3, 0), Err(ToolError::Unreachable { from: 3, to: 0 }));
        assert_eq!(shortest_path(&g, 0, 8), Err(ToolError::UnknownNode(8)));
    }
}
