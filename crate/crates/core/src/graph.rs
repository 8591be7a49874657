//! Canonical graph representation shared by every tool and codec.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense node identifier, `0..node_count`.
pub type NodeId = u32;

/// What the optional integer on each edge means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    None,
    Weight,
    Capacity,
}

impl WeightKind {
    pub fn is_weighted(self) -> bool {
        self != WeightKind::None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
}

impl Edge {
    pub fn new(u: NodeId, v: NodeId) -> Self {
        Self { u, v, weight: None }
    }

    pub fn weighted(u: NodeId, v: NodeId, weight: u32) -> Self {
        Self {
            u,
            v,
            weight: Some(weight),
        }
    }

    /// Weight used by the algorithms; unweighted edges count as 1.
    pub fn cost(&self) -> u64 {
        u64::from(self.weight.unwrap_or(1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid edge ({u}, {v}): node id out of range for {node_count} nodes")]
    OutOfRange { u: NodeId, v: NodeId, node_count: u32 },
    #[error("invalid edge ({u}, {u}): self-loops are not allowed")]
    SelfLoop { u: NodeId },
    #[error("invalid edge ({u}, {v}): duplicate edge")]
    Duplicate { u: NodeId, v: NodeId },
    #[error("edge ({u}, {v}) weight does not match weight kind {kind:?}")]
    WeightMismatch { u: NodeId, v: NodeId, kind: WeightKind },
}

impl GraphError {
    /// True for the out-of-range / self-loop / duplicate family.
    pub fn is_invalid_edge(&self) -> bool {
        !matches!(self, GraphError::WeightMismatch { .. })
    }
}

/// Edge normalized for set comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalEdge {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: Option<u32>,
}

/// Immutable, validated graph.
///
/// `inferred_node_count` marks graphs rebuilt from an edge list alone, whose
/// node count is `max id + 1` and so cannot know about trailing isolated nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct Graph {
    directed: bool,
    node_count: u32,
    weight_kind: WeightKind,
    edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "core::ops::Not::not")]
    inferred_node_count: bool,
}

#[derive(Deserialize)]
struct RawGraph {
    directed: bool,
    node_count: u32,
    weight_kind: WeightKind,
    edges: Vec<Edge>,
    #[serde(default)]
    inferred_node_count: bool,
}

impl TryFrom<RawGraph> for Graph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<Self, Self::Error> {
        let mut g = Graph::new(raw.directed, raw.node_count, raw.edges, raw.weight_kind)?;
        g.inferred_node_count = raw.inferred_node_count;
        Ok(g)
    }
}

impl Graph {
    /// Validates and builds a graph.
    pub fn new(directed: bool, node_count: u32, edges: Vec<Edge>, weight_kind: WeightKind) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for e in &edges {
            if e.u >= node_count || e.v >= node_count {
                return Err(GraphError::OutOfRange {
                    u: e.u,
                    v: e.v,
                    node_count,
                });
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop { u: e.u });
            }
            let weight_ok = match (weight_kind, e.weight) {
                (WeightKind::None, None) => true,
                (WeightKind::None, Some(_)) => false,
                (_, Some(w)) => w >= 1,
                (_, None) => false,
            };
            if !weight_ok {
                return Err(GraphError::WeightMismatch {
                    u: e.u,
                    v: e.v,
                    kind: weight_kind,
                });
            }
            let key = if directed {
                (e.u, e.v)
            } else {
                (e.u.min(e.v), e.u.max(e.v))
            };
            if !seen.insert(key) {
                return Err(GraphError::Duplicate { u: e.u, v: e.v });
            }
        }
        Ok(Self {
            directed,
            node_count,
            weight_kind,
            edges,
            inferred_node_count: false,
        })
    }

    /// Rebuilds a graph from an edge list only; node count becomes `max id + 1`.
    pub fn from_edge_list(directed: bool, edges: Vec<Edge>, weight_kind: WeightKind) -> Result<Self, GraphError> {
        let node_count = edges.iter().map(|e| e.u.max(e.v).saturating_add(1)).max().unwrap_or(0);
        let mut g = Self::new(directed, node_count, edges, weight_kind)?;
        g.inferred_node_count = true;
        Ok(g)
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weight_kind(&self) -> WeightKind {
        self.weight_kind
    }

    pub fn inferred_node_count(&self) -> bool {
        self.inferred_node_count
    }

    /// Same edges reinterpreted under another weight kind (weight <-> capacity).
    pub fn with_weight_kind(&self, kind: WeightKind) -> Result<Self, GraphError> {
        let mut g = Self::new(self.directed, self.node_count, self.edges.clone(), kind)?;
        g.inferred_node_count = self.inferred_node_count;
        Ok(g)
    }

    /// Outgoing arcs per node; undirected edges appear in both directions.
    pub fn adjacency(&self) -> Vec<Vec<(NodeId, u64)>> {
        let mut adj = vec![Vec::new(); self.node_count as usize];
        for e in &self.edges {
            adj[e.u as usize].push((e.v, e.cost()));
            if !self.directed {
                adj[e.v as usize].push((e.u, e.cost()));
            }
        }
        adj
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edges
            .iter()
            .any(|e| (e.u == u && e.v == v) || (!self.directed && e.u == v && e.v == u))
    }

    pub fn canonical_edge_set(&self) -> BTreeSet<CanonicalEdge> {
        self.edges
            .iter()
            .map(|e| {
                let (u, v) = if self.directed {
                    (e.u, e.v)
                } else {
                    (e.u.min(e.v), e.u.max(e.v))
                };
                CanonicalEdge { u, v, weight: e.weight }
            })
            .collect()
    }
}

/// Free-function form of [`Graph::canonical_edge_set`].
pub fn canonical_edge_set(g: &Graph) -> BTreeSet<CanonicalEdge> {
    g.canonical_edge_set()
}

/// Edge-level graph equality: a single differing edge or weight makes graphs unequal.
///
/// Node counts are compared only when neither side was rebuilt from an edge list;
/// a rebuilt side's count is implied by its edges.
pub fn graphs_equal(a: &Graph, b: &Graph) -> bool {
    if a.directed != b.directed || a.weight_kind != b.weight_kind {
        return false;
    }
    if !a.inferred_node_count && !b.inferred_node_count && a.node_count != b.node_count {
        return false;
    }
    a.edges.len() == b.edges.len() && a.canonical_edge_set() == b.canonical_edge_set()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(
            false,
            3,
            vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(0, 2)],
            WeightKind::None,
        )
        .unwrap()
    }

    #[test]
    fn builds_triangle() {
        let g = triangle();
        assert_eq!(g.edges().len(), 3);
        assert!(!g.directed());
        assert!(g.has_edge(2, 1));
    }

    #[test]
    fn rejects_self_loop() {
        let err = Graph::new(false, 2, vec![Edge::new(0, 0)], WeightKind::None).unwrap_err();
        assert_eq!(err, GraphError::SelfLoop { u: 0 });
        assert!(err.is_invalid_edge());
    }

    #[test]
    fn rejects_out_of_range_and_duplicates() {
        assert!(matches!(
            Graph::new(true, 2, vec![Edge::new(0, 2)], WeightKind::None),
            Err(GraphError::OutOfRange { .. })
        ));
        assert!(matches!(
            Graph::new(false, 3, vec![Edge::new(0, 1), Edge::new(1, 0)], WeightKind::None),
            Err(GraphError::Duplicate { .. })
        ));
        // antiparallel arcs are distinct in a directed graph
        assert!(Graph::new(true, 2, vec![Edge::new(0, 1), Edge::new(1, 0)], WeightKind::None).is_ok());
    }

    #[test]
    fn weighted_path() {
        let g = Graph::new(
            false,
            4,
            vec![Edge::weighted(0, 1, 3), Edge::weighted(1, 2, 5)],
            WeightKind::Weight,
        )
        .unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edges()[1].weight, Some(5));
    }

    #[test]
    fn weight_mismatch() {
        let err = Graph::new(false, 2, vec![Edge::new(0, 1)], WeightKind::Weight).unwrap_err();
        assert!(matches!(err, GraphError::WeightMismatch { .. }));
        assert!(!err.is_invalid_edge());
        assert!(Graph::new(false, 2, vec![Edge::weighted(0, 1, 2)], WeightKind::None).is_err());
        assert!(Graph::new(false, 2, vec![Edge::weighted(0, 1, 0)], WeightKind::Capacity).is_err());
    }

    #[test]
    fn canonical_set_normalizes_undirected_only() {
        let g = Graph::new(false, 3, vec![Edge::new(2, 1), Edge::new(0, 1)], WeightKind::None).unwrap();
        let set: Vec<_> = g.canonical_edge_set().into_iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(set, vec![(0, 1), (1, 2)]);

        let d = Graph::new(true, 3, vec![Edge::new(2, 1)], WeightKind::None).unwrap();
        let set: Vec<_> = d.canonical_edge_set().into_iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(set, vec![(2, 1)]);

        let w = Graph::new(false, 3, vec![Edge::weighted(1, 2, 4)], WeightKind::Weight).unwrap();
        let e = w.canonical_edge_set().into_iter().next().unwrap();
        assert_eq!((e.u, e.v, e.weight), (1, 2, Some(4)));
    }

    #[test]
    fn equality_rules() {
        let a = triangle();
        let b = Graph::new(
            false,
            3,
            vec![Edge::new(2, 0), Edge::new(2, 1), Edge::new(1, 0)],
            WeightKind::None,
        )
        .unwrap();
        assert!(graphs_equal(&a, &b));

        let directed = Graph::new(
            true,
            3,
            vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(0, 2)],
            WeightKind::None,
        )
        .unwrap();
        assert!(!graphs_equal(&a, &directed));

        let w1 = Graph::new(
            false,
            3,
            vec![Edge::weighted(0, 1, 2), Edge::weighted(1, 2, 3)],
            WeightKind::Weight,
        )
        .unwrap();
        let w2 = Graph::new(
            false,
            3,
            vec![Edge::weighted(0, 1, 2), Edge::weighted(1, 2, 4)],
            WeightKind::Weight,
        )
        .unwrap();
        assert!(!graphs_equal(&w1, &w2));
    }

    #[test]
    fn reconstructed_side_ignores_isolated_tail() {
        let explicit = Graph::new(false, 5, vec![Edge::new(0, 1)], WeightKind::None).unwrap();
        let rebuilt = Graph::from_edge_list(false, vec![Edge::new(1, 0)], WeightKind::None).unwrap();
        assert_eq!(rebuilt.node_count(), 2);
        assert!(graphs_equal(&explicit, &rebuilt));

        let other = Graph::new(false, 4, vec![Edge::new(0, 1)], WeightKind::None).unwrap();
        assert!(!graphs_equal(&explicit, &other));
    }

    #[test]
    fn serde_validates() {
        let json = r#"{"directed":false,"node_count":2,"weight_kind":"none","edges":[{"u":0,"v":0}]}"#;
        assert!(serde_json::from_str::<Graph>(json).is_err());
        let g = triangle();
        let back: Graph = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
