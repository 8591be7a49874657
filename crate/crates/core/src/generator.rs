//! Seeded generation of benchmark instances under the size, balance and
//! uniqueness rules.
//!
//! Every instance draws from its own ChaCha stream seeded by
//! `(config seed, kind, size class, index)`, so corpora are reproducible and
//! instances can be generated in any order or in parallel.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::GRAPH_FILE_EXTENSION;
use crate::graph::{Edge, Graph, NodeId};
use crate::task::{SizeClass, TaskInstance, TaskKind, DEFAULT_TOKEN_BUDGET, DESCRIPTION_VARIANTS};
use crate::templates::render_task_text;
use crate::tools::{dispatch, has_unique_topological_order, max_triangle_sum, reachable_from, Answer, ToolName};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub kinds: Vec<TaskKind>,
    /// Instances per kind and per size class.
    pub count_per_kind: usize,
    pub sizes: Vec<SizeClass>,
    pub seed: u64,
    /// Edge probability is drawn uniformly from this range for every graph.
    pub edge_probability: (f64, f64),
    /// Inclusive range of edge weights and capacities.
    pub weight_range: (u32, u32),
    pub token_budget: usize,
    /// Directory prefix written into the path of out-of-budget graph files.
    pub graph_dir: String,
    pub max_retries: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            kinds: TaskKind::all(),
            count_per_kind: 2000,
            sizes: alloc::vec![SizeClass::WL],
            seed: 0,
            edge_probability: (0.02, 0.5),
            weight_range: (1, 10),
            token_budget: DEFAULT_TOKEN_BUDGET,
            graph_dir: String::from("graphs"),
            max_retries: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("gave up on {kind} ({size}) instance {index} after {retries} attempts")]
    ExhaustedRetries {
        kind: TaskKind,
        size: SizeClass,
        index: usize,
        retries: u32,
    },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let (lo, hi) = self.edge_probability;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(GenError::InvalidConfig(format!(
                "edge probability range ({lo}, {hi}) must lie in (0, 1]"
            )));
        }
        let (wlo, whi) = self.weight_range;
        if wlo < 1 || wlo > whi {
            return Err(GenError::InvalidConfig(format!(
                "weight range ({wlo}, {whi}) must satisfy 1 <= min <= max"
            )));
        }
        if self.token_budget == 0 {
            return Err(GenError::InvalidConfig("token budget must be positive".into()));
        }
        if self.max_retries == 0 {
            return Err(GenError::InvalidConfig("max_retries must be positive".into()));
        }
        Ok(())
    }
}

/// Rough token estimate: one token per four characters, rounded up.
pub fn estimate_tokens(text: &str) -> usize {
    text.chars().count().div_ceil(4)
}

/// WL iff the estimated token count is within the budget (inclusive).
pub fn classify_size(text: &str, budget: usize) -> SizeClass {
    if estimate_tokens(text) <= budget {
        SizeClass::WL
    } else {
        SizeClass::EL
    }
}

fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-instance seed derived from the corpus seed and the instance coordinates.
pub fn derive_seed(seed: u64, kind: TaskKind, size: SizeClass, index: usize) -> u64 {
    let mut h = mix(seed);
    h = mix(h ^ kind.ordinal() as u64);
    h = mix(h ^ size as u64);
    mix(h ^ index as u64)
}

pub fn instance_id(kind: TaskKind, size: SizeClass, index: usize) -> String {
    format!("q{:02}-{}-{:05}", kind.ordinal(), size, index)
}

fn min_nodes(kind: TaskKind) -> u32 {
    if kind.tool() == ToolName::MaxTriangleSum {
        3
    } else {
        2
    }
}

fn pair_count(n: u32, directed: bool) -> f64 {
    let n = f64::from(n);
    if directed {
        n * (n - 1.0)
    } else {
        n * (n - 1.0) / 2.0
    }
}

struct Sampler<'a> {
    rng: ChaCha8Rng,
    config: &'a GenConfig,
    kind: TaskKind,
    size: SizeClass,
}

impl Sampler<'_> {
    fn node_count(&mut self) -> u32 {
        let (lo, hi) = self.size.node_range();
        self.rng.random_range(lo.max(min_nodes(self.kind))..=hi)
    }

    /// Edge probability, capped so the expected edge count stays under 90% of
    /// the size-class limit.
    fn probability(&mut self, pairs: f64) -> f64 {
        let (lo, hi) = self.config.edge_probability;
        let p = if hi > lo { self.rng.random_range(lo..=hi) } else { lo };
        let cap = 0.9 * self.size.max_edges() as f64 / pairs.max(1.0);
        p.min(cap)
    }

    fn random_pairs(&mut self, n: u32, directed: bool, p: f64) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for u in 0..n {
            let start = if directed { 0 } else { u + 1 };
            for v in start..n {
                if u != v && self.rng.random_bool(p) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn dag_pairs(&mut self, n: u32, p: f64) -> Vec<(NodeId, NodeId)> {
        let mut order: Vec<NodeId> = (0..n).collect();
        order.shuffle(&mut self.rng);
        let mut out = Vec::new();
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                if self.rng.random_bool(p) {
                    out.push((order[i], order[j]));
                }
            }
        }
        out
    }

    fn forest_pairs(&mut self, n: u32, p: f64) -> Vec<(NodeId, NodeId)> {
        let mut candidates = self.random_pairs(n, false, p);
        candidates.shuffle(&mut self.rng);
        let mut parent: Vec<u32> = (0..n).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        candidates
            .into_iter()
            .filter(|&(u, v)| {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru == rv {
                    false
                } else {
                    parent[ru as usize] = rv;
                    true
                }
            })
            .collect()
    }

    /// Hamiltonian backbone plus forward edges: a DAG with a unique topological order.
    fn unique_dag_pairs(&mut self, n: u32, p: f64) -> Vec<(NodeId, NodeId)> {
        let mut order: Vec<NodeId> = (0..n).collect();
        order.shuffle(&mut self.rng);
        let mut out: Vec<(NodeId, NodeId)> = order.windows(2).map(|w| (w[0], w[1])).collect();
        for i in 0..order.len() {
            for j in i + 2..order.len() {
                if self.rng.random_bool(p) {
                    out.push((order[i], order[j]));
                }
            }
        }
        out
    }

    /// Makes sure node `n - 1` has an edge, so an edge list alone implies the
    /// node count. The new edge points into the isolated node, which keeps
    /// DAGs acyclic and forests cycle-free.
    fn attach_last(&mut self, n: u32, pairs: &mut Vec<(NodeId, NodeId)>) {
        let last = n - 1;
        if pairs.iter().any(|&(u, v)| u == last || v == last) {
            return;
        }
        let other = self.rng.random_range(0..last);
        pairs.push((other, last));
    }

    fn finish(&mut self, n: u32, mut pairs: Vec<(NodeId, NodeId)>) -> Option<Graph> {
        if pairs.is_empty() || pairs.len() > self.size.max_edges() {
            return None;
        }
        pairs.shuffle(&mut self.rng);
        let directed = self.kind.directed();
        let weighted = self.kind.weight_kind().is_weighted();
        let (wlo, whi) = self.config.weight_range;
        let edges = pairs
            .into_iter()
            .map(|(u, v)| {
                let (u, v) = if !directed && self.rng.random_bool(0.5) {
                    (v, u)
                } else {
                    (u, v)
                };
                let weight = weighted.then(|| self.rng.random_range(wlo..=whi));
                Edge { u, v, weight }
            })
            .collect();
        Graph::new(directed, n, edges, self.kind.weight_kind()).ok()
    }

    fn plain_graph(&mut self) -> Option<Graph> {
        let n = self.node_count();
        let directed = self.kind.directed();
        let p = self.probability(pair_count(n, directed));
        let mut pairs = self.random_pairs(n, directed, p);
        self.attach_last(n, &mut pairs);
        self.finish(n, pairs)
    }

    fn acyclic_graph(&mut self) -> Option<Graph> {
        let n = self.node_count();
        let directed = self.kind.directed();
        let p = self.probability(pair_count(n, directed));
        let mut pairs = if directed {
            self.dag_pairs(n, p)
        } else {
            self.forest_pairs(n, p)
        };
        self.attach_last(n, &mut pairs);
        self.finish(n, pairs)
    }

    fn unique_dag(&mut self) -> Option<Graph> {
        let n = self.node_count();
        let p = self.probability(pair_count(n, false));
        let pairs = self.unique_dag_pairs(n, p);
        self.finish(n, pairs)
    }

    fn with_triangle(&mut self) -> Option<Graph> {
        let n = self.node_count();
        let p = self.probability(pair_count(n, false));
        let mut pairs = self.random_pairs(n, false, p);
        self.attach_last(n, &mut pairs);
        let g = self.finish(n, pairs)?;
        if max_triangle_sum(&g).is_ok() {
            return Some(g);
        }
        let mut nodes: Vec<NodeId> = (0..n).collect();
        nodes.shuffle(&mut self.rng);
        let (a, b, c) = (nodes[0], nodes[1], nodes[2]);
        let (wlo, whi) = self.config.weight_range;
        let mut edges = g.edges().to_vec();
        for (u, v) in [(a, b), (b, c), (a, c)] {
            if !g.has_edge(u, v) {
                edges.push(Edge::weighted(u, v, self.rng.random_range(wlo..=whi)));
            }
        }
        if edges.len() > self.size.max_edges() {
            return None;
        }
        Graph::new(false, n, edges, self.kind.weight_kind()).ok()
    }

    /// Graph matching the kind's structural constraints, before query selection.
    fn graph(&mut self, want: Option<bool>) -> Option<Graph> {
        match self.kind.tool() {
            ToolName::CycleDetection if want == Some(false) => self.acyclic_graph(),
            ToolName::TopologicalSort => self.unique_dag(),
            ToolName::MaxTriangleSum => self.with_triangle(),
            _ => self.plain_graph(),
        }
    }

    fn pick<T: Copy>(&mut self, items: &[T]) -> Option<T> {
        items.choose(&mut self.rng).copied()
    }

    /// Query parameters for the graph, honoring the wanted answer class.
    fn params(&mut self, g: &Graph, want: Option<bool>) -> Option<Vec<NodeId>> {
        let n = g.node_count();
        match self.kind.tool() {
            t if t.is_bga() => Some(Vec::new()),
            ToolName::DegreeCount => Some(alloc::vec![self.rng.random_range(0..n)]),
            ToolName::NodeExistence => {
                let node = if want == Some(false) {
                    self.rng.random_range(n..2 * n)
                } else {
                    self.rng.random_range(0..n)
                };
                Some(alloc::vec![node])
            }
            ToolName::EdgeExistence => {
                if want == Some(false) {
                    let present: BTreeSet<(NodeId, NodeId)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
                    let absent: Vec<(NodeId, NodeId)> = (0..n)
                        .flat_map(|u| (0..n).map(move |v| (u, v)))
                        .filter(|&(u, v)| {
                            u != v && !present.contains(&(u, v)) && (g.directed() || !present.contains(&(v, u)))
                        })
                        .collect();
                    let (u, v) = self.pick(&absent)?;
                    Some(alloc::vec![u, v])
                } else {
                    let e = *g.edges().choose(&mut self.rng)?;
                    let flip = !g.directed() && self.rng.random_bool(0.5);
                    Some(if flip {
                        alloc::vec![e.v, e.u]
                    } else {
                        alloc::vec![e.u, e.v]
                    })
                }
            }
            ToolName::MaximumFlow | ToolName::PathExistence | ToolName::ShortestPath => {
                let reach: Vec<Vec<bool>> = (0..n).map(|u| reachable_from(g, u)).collect();
                let wanted_reachable = match self.kind.tool() {
                    ToolName::PathExistence => want.unwrap_or(true),
                    _ => true,
                };
                let pairs: Vec<(NodeId, NodeId)> = (0..n)
                    .flat_map(|u| (0..n).map(move |v| (u, v)))
                    .filter(|&(u, v)| u != v && reach[u as usize][v as usize] == wanted_reachable)
                    .collect();
                let (u, v) = match self.pick(&pairs) {
                    Some(p) => p,
                    // a flow query may fall back to any pair (flow 0)
                    None if self.kind.tool() == ToolName::MaximumFlow => {
                        let u = self.rng.random_range(0..n);
                        let v = (u + self.rng.random_range(1..n)) % n;
                        (u, v)
                    }
                    None => return None,
                };
                Some(alloc::vec![u, v])
            }
            _ => unreachable!("all tools covered"),
        }
    }
}

/// A random graph for the kind and size class, without query-specific constraints.
pub fn generate_graph(
    kind: TaskKind,
    size: SizeClass,
    config: &GenConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GenError> {
    let mut sampler = Sampler {
        rng: ChaCha8Rng::seed_from_u64(rng.random()),
        config,
        kind,
        size,
    };
    for _ in 0..config.max_retries {
        if let Some(g) = sampler.graph(None) {
            return Ok(g);
        }
    }
    Err(GenError::ExhaustedRetries {
        kind,
        size,
        index: 0,
        retries: config.max_retries,
    })
}

/// Answer class an instance must have so that boolean kinds come out balanced:
/// even indices are `true`, odd indices `false`.
pub fn wanted_answer(kind: TaskKind, index: usize) -> Option<bool> {
    kind.tool().returns_bool().then_some(index % 2 == 0)
}

/// Generates instance `index` of `kind`/`size`, retrying until every constraint holds.
pub fn generate_instance(
    kind: TaskKind,
    size: SizeClass,
    index: usize,
    config: &GenConfig,
) -> Result<TaskInstance, GenError> {
    let mut sampler = Sampler {
        rng: ChaCha8Rng::seed_from_u64(derive_seed(config.seed, kind, size, index)),
        config,
        kind,
        size,
    };
    let want = wanted_answer(kind, index);
    let id = instance_id(kind, size, index);
    let variant = (index % DESCRIPTION_VARIANTS as usize) as u8;

    for _ in 0..config.max_retries {
        let Some(graph) = sampler.graph(want) else { continue };
        let Some(params) = sampler.params(&graph, want) else {
            continue;
        };
        let Ok(answer) = dispatch(kind.tool(), &graph, &params) else {
            continue;
        };
        if let Some(w) = want {
            if answer != Answer::Bool(w) {
                continue;
            }
        }
        if kind.tool() == ToolName::TopologicalSort && !has_unique_topological_order(&graph) {
            continue;
        }
        let graph_file = (size == SizeClass::EL).then(|| {
            format!(
                "{}/{}.{}",
                config.graph_dir.trim_end_matches('/'),
                id,
                GRAPH_FILE_EXTENSION
            )
        });
        let mut instance = TaskInstance {
            id: id.clone(),
            kind,
            graph: graph.clone(),
            params: params.clone(),
            description_variant: variant,
            size_class: size,
            task_text: String::new(),
            graph_file,
            gold_graph: graph,
            gold_tool: kind.tool(),
            gold_params: params,
            gold_answer: answer,
        };
        instance.task_text = render_task_text(&instance);
        if size == SizeClass::WL && classify_size(&instance.task_text, config.token_budget) != SizeClass::WL {
            continue;
        }
        return Ok(instance);
    }
    Err(GenError::ExhaustedRetries {
        kind,
        size,
        index,
        retries: config.max_retries,
    })
}

/// Every (kind, size, index) slot of the corpus, in output order.
pub fn corpus_slots(config: &GenConfig) -> impl Iterator<Item = (TaskKind, SizeClass, usize)> + '_ {
    config.kinds.iter().flat_map(move |&kind| {
        config
            .sizes
            .iter()
            .flat_map(move |&size| (0..config.count_per_kind).map(move |i| (kind, size, i)))
    })
}

/// Deterministic stream of instances: kind-major, then size class, then index.
pub fn generate_corpus(config: &GenConfig) -> impl Iterator<Item = Result<TaskInstance, GenError>> + '_ {
    let valid = config.validate();
    let slots = valid.is_ok().then(|| corpus_slots(config)).into_iter().flatten();
    valid
        .err()
        .map(Err)
        .into_iter()
        .chain(slots.map(move |(kind, size, i)| generate_instance(kind, size, i, config)))
}
