use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::oracle::format_parameters;
use super::{BackendError, CompletionConfig, LlmBackend, OracleBackend};
use crate::codec::render_edges;
use crate::eval::Category;
use crate::graph::{graphs_equal, Edge};
use crate::pipeline::StageKind;
use crate::task::{SizeClass, TaskInstance};
use crate::tools::ToolName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultMode {
    DropGraphEdges,
    WrongToolName,
    SwapParameters,
    EmitGarbage,
}

impl FaultMode {
    pub const ALL: [FaultMode; 4] = [
        FaultMode::DropGraphEdges,
        FaultMode::WrongToolName,
        FaultMode::SwapParameters,
        FaultMode::EmitGarbage,
    ];

    /// The stage this mode corrupts; `None` for garbage, which fits any stage.
    pub fn home_stage(self) -> Option<StageKind> {
        match self {
            FaultMode::DropGraphEdges => Some(StageKind::GraphExtraction),
            FaultMode::WrongToolName => Some(StageKind::ToolNameIdentification),
            FaultMode::SwapParameters => Some(StageKind::ToolParameterExtraction),
            FaultMode::EmitGarbage => None,
        }
    }

    pub fn category(self) -> Category {
        match self {
            FaultMode::DropGraphEdges => Category::GraphMismatch,
            FaultMode::WrongToolName => Category::NameMismatch,
            FaultMode::SwapParameters => Category::ParaMismatch,
            FaultMode::EmitGarbage => Category::SyntaxError,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FaultPlanError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("probabilities for stage {0:?} sum to more than 1")]
    Overfull(StageKind),
    #[error("{mode:?} cannot corrupt stage {stage:?}")]
    Inapplicable { mode: FaultMode, stage: StageKind },
}

/// Per-stage corruption modes with their probabilities. One uniform draw per
/// (instance, stage) picks at most one mode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FaultPlan {
    pub graph: Vec<(FaultMode, f64)>,
    pub name: Vec<(FaultMode, f64)>,
    pub params: Vec<(FaultMode, f64)>,
}

impl FaultPlan {
    pub fn none() -> Self {
        Self::default()
    }

    /// `mode` with probability `p` on its own stage; garbage goes on every stage.
    pub fn only(mode: FaultMode, p: f64) -> Self {
        let mut plan = Self::default();
        match mode.home_stage() {
            Some(stage) => plan.stage_mut(stage).push((mode, p)),
            None => {
                for stage in StageKind::ALL {
                    plan.stage_mut(stage).push((mode, p));
                }
            }
        }
        plan
    }

    pub fn single(stage: StageKind, mode: FaultMode, p: f64) -> Self {
        let mut plan = Self::default();
        plan.stage_mut(stage).push((mode, p));
        plan
    }

    /// Every stage corrupted with probability `q`, split evenly between the
    /// stage's own mode and garbage.
    pub fn uniform(q: f64) -> Self {
        let mut plan = Self::default();
        for stage in StageKind::ALL {
            let own = FaultMode::ALL
                .into_iter()
                .find(|m| m.home_stage() == Some(stage))
                .expect("every stage has a mode");
            plan.stage_mut(stage)
                .extend([(own, q / 2.0), (FaultMode::EmitGarbage, q / 2.0)]);
        }
        plan
    }

    pub fn stage(&self, stage: StageKind) -> &[(FaultMode, f64)] {
        match stage {
            StageKind::GraphExtraction => &self.graph,
            StageKind::ToolNameIdentification => &self.name,
            StageKind::ToolParameterExtraction => &self.params,
        }
    }

    fn stage_mut(&mut self, stage: StageKind) -> &mut Vec<(FaultMode, f64)> {
        match stage {
            StageKind::GraphExtraction => &mut self.graph,
            StageKind::ToolNameIdentification => &mut self.name,
            StageKind::ToolParameterExtraction => &mut self.params,
        }
    }

    /// Probability that a stage survives uncorrupted.
    pub fn survival(&self, stage: StageKind) -> f64 {
        1.0 - self.stage(stage).iter().map(|(_, p)| p).sum::<f64>()
    }

    pub fn validate(&self) -> Result<(), FaultPlanError> {
        for stage in StageKind::ALL {
            let mut total = 0.0;
            for &(mode, p) in self.stage(stage) {
                if !(0.0..=1.0).contains(&p) {
                    return Err(FaultPlanError::Probability(p));
                }
                if mode.home_stage().is_some_and(|s| s != stage) {
                    return Err(FaultPlanError::Inapplicable { mode, stage });
                }
                total += p;
            }
            if total > 1.0 + 1e-9 {
                return Err(FaultPlanError::Overfull(stage));
            }
        }
        Ok(())
    }
}

/// Ground-truth corruption label, kept out of the completion text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectedFault {
    pub instance_id: String,
    pub stage: StageKind,
    pub mode: FaultMode,
    /// Category the corrupted output must produce on its own.
    pub expected: Category,
}

/// Category a trace carrying exactly these faults must receive.
pub fn expected_category(faults: &[InjectedFault]) -> Category {
    faults
        .iter()
        .map(|f| f.expected)
        .min_by_key(|c| c.priority())
        .unwrap_or(Category::Correct)
}

const GARBAGE: [&str; 5] = [
    "I am not sure how to approach this question.",
    "Let me think about it step by step before answering.",
    "The answer depends on the structure of the graph, which is unclear to me.",
    "Sorry, I cannot determine that from the information given.",
    "This looks like a graph problem; more context would help.",
];

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Oracle whose outputs are corrupted per a [`FaultPlan`]. Randomness comes
/// from (seed, instance id, stage) only, so results do not depend on call order.
#[derive(Debug, Clone)]
pub struct FaultBackend {
    oracle: OracleBackend,
    plan: FaultPlan,
    seed: u64,
}

impl FaultBackend {
    pub fn new(oracle: OracleBackend, plan: FaultPlan, seed: u64) -> Result<Self, FaultPlanError> {
        plan.validate()?;
        Ok(Self { oracle, plan, seed })
    }

    pub fn oracle(&self) -> &OracleBackend {
        &self.oracle
    }

    pub fn plan(&self) -> &FaultPlan {
        &self.plan
    }

    fn rng(&self, id: &str, stage: StageKind) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.seed.to_le_bytes());
        seed[8..16].copy_from_slice(&fnv1a(id).to_le_bytes());
        seed[16] = stage.ordinal();
        ChaCha8Rng::from_seed(seed)
    }

    fn draw(&self, rng: &mut ChaCha8Rng, stage: StageKind) -> Option<FaultMode> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for &(mode, p) in self.plan.stage(stage) {
            acc += p;
            if u < acc {
                return Some(mode);
            }
        }
        None
    }

    /// Other EL instances of the same kind whose graph differs.
    fn alternative_files<'a>(&'a self, instance: &'a TaskInstance) -> Vec<&'a TaskInstance> {
        self.oracle
            .instances()
            .filter(|o| {
                o.size_class == SizeClass::EL
                    && o.kind == instance.kind
                    && o.id != instance.id
                    && o.graph_file.is_some()
                    && o.graph_file != instance.graph_file
                    && !graphs_equal(&o.gold_graph, &instance.gold_graph)
            })
            .collect()
    }

    /// Faults the pipeline will actually see for one instance, with the
    /// category each one yields on its own.
    pub fn injected_faults(&self, id: &str) -> Vec<InjectedFault> {
        let Some(instance) = self.oracle.instance(id) else {
            return Vec::new();
        };
        let mut faults = Vec::new();
        let mut name_garbled = false;
        for stage in StageKind::ALL {
            if stage == StageKind::ToolParameterExtraction && (instance.kind.is_bga() || name_garbled) {
                continue;
            }
            let Some(mode) = self.draw(&mut self.rng(id, stage), stage) else {
                continue;
            };
            if stage == StageKind::ToolNameIdentification && mode == FaultMode::EmitGarbage {
                name_garbled = true;
            }
            let expected = match mode {
                FaultMode::DropGraphEdges
                    if instance.size_class == SizeClass::EL && self.alternative_files(instance).is_empty() =>
                {
                    Category::SyntaxError
                }
                m => m.category(),
            };
            faults.push(InjectedFault {
                instance_id: id.to_string(),
                stage,
                mode,
                expected,
            });
        }
        faults
    }

    fn corrupt(&self, mode: FaultMode, instance: &TaskInstance, prompt: &str, rng: &mut ChaCha8Rng) -> String {
        match mode {
            FaultMode::EmitGarbage => GARBAGE.choose(rng).expect("non-empty").to_string(),
            FaultMode::DropGraphEdges => self.drop_edges(instance, rng),
            FaultMode::WrongToolName => {
                let gold = instance.gold_tool;
                let pool: Vec<ToolName> = ToolName::ALL
                    .into_iter()
                    .filter(|t| *t != gold && t.arity() == gold.arity())
                    .collect();
                let pick = pool.choose(rng).copied().expect("every arity has at least two tools");
                format!("API_name: {pick}")
            }
            FaultMode::SwapParameters => {
                let mut pairs = self.oracle.gold_parameters(instance, prompt);
                let before: Vec<u32> = pairs.iter().map(|(_, v)| *v).collect();
                let mut values = before.clone();
                values.reverse();
                if values == before {
                    if let Some(v) = values.first_mut() {
                        *v += 1;
                    }
                }
                for (pair, v) in pairs.iter_mut().zip(values) {
                    pair.1 = v;
                }
                format_parameters(&pairs)
            }
        }
    }

    fn drop_edges(&self, instance: &TaskInstance, rng: &mut ChaCha8Rng) -> String {
        if instance.size_class == SizeClass::EL {
            let pool = self.alternative_files(instance);
            return match pool.choose(rng).and_then(|o| o.graph_file.as_deref()) {
                Some(path) => format!("Path: {path}"),
                None => "Path: the file could not be identified".into(),
            };
        }
        let g = &instance.gold_graph;
        let edges: Vec<Edge> = if g.edges().len() >= 2 {
            let len = g.edges().len();
            let drop = rng.random_range(1..len);
            let mut idx: Vec<usize> = (0..len).collect();
            idx.shuffle(rng);
            let mut keep: Vec<usize> = idx[drop..].to_vec();
            keep.sort_unstable();
            keep.into_iter().map(|i| g.edges()[i]).collect()
        } else {
            g.edges()
                .iter()
                .map(|e| Edge {
                    u: e.u,
                    v: g.node_count().max(e.v + 1),
                    weight: e.weight,
                })
                .collect()
        };
        format!("Graph: [{}]", render_edges(&edges, g.weight_kind()))
    }
}

impl LlmBackend for FaultBackend {
    fn complete(&self, prompt: &str, config: &CompletionConfig) -> Result<String, BackendError> {
        let (instance, stage) = self.oracle.locate(prompt)?;
        let mut rng = self.rng(&instance.id, stage);
        match self.draw(&mut rng, stage) {
            Some(mode) => Ok(self.corrupt(mode, instance, prompt, &mut rng)),
            None => self.oracle.complete(prompt, config),
        }
    }
}
