//! Matching function and instruction-tuning dataset construction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::label_checks;
use crate::pipeline::{PipelineTrace, StageKind};
use crate::task::{SizeClass, TaskInstance, TaskKind};

/// True iff every extracted label and the tool answer match the gold values.
pub fn matching_function(trace: &PipelineTrace, instance: &TaskInstance) -> bool {
    let c = label_checks(trace, instance);
    c.graph_match && c.name_match && c.param_match != Some(false) && c.answer_match
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub instruction: String,
    pub input: String,
    pub output: String,
    pub stage: StageKind,
    pub instance_id: String,
}

/// The three keys of an exported record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlpacaRecord {
    pub instruction: String,
    pub input: String,
    pub output: String,
}

impl From<&DatasetEntry> for AlpacaRecord {
    fn from(e: &DatasetEntry) -> Self {
        Self {
            instruction: e.instruction.clone(),
            input: e.input.clone(),
            output: e.output.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindRetention {
    pub kind: TaskKind,
    pub size_class: SizeClass,
    pub traces: usize,
    pub retained: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RetentionStats {
    pub traces: usize,
    pub retained_instances: usize,
    pub entries: usize,
    pub retained_fraction: f64,
    pub per_kind: Vec<KindRetention>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub entries: Vec<DatasetEntry>,
    pub stats: RetentionStats,
}

impl Dataset {
    pub fn alpaca_records(&self) -> Vec<AlpacaRecord> {
        self.entries.iter().map(AlpacaRecord::from).collect()
    }

    pub fn instance_ids(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|e| e.instance_id.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("trace `{0}` has no instance in the corpus")]
    OrphanTrace(String),
    #[error("instance `{0}` has more than one trace")]
    DuplicateTrace(String),
}

/// Keeps every stage of each instance whose trace passes the matching function,
/// and drops the whole instance otherwise. Entries are ordered by instance id,
/// then stage.
pub fn build_dataset(traces: &[PipelineTrace], corpus: &[TaskInstance]) -> Result<Dataset, DatasetError> {
    let by_id: BTreeMap<&str, &TaskInstance> = corpus.iter().map(|i| (i.id.as_str(), i)).collect();
    let mut seen = BTreeSet::new();
    let mut per_kind: BTreeMap<(SizeClass, usize), KindRetention> = BTreeMap::new();
    let mut entries = Vec::new();
    let mut retained_instances = 0;

    for trace in traces {
        let instance = by_id
            .get(trace.instance_id.as_str())
            .ok_or_else(|| DatasetError::OrphanTrace(trace.instance_id.clone()))?;
        if !seen.insert(trace.instance_id.as_str()) {
            return Err(DatasetError::DuplicateTrace(trace.instance_id.clone()));
        }
        let slot = per_kind
            .entry((instance.size_class, instance.kind.ordinal()))
            .or_insert(KindRetention {
                kind: instance.kind,
                size_class: instance.size_class,
                traces: 0,
                retained: 0,
            });
        slot.traces += 1;
        if !matching_function(trace, instance) {
            continue;
        }
        slot.retained += 1;
        retained_instances += 1;
        entries.extend(trace.stages.iter().map(|s| DatasetEntry {
            instruction: s.instruction_text.clone(),
            input: instance.task_text.clone(),
            output: s.raw_output.clone(),
            stage: s.stage,
            instance_id: instance.id.clone(),
        }));
    }
    entries.sort_by(|a, b| (&a.instance_id, a.stage).cmp(&(&b.instance_id, b.stage)));

    let stats = RetentionStats {
        traces: traces.len(),
        retained_instances,
        entries: entries.len(),
        retained_fraction: if traces.is_empty() {
            0.0
        } else {
            retained_instances as f64 / traces.len() as f64
        },
        per_kind: per_kind.into_values().collect(),
    };
    Ok(Dataset { entries, stats })
}
