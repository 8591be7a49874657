//! Worker pool plumbing: parallel generation, pipeline runs and quota filling.

use std::collections::BTreeMap;
use std::path::Path;

use graphtool_core::backend::{CompletionConfig, LlmBackend};
use graphtool_core::dataset::matching_function;
use graphtool_core::generator::{corpus_slots, generate_instance, GenConfig, GenError};
use graphtool_core::pipeline::{run_pipeline, PipelineEnv, PipelineTrace};
use graphtool_core::registry::ToolRegistry;
use graphtool_core::task::{SizeClass, TaskInstance, TaskKind};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::io::{write_el_graph_file, write_jsonl, IoError};

pub const CORPUS_FILE: &str = "corpus.jsonl";
const MAX_BATCH: usize = 4096;

pub fn pool(workers: usize) -> ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
}

/// Generates the corpus on `workers` threads; output order matches the
/// sequential generator.
pub fn generate_parallel(config: &GenConfig, workers: usize) -> Result<Vec<TaskInstance>, GenError> {
    config.validate()?;
    let slots: Vec<(TaskKind, SizeClass, usize)> = corpus_slots(config).collect();
    pool(workers).install(|| {
        slots
            .par_iter()
            .map(|&(kind, size, i)| generate_instance(kind, size, i, config))
            .collect()
    })
}

/// Writes `corpus.jsonl` and one graph file per EL instance under `dir`.
pub fn write_corpus(dir: &Path, corpus: &[TaskInstance]) -> Result<(), IoError> {
    write_graph_files(dir, corpus)?;
    write_jsonl(&dir.join(CORPUS_FILE), corpus)
}

pub fn write_graph_files(dir: &Path, corpus: &[TaskInstance]) -> Result<(), IoError> {
    corpus
        .par_iter()
        .filter_map(|inst| inst.graph_file.as_ref().map(|f| (f, &inst.graph)))
        .try_for_each(|(file, graph)| write_el_graph_file(&dir.join(file), graph))
}

/// Runs the pipeline for every instance; traces come back in corpus order.
pub fn run_corpus(
    corpus: &[TaskInstance],
    backend: &dyn LlmBackend,
    registry: &ToolRegistry,
    config: &CompletionConfig,
    env: &dyn PipelineEnv,
    workers: usize,
) -> Vec<PipelineTrace> {
    pool(workers).install(|| {
        corpus
            .par_iter()
            .map(|inst| run_pipeline(inst, backend, registry, config, env))
            .collect()
    })
}

fn index_of(id: &str) -> Option<usize> {
    id.rsplit('-').next()?.parse().ok()
}

/// Outcome of topping up under-filled (kind, size) buckets.
#[derive(Debug, Default)]
pub struct QuotaFill {
    pub instances: Vec<TaskInstance>,
    pub traces: Vec<PipelineTrace>,
    /// Buckets still short after the last round, with their remaining deficit.
    pub short: Vec<(TaskKind, SizeClass, usize)>,
}

/// Generates fresh instances (next unused indices) for every bucket whose
/// retained count falls short of its original size, and keeps those that pass
/// the matching function. Batches double every round; a bucket is given up
/// after `max_rounds` rounds.
pub fn fill_quota(
    corpus: &[TaskInstance],
    traces: &[PipelineTrace],
    config: &GenConfig,
    max_rounds: usize,
    mut run_batch: impl FnMut(&[TaskInstance]) -> Result<Vec<PipelineTrace>, IoError>,
) -> Result<QuotaFill, IoError> {
    let by_id: BTreeMap<&str, &PipelineTrace> = traces.iter().map(|t| (t.instance_id.as_str(), t)).collect();
    let mut buckets: BTreeMap<(SizeClass, usize), (TaskKind, usize, usize, usize)> = BTreeMap::new();
    for inst in corpus {
        let entry = buckets
            .entry((inst.size_class, inst.kind.ordinal()))
            .or_insert((inst.kind, 0, 0, 0));
        entry.1 += 1;
        if by_id.get(inst.id.as_str()).is_some_and(|t| matching_function(t, inst)) {
            entry.2 += 1;
        }
        entry.3 = entry.3.max(index_of(&inst.id).map_or(0, |i| i + 1));
    }

    let mut fill = QuotaFill::default();
    for ((size, _), (kind, target, mut retained, mut next)) in buckets {
        for round in 0..max_rounds {
            if retained >= target {
                break;
            }
            let want = target - retained;
            let size_hint = (want << round.min(10)).min(MAX_BATCH);
            let batch: Result<Vec<TaskInstance>, GenError> = (next..next + size_hint)
                .map(|i| generate_instance(kind, size, i, config))
                .collect();
            next += size_hint;
            let Ok(batch) = batch else { continue };
            let batch_traces = run_batch(&batch)?;
            for (inst, trace) in batch.into_iter().zip(batch_traces) {
                if retained < target && matching_function(&trace, &inst) {
                    retained += 1;
                    fill.instances.push(inst);
                    fill.traces.push(trace);
                }
            }
        }
        if retained < target {
            fill.short.push((kind, size, target - retained));
        }
    }
    Ok(fill)
}
