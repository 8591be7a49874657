#![allow(dead_code)]

use std::collections::BTreeMap;

use graphtool_core::backend::CompletionConfig;
use graphtool_core::codec::{format_el_graph, parse_el_graph};
use graphtool_core::generator::{generate_instance, GenConfig};
use graphtool_core::graph::Graph;
use graphtool_core::pipeline::PipelineEnv;
use graphtool_core::task::{SizeClass, TaskInstance, TaskKind};

/// Graph files kept in memory, written through the real file format.
pub struct MemFiles(pub BTreeMap<String, String>);

impl MemFiles {
    pub fn for_corpus(corpus: &[TaskInstance]) -> Self {
        Self(
            corpus
                .iter()
                .filter_map(|i| Some((i.graph_file.clone()?, format_el_graph(&i.graph))))
                .collect(),
        )
    }
}

impl PipelineEnv for MemFiles {
    fn load_graph(&self, path: &str) -> Result<Graph, String> {
        let text = self.0.get(path).ok_or_else(|| format!("no such file `{path}`"))?;
        parse_el_graph(text).map_err(|e| e.to_string())
    }
}

pub fn corpus(per_kind: usize, sizes: &[SizeClass], seed: u64) -> Vec<TaskInstance> {
    let config = GenConfig {
        seed,
        ..GenConfig::default()
    };
    let mut out = Vec::new();
    for kind in TaskKind::all() {
        for &size in sizes {
            for i in 0..per_kind {
                out.push(generate_instance(kind, size, i, &config).expect("generation"));
            }
        }
    }
    out
}

pub fn config() -> CompletionConfig {
    CompletionConfig::default()
}
