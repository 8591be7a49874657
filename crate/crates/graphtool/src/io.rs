//! Graph files, JSON-lines corpora and traces, and the Alpaca export. Every
//! write goes to a temporary file in the target directory and is renamed
//! into place, so failed runs never leave partial outputs.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use graphtool_core::codec::{format_el_graph, parse_el_graph, ElFormatError};
use graphtool_core::dataset::{AlpacaRecord, DatasetEntry};
use graphtool_core::graph::Graph;
use graphtool_core::pipeline::PipelineEnv;
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Malformed {
        path: PathBuf,
        #[source]
        source: ElFormatError,
    },
    #[error("{path}:{line}: {message}")]
    Json {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `bytes` to `path` atomically, creating parent directories.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| IoError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

pub fn read_el_graph_file(path: &Path) -> Result<Graph, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_el_graph(&text).map_err(|source| IoError::Malformed {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_el_graph_file(path: &Path, graph: &Graph) -> Result<(), IoError> {
    atomic_write(path, format_el_graph(graph).as_bytes())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| IoError::Json {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(item);
    }
    Ok(out)
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> Vec<u8> {
    let mut buf = Vec::new();
    for item in items {
        serde_json::to_writer(&mut buf, item).expect("in-memory serialization");
        buf.push(b'\n');
    }
    buf
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), IoError> {
    atomic_write(path, &to_jsonl(items))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).expect("in-memory serialization");
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| IoError::Json {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

/// Exports `{instruction, input, output}` records as one JSON array.
pub fn export_alpaca(entries: &[DatasetEntry], path: &Path) -> Result<(), IoError> {
    let records: Vec<AlpacaRecord> = entries.iter().map(AlpacaRecord::from).collect();
    write_json(path, &records)
}

/// Pipeline environment that resolves relative graph paths against `base`.
#[derive(Debug, Clone)]
pub struct FsEnv {
    base: PathBuf,
    epoch: Instant,
}

impl FsEnv {
    pub fn new(base: impl Into<PathBuf>) -> Self {
        Self {
            base: base.into(),
            epoch: Instant::now(),
        }
    }

    /// Graph paths in a corpus are relative to the corpus file's directory.
    pub fn for_corpus(corpus_path: &Path) -> Self {
        Self::new(corpus_path.parent().map(Path::to_path_buf).unwrap_or_default())
    }

    pub fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }
}

impl PipelineEnv for FsEnv {
    fn load_graph(&self, path: &str) -> Result<Graph, String> {
        read_el_graph_file(&self.resolve(path)).map_err(|e| e.to_string())
    }

    fn now_ms(&self) -> u64 {
        self.epoch.elapsed().as_millis() as u64
    }
}
