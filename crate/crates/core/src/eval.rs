//! Answer, graph, name and parameter accuracy plus the five-way error taxonomy.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::graphs_equal;
use crate::pipeline::{PipelineTrace, ToolOutcome};
use crate::task::{SizeClass, TaskInstance, TaskKind};
use crate::tools::ToolName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Correct,
    SyntaxError,
    GraphMismatch,
    NameMismatch,
    ParaMismatch,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Correct,
        Category::SyntaxError,
        Category::GraphMismatch,
        Category::NameMismatch,
        Category::ParaMismatch,
    ];

    /// Lower wins when several checks fail.
    pub fn priority(self) -> u8 {
        match self {
            Category::SyntaxError => 0,
            Category::GraphMismatch => 1,
            Category::NameMismatch => 2,
            Category::ParaMismatch => 3,
            Category::Correct => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Category::Correct => "Correct",
            Category::SyntaxError => "Syntax Error",
            Category::GraphMismatch => "Graph Mismatch",
            Category::NameMismatch => "Name Mismatch",
            Category::ParaMismatch => "Para Mismatch",
        }
    }
}

/// Per-label comparison of one trace against its instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelChecks {
    pub graph_match: bool,
    pub name_match: bool,
    pub param_match: Option<bool>,
    pub answer_match: bool,
    /// Some stage failed to parse or no template could be retrieved.
    pub syntax_error: bool,
}

pub fn label_checks(trace: &PipelineTrace, instance: &TaskInstance) -> LabelChecks {
    let graph_match = trace
        .extracted_graph()
        .is_some_and(|g| graphs_equal(g, &instance.gold_graph));
    let name_match = trace
        .extracted_name()
        .and_then(|n| n.parse::<ToolName>().ok())
        .is_some_and(|t| t == instance.gold_tool);
    let param_match = (!instance.kind.is_bga()).then(|| trace.extracted_params() == Some(&instance.gold_params[..]));
    let answer_match = trace.tool_result.answer() == Some(&instance.gold_answer);
    let syntax_error =
        trace.stages.iter().any(|s| s.parsed.is_failure()) || matches!(trace.tool_result, ToolOutcome::NotRun { .. });
    LabelChecks {
        graph_match,
        name_match,
        param_match,
        answer_match,
        syntax_error,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub instance_id: String,
    pub graph_match: bool,
    pub name_match: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param_match: Option<bool>,
    pub answer_match: bool,
    pub category: Category,
    /// Every failing check, not just the one that decided `category`.
    #[serde(default)]
    pub failed_checks: Vec<Category>,
}

/// Scores a trace. Parse failures come first, then graph, name and parameter
/// mismatches; a dispatch error or wrong answer with all labels matching is a
/// syntax error. Mismatches win over the dispatch errors they cause.
pub fn score_trace(trace: &PipelineTrace, instance: &TaskInstance) -> EvalRecord {
    let c = label_checks(trace, instance);
    let graph_parsed = trace.extracted_graph().is_some();
    let name_parsed = trace.extracted_name().is_some();
    let params_parsed = trace.extracted_params().is_some();

    let mut failed_checks = Vec::new();
    if c.syntax_error {
        failed_checks.push(Category::SyntaxError);
    }
    if graph_parsed && !c.graph_match {
        failed_checks.push(Category::GraphMismatch);
    }
    if name_parsed && !c.name_match {
        failed_checks.push(Category::NameMismatch);
    }
    if params_parsed && c.param_match == Some(false) {
        failed_checks.push(Category::ParaMismatch);
    }

    let category = if c.syntax_error {
        Category::SyntaxError
    } else if !c.graph_match {
        Category::GraphMismatch
    } else if !c.name_match {
        Category::NameMismatch
    } else if c.param_match == Some(false) {
        Category::ParaMismatch
    } else if !c.answer_match {
        Category::SyntaxError
    } else {
        Category::Correct
    };
    if category == Category::SyntaxError && failed_checks.is_empty() {
        failed_checks.push(Category::SyntaxError);
    }

    EvalRecord {
        instance_id: trace.instance_id.clone(),
        graph_match: c.graph_match,
        name_match: c.name_match,
        param_match: c.param_match,
        answer_match: c.answer_match,
        category,
        failed_checks,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub correct: usize,
    pub syntax_error: usize,
    pub graph_mismatch: usize,
    pub name_mismatch: usize,
    pub para_mismatch: usize,
}

impl CategoryCounts {
    pub fn get(&self, c: Category) -> usize {
        match c {
            Category::Correct => self.correct,
            Category::SyntaxError => self.syntax_error,
            Category::GraphMismatch => self.graph_mismatch,
            Category::NameMismatch => self.name_mismatch,
            Category::ParaMismatch => self.para_mismatch,
        }
    }

    pub fn add(&mut self, c: Category) {
        let slot = match c {
            Category::Correct => &mut self.correct,
            Category::SyntaxError => &mut self.syntax_error,
            Category::GraphMismatch => &mut self.graph_mismatch,
            Category::NameMismatch => &mut self.name_mismatch,
            Category::ParaMismatch => &mut self.para_mismatch,
        };
        *slot += 1;
    }

    pub fn merge(&mut self, other: &CategoryCounts) {
        for c in Category::ALL {
            for _ in 0..other.get(c) {
                self.add(c);
            }
        }
    }

    pub fn total(&self) -> usize {
        Category::ALL.iter().map(|&c| self.get(c)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub kind: TaskKind,
    pub task: String,
    pub graph_type: String,
    pub size_class: SizeClass,
    pub instances: usize,
    pub answer_accuracy: f64,
    pub graph_accuracy: f64,
    pub name_accuracy: f64,
    /// `None` for BGA kinds, which take no parameters.
    pub parameter_accuracy: Option<f64>,
    pub categories: CategoryCounts,
    /// How often each check failed, counting every failure of multi-fault traces.
    pub failing_checks: CategoryCounts,
    pub multi_failure: usize,
}

/// Unweighted mean over the kinds of one size class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallRow {
    pub size_class: SizeClass,
    pub kinds: usize,
    pub instances: usize,
    pub answer_accuracy: f64,
    pub graph_accuracy: f64,
    pub name_accuracy: f64,
    pub parameter_accuracy: Option<f64>,
    pub categories: CategoryCounts,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub overall: Vec<OverallRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no evaluation records")]
    EmptyInput,
    #[error("record for unknown instance `{0}`")]
    UnknownInstance(String),
}

fn pct(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * hits as f64 / total as f64
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

#[derive(Default)]
struct Tally {
    instances: usize,
    answer: usize,
    graph: usize,
    name: usize,
    param: usize,
    categories: CategoryCounts,
    failing: CategoryCounts,
    multi: usize,
}

/// Per-(kind, size class) accuracies in percent, plus one overall row per size class.
pub fn aggregate(records: &[EvalRecord], corpus: &[TaskInstance]) -> Result<Report, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let by_id: BTreeMap<&str, &TaskInstance> = corpus.iter().map(|i| (i.id.as_str(), i)).collect();
    let mut tallies: BTreeMap<(SizeClass, usize), (TaskKind, Tally)> = BTreeMap::new();
    for r in records {
        let inst = by_id
            .get(r.instance_id.as_str())
            .ok_or_else(|| EvalError::UnknownInstance(r.instance_id.clone()))?;
        let (_, t) = tallies
            .entry((inst.size_class, inst.kind.ordinal()))
            .or_insert_with(|| (inst.kind, Tally::default()));
        t.instances += 1;
        t.answer += r.answer_match as usize;
        t.graph += r.graph_match as usize;
        t.name += r.name_match as usize;
        t.param += (r.param_match == Some(true)) as usize;
        t.categories.add(r.category);
        for &c in &r.failed_checks {
            t.failing.add(c);
        }
        t.multi += (r.failed_checks.len() > 1) as usize;
    }

    let rows: Vec<ReportRow> = tallies
        .into_iter()
        .map(|((size_class, _), (kind, t))| ReportRow {
            kind,
            task: kind.tool().as_str().to_string(),
            graph_type: kind.graph_type().to_string(),
            size_class,
            instances: t.instances,
            answer_accuracy: pct(t.answer, t.instances),
            graph_accuracy: pct(t.graph, t.instances),
            name_accuracy: pct(t.name, t.instances),
            parameter_accuracy: (!kind.is_bga()).then(|| pct(t.param, t.instances)),
            categories: t.categories,
            failing_checks: t.failing,
            multi_failure: t.multi,
        })
        .collect();

    let mut overall = Vec::new();
    for size in [SizeClass::WL, SizeClass::EL] {
        let group: Vec<&ReportRow> = rows.iter().filter(|r| r.size_class == size).collect();
        if group.is_empty() {
            continue;
        }
        let mut categories = CategoryCounts::default();
        for r in &group {
            categories.merge(&r.categories);
        }
        overall.push(OverallRow {
            size_class: size,
            kinds: group.len(),
            instances: group.iter().map(|r| r.instances).sum(),
            answer_accuracy: mean(group.iter().map(|r| r.answer_accuracy)).unwrap_or(0.0),
            graph_accuracy: mean(group.iter().map(|r| r.graph_accuracy)).unwrap_or(0.0),
            name_accuracy: mean(group.iter().map(|r| r.name_accuracy)).unwrap_or(0.0),
            parameter_accuracy: mean(group.iter().filter_map(|r| r.parameter_accuracy)),
            categories,
        });
    }
    Ok(Report { rows, overall })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Markdown,
}

const HEADERS: [&str; 13] = [
    "Task",
    "Graph",
    "Size",
    "N",
    "Answer",
    "Graph Acc",
    "Name Acc",
    "Param Acc",
    "Correct",
    "Syntax",
    "Graph Mis",
    "Name Mis",
    "Para Mis",
];

fn fmt_pct(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.1}"),
        None => "n/a".into(),
    }
}

fn histogram_cells(c: &CategoryCounts) -> [String; 5] {
    Category::ALL.map(|cat| c.get(cat).to_string())
}

fn table_rows(report: &Report) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for r in &report.rows {
        let mut row = alloc::vec![
            r.task.clone(),
            r.graph_type.clone(),
            r.size_class.to_string(),
            r.instances.to_string(),
            fmt_pct(Some(r.answer_accuracy)),
            fmt_pct(Some(r.graph_accuracy)),
            fmt_pct(Some(r.name_accuracy)),
            fmt_pct(r.parameter_accuracy),
        ];
        row.extend(histogram_cells(&r.categories));
        out.push(row);
    }
    for o in &report.overall {
        let mut row = alloc::vec![
            "Overall".into(),
            "-".into(),
            o.size_class.to_string(),
            o.instances.to_string(),
            fmt_pct(Some(o.answer_accuracy)),
            fmt_pct(Some(o.graph_accuracy)),
            fmt_pct(Some(o.name_accuracy)),
            fmt_pct(o.parameter_accuracy),
        ];
        row.extend(histogram_cells(&o.categories));
        out.push(row);
    }
    out
}

fn failing_section(report: &Report) -> Vec<(String, CategoryCounts, usize)> {
    report
        .rows
        .iter()
        .filter(|r| r.failing_checks.total() > 0)
        .map(|r| {
            (
                format!("{} {} {}", r.task, r.graph_type, r.size_class),
                r.failing_checks,
                r.multi_failure,
            )
        })
        .collect()
}

/// Plain-text or markdown table with percentages to one decimal.
pub fn render_report(report: &Report, format: ReportFormat) -> String {
    let rows = table_rows(report);
    let mut out = String::new();
    match format {
        ReportFormat::Markdown => {
            let _ = writeln!(out, "| {} |", HEADERS.join(" | "));
            let _ = writeln!(out, "|{}", HEADERS.map(|_| "---|").concat());
            for row in &rows {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
            if rows.is_empty() {
                let _ = writeln!(out, "\nNo records.");
            }
            let failing = failing_section(report);
            if !failing.is_empty() {
                let _ = writeln!(out, "\nFailing checks (all failures per trace):\n");
                let _ = writeln!(out, "| Task | Syntax | Graph Mis | Name Mis | Para Mis | Multi |");
                let _ = writeln!(out, "|---|---|---|---|---|---|");
                for (name, c, multi) in failing {
                    let _ = writeln!(
                        out,
                        "| {name} | {} | {} | {} | {} | {multi} |",
                        c.syntax_error, c.graph_mismatch, c.name_mismatch, c.para_mismatch
                    );
                }
            }
        }
        ReportFormat::Text => {
            let mut widths: Vec<usize> = HEADERS.iter().map(|h| h.len()).collect();
            for row in &rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let line = |cells: &[String]| -> String {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .enumerate()
                    .map(|(i, (c, &w))| if i < 3 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                    .collect();
                padded.join("  ").trim_end().to_string()
            };
            let header: Vec<String> = HEADERS.iter().map(|h| h.to_string()).collect();
            let _ = writeln!(out, "{}", line(&header));
            let _ = writeln!(
                out,
                "{}",
                "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1))
            );
            for row in &rows {
                let _ = writeln!(out, "{}", line(row));
            }
            if rows.is_empty() {
                let _ = writeln!(out, "no records");
            }
            let failing = failing_section(report);
            if !failing.is_empty() {
                let _ = writeln!(out, "\nFailing checks (all failures per trace):");
                for (name, c, multi) in failing {
                    let _ = writeln!(
                        out,
                        "  {name}: syntax {}, graph {}, name {}, para {}, multi-failure traces {multi}",
                        c.syntax_error, c.graph_mismatch, c.name_mismatch, c.para_mismatch
                    );
                }
            }
        }
    }
    out
}
