use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use graphtool_core::backend::{make_oracle_backend, FaultBackend, FaultPlan, InjectedFault, LlmBackend};
use graphtool_core::dataset::build_dataset;
use graphtool_core::eval::{aggregate, render_report, score_trace, Category, EvalRecord, Report, ReportFormat};
use graphtool_core::generator::GenConfig;
use graphtool_core::pipeline::PipelineTrace;
use graphtool_core::registry::ToolRegistry;
use graphtool_core::task::{SizeClass, TaskInstance, TaskKind};
use graphtool_core::tools::ToolName;
use log::info;
use serde::Serialize;

use crate::config::{
    resolve_backend, resolve_log_level, resolve_workers, BackendFlags, BackendKind, BackendSettings, Env, FaultModeArg,
    FileConfig, ProcessEnv,
};
use crate::http::HttpBackend;
use crate::io::{export_alpaca, read_json, read_jsonl, write_json, write_jsonl, FsEnv};
use crate::runner::{fill_quota, generate_parallel, run_corpus, write_corpus, write_graph_files, CORPUS_FILE};

const PRECEDENCE: &str = "\
Configuration sources, lowest to highest precedence: --config TOML file, environment \
variables (GRAPHTOOL_ENDPOINT, GRAPHTOOL_API_KEY, GRAPHTOOL_MODEL, GRAPHTOOL_BACKEND, \
GRAPHTOOL_WORKERS, GRAPHTOOL_LOG_LEVEL), command-line flags.";

#[derive(Debug, Parser)]
#[command(name = "graphtool", version, about = "Graph reasoning with staged tool instructions", after_help = PRECEDENCE)]
pub struct Cli {
    /// Optional TOML configuration file
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for generation and pipeline runs
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Log filter, e.g. `info` or `graphtool=debug`
    #[arg(long, global = true)]
    log_level: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded task corpus
    Generate(GenerateArgs),
    /// Run the three-stage pipeline over a corpus
    Run(RunArgs),
    /// Filter traces with the matching function and export an Alpaca dataset
    BuildDataset(BuildArgs),
    /// Score traces and write reports
    Evaluate(EvaluateArgs),
    /// Print a previously written report
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SizeArg {
    Wl,
    El,
    Both,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// `all`, or a comma list of tool names, optionally suffixed `:directed`/`:undirected`
    #[arg(long)]
    tasks: Option<String>,
    /// Instances per task kind and size class
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, value_enum)]
    size: Option<SizeArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    token_budget: Option<usize>,
    /// Output directory; receives corpus.jsonl and the graph files
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BackendArgs {
    #[arg(long, value_enum)]
    backend: Option<BackendKind>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    api_key: Option<String>,
    #[arg(long)]
    max_new_tokens: Option<u32>,
    #[arg(long)]
    top_p: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
    /// Retries after the first failed attempt
    #[arg(long)]
    retries: Option<u32>,
    #[arg(long)]
    timeout_ms: Option<u64>,
    /// Per-stage corruption probability of the fault backend
    #[arg(long)]
    fault_rate: Option<f64>,
    /// Restrict the fault backend to a single corruption mode
    #[arg(long, value_enum)]
    fault_mode: Option<FaultModeArg>,
    #[arg(long)]
    fault_seed: Option<u64>,
}

impl BackendArgs {
    fn flags(&self) -> BackendFlags {
        BackendFlags {
            kind: self.backend,
            endpoint: self.endpoint.clone(),
            model: self.model.clone(),
            api_key: self.api_key.clone(),
            max_new_tokens: self.max_new_tokens,
            top_p: self.top_p,
            temperature: self.temperature,
            retry_count: self.retries,
            timeout_ms: self.timeout_ms,
            fault_rate: self.fault_rate,
            fault_mode: self.fault_mode,
            fault_seed: self.fault_seed,
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[command(flatten)]
    backend: BackendArgs,
    /// Trace output file (JSON lines)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fault backend only: write the injected corruption labels here
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(long)]
    traces: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Alpaca JSON output file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Retention statistics output file
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Generate and run fresh instances until every task keeps its original count
    #[arg(long)]
    fill_quota: bool,
    /// Rounds of regeneration per task before giving up
    #[arg(long, default_value_t = 10)]
    max_rounds: usize,
    /// Seed the corpus was generated with (used by --fill-quota)
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    traces: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Report directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Md,
    Txt,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory written by `evaluate`
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "txt")]
    format: FormatArg,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Failed(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

fn required(path: Option<PathBuf>, fallback: Option<&PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
    path.or_else(|| fallback.cloned())
        .ok_or_else(|| CliError::Usage(format!("missing required --{flag}")))
}

/// Parses `all` or a comma list like `shortest_path,cycle_detection:undirected`.
pub fn parse_tasks(spec: &str) -> Result<Vec<TaskKind>, String> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(TaskKind::all());
    }
    let mut kinds = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let found: Vec<TaskKind> = if item.contains(':') {
            vec![item.parse::<TaskKind>().map_err(|e| e.to_string())?]
        } else {
            let tool: ToolName = item.parse().map_err(|_| format!("unknown task `{item}`"))?;
            TaskKind::all().into_iter().filter(|k| k.tool() == tool).collect()
        };
        for k in found {
            if !kinds.contains(&k) {
                kinds.push(k);
            }
        }
    }
    if kinds.is_empty() {
        return Err("no tasks selected".into());
    }
    kinds.sort_by_key(|k| k.ordinal());
    Ok(kinds)
}

fn gen_config(args: &GenerateArgs, file: &FileConfig) -> Result<GenConfig, CliError> {
    let g = &file.generate;
    let defaults = GenConfig::default();
    let tasks = args
        .tasks
        .clone()
        .or_else(|| g.tasks.clone())
        .unwrap_or_else(|| "all".into());
    let kinds = parse_tasks(&tasks).map_err(CliError::Usage)?;
    let size = match (args.size, g.size.as_deref()) {
        (Some(s), _) => s,
        (None, Some(s)) => SizeArg::from_str(s, true).map_err(|_| CliError::Usage(format!("invalid size `{s}`")))?,
        (None, None) => SizeArg::Wl,
    };
    let sizes = match size {
        SizeArg::Wl => vec![SizeClass::WL],
        SizeArg::El => vec![SizeClass::EL],
        SizeArg::Both => vec![SizeClass::WL, SizeClass::EL],
    };
    let config = GenConfig {
        kinds,
        count_per_kind: args.count.or(g.count).unwrap_or(defaults.count_per_kind),
        sizes,
        seed: args.seed.or(g.seed).unwrap_or(defaults.seed),
        token_budget: args.token_budget.or(g.token_budget).unwrap_or(defaults.token_budget),
        graph_dir: g.graph_dir.clone().unwrap_or(defaults.graph_dir),
        ..defaults
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

struct Ctx<'a> {
    file: FileConfig,
    env: &'a dyn Env,
    workers: usize,
    out: &'a mut dyn Write,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    match execute(cli, &ProcessEnv, out) {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => {
                    let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
                }
                CliError::Failed(inner) => {
                    let _ = writeln!(err, "error: {inner:#}");
                }
            }
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli, env: &dyn Env, out: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let level = resolve_log_level(cli.log_level.clone(), env, &file);
    let _ = env_logger::Builder::new().parse_filters(&level).try_init();
    let workers = resolve_workers(cli.workers, env, &file).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut ctx = Ctx {
        file,
        env,
        workers,
        out,
    };
    match cli.command {
        Command::Generate(a) => generate(&mut ctx, a),
        Command::Run(a) => run(&mut ctx, a),
        Command::BuildDataset(a) => build(&mut ctx, a),
        Command::Evaluate(a) => evaluate(&mut ctx, a),
        Command::Report(a) => report(&mut ctx, a),
    }
}

fn generate(ctx: &mut Ctx<'_>, args: GenerateArgs) -> Result<(), CliError> {
    let dir = required(args.out.clone(), ctx.file.paths.out.as_ref(), "out")?;
    let config = gen_config(&args, &ctx.file)?;
    info!(
        "generating {} kinds x {} per size",
        config.kinds.len(),
        config.count_per_kind
    );
    let corpus = generate_parallel(&config, ctx.workers).context("generation failed")?;
    write_corpus(&dir, &corpus)?;
    writeln!(
        ctx.out,
        "wrote {} instances to {}",
        corpus.len(),
        dir.join(CORPUS_FILE).display()
    )
    .map_err(anyhow::Error::from)?;
    Ok(())
}

fn backend_settings(ctx: &Ctx<'_>, args: &BackendArgs) -> Result<BackendSettings, CliError> {
    let s = resolve_backend(&args.flags(), ctx.env, &ctx.file).map_err(|e| CliError::Usage(e.to_string()))?;
    if s.kind == BackendKind::Http && s.completion.endpoint.is_empty() {
        return Err(CliError::Usage(
            "the http backend needs an endpoint: pass --endpoint or set GRAPHTOOL_ENDPOINT".into(),
        ));
    }
    Ok(s)
}

fn fault_plan(s: &BackendSettings) -> FaultPlan {
    match s.fault_mode {
        Some(mode) => FaultPlan::only(mode, s.fault_rate),
        None => FaultPlan::uniform(s.fault_rate),
    }
}

enum Backend {
    Plain(Box<dyn LlmBackend>),
    Fault(FaultBackend),
}

impl Backend {
    fn build(s: &BackendSettings, corpus: &[TaskInstance]) -> anyhow::Result<Self> {
        Ok(match s.kind {
            BackendKind::Http => Backend::Plain(Box::new(HttpBackend::new())),
            BackendKind::Oracle => Backend::Plain(Box::new(make_oracle_backend(corpus))),
            BackendKind::Fault => Backend::Fault(FaultBackend::new(
                make_oracle_backend(corpus),
                fault_plan(s),
                s.fault_seed,
            )?),
        })
    }

    fn as_dyn(&self) -> &dyn LlmBackend {
        match self {
            Backend::Plain(b) => b.as_ref(),
            Backend::Fault(f) => f,
        }
    }
}

#[derive(Serialize)]
struct LabelLine<'a> {
    instance_id: &'a str,
    expected: Category,
    faults: Vec<InjectedFault>,
}

fn load_corpus(path: &Path) -> anyhow::Result<Vec<TaskInstance>> {
    read_jsonl(path).with_context(|| format!("reading corpus {}", path.display()))
}

fn load_traces(path: &Path) -> anyhow::Result<Vec<PipelineTrace>> {
    read_jsonl(path).with_context(|| format!("reading traces {}", path.display()))
}

fn run(ctx: &mut Ctx<'_>, args: RunArgs) -> Result<(), CliError> {
    let corpus_path = required(args.corpus.clone(), ctx.file.paths.corpus.as_ref(), "corpus")?;
    let out_path = required(args.out.clone(), ctx.file.paths.traces.as_ref(), "out")?;
    let settings = backend_settings(ctx, &args.backend)?;
    if args.labels.is_some() && settings.kind != BackendKind::Fault {
        return Err(CliError::Usage("--labels requires --backend fault".into()));
    }
    let corpus = load_corpus(&corpus_path)?;
    let backend = Backend::build(&settings, &corpus)?;
    let env = FsEnv::for_corpus(&corpus_path);
    let registry = ToolRegistry::default();
    let traces = run_corpus(
        &corpus,
        backend.as_dyn(),
        &registry,
        &settings.completion,
        &env,
        ctx.workers,
    );
    write_jsonl(&out_path, &traces)?;

    if let (Some(path), Backend::Fault(fault)) = (&args.labels, &backend) {
        let lines: Vec<LabelLine<'_>> = corpus
            .iter()
            .map(|inst| {
                let faults = fault.injected_faults(&inst.id);
                LabelLine {
                    instance_id: &inst.id,
                    expected: graphtool_core::backend::expected_category(&faults),
                    faults,
                }
            })
            .collect();
        write_jsonl(path, &lines)?;
    }

    let failures = traces.iter().filter(|t| t.tool_result.answer().is_none()).count();
    let backend_errors = traces
        .iter()
        .filter(|t| t.stages.iter().any(|s| s.backend_error.is_some()))
        .count();
    writeln!(
        ctx.out,
        "wrote {} traces to {} ({} without an answer, {} with backend errors)",
        traces.len(),
        out_path.display(),
        failures,
        backend_errors
    )
    .map_err(anyhow::Error::from)?;
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn build(ctx: &mut Ctx<'_>, args: BuildArgs) -> Result<(), CliError> {
    let traces_path = required(args.traces.clone(), ctx.file.paths.traces.as_ref(), "traces")?;
    let corpus_path = required(args.corpus.clone(), ctx.file.paths.corpus.as_ref(), "corpus")?;
    let out_path = required(args.out.clone(), None, "out")?;
    let mut corpus = load_corpus(&corpus_path)?;
    let mut traces = load_traces(&traces_path)?;

    if args.fill_quota {
        let settings = backend_settings(ctx, &args.backend)?;
        let defaults = GenConfig::default();
        let g = &ctx.file.generate;
        let config = GenConfig {
            seed: args.seed.or(g.seed).unwrap_or(defaults.seed),
            token_budget: g.token_budget.unwrap_or(defaults.token_budget),
            graph_dir: g.graph_dir.clone().unwrap_or(defaults.graph_dir.clone()),
            ..defaults
        };
        let env = FsEnv::for_corpus(&corpus_path);
        let corpus_dir = corpus_path.parent().map(Path::to_path_buf).unwrap_or_default();
        let registry = ToolRegistry::default();
        let workers = ctx.workers;
        let fill = fill_quota(&corpus, &traces, &config, args.max_rounds, |batch| {
            write_graph_files(&corpus_dir, batch)?;
            let backend = Backend::build(&settings, batch).map_err(|e| crate::io::IoError::Json {
                path: corpus_path.clone(),
                line: 0,
                message: e.to_string(),
            })?;
            Ok(run_corpus(
                batch,
                backend.as_dyn(),
                &registry,
                &settings.completion,
                &env,
                workers,
            ))
        })?;
        for (kind, size, missing) in &fill.short {
            log::warn!("{kind} {size}: still {missing} short after {} rounds", args.max_rounds);
        }
        write_jsonl(&sibling(&out_path, "fill-corpus.jsonl"), &fill.instances)?;
        write_jsonl(&sibling(&out_path, "fill-traces.jsonl"), &fill.traces)?;
        corpus.extend(fill.instances);
        traces.extend(fill.traces);
    }

    let dataset = build_dataset(&traces, &corpus).context("building dataset")?;
    export_alpaca(&dataset.entries, &out_path)?;
    if let Some(stats) = &args.stats {
        write_json(stats, &dataset.stats)?;
    }
    writeln!(
        ctx.out,
        "kept {} of {} instances ({} entries) in {}",
        dataset.stats.retained_instances,
        dataset.stats.traces,
        dataset.stats.entries,
        out_path.display()
    )
    .map_err(anyhow::Error::from)?;
    Ok(())
}

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TXT: &str = "report.txt";
pub const REPORT_MD: &str = "report.md";
pub const RECORDS_FILE: &str = "records.jsonl";

fn evaluate(ctx: &mut Ctx<'_>, args: EvaluateArgs) -> Result<(), CliError> {
    let traces_path = required(args.traces.clone(), ctx.file.paths.traces.as_ref(), "traces")?;
    let corpus_path = required(args.corpus.clone(), ctx.file.paths.corpus.as_ref(), "corpus")?;
    let dir = required(args.out.clone(), ctx.file.paths.out.as_ref(), "out")?;
    let corpus = load_corpus(&corpus_path)?;
    let traces = load_traces(&traces_path)?;
    let by_id: std::collections::HashMap<&str, &TaskInstance> = corpus.iter().map(|i| (i.id.as_str(), i)).collect();
    let records: Vec<EvalRecord> = traces
        .iter()
        .map(|t| {
            by_id
                .get(t.instance_id.as_str())
                .map(|inst| score_trace(t, inst))
                .ok_or_else(|| anyhow!("trace `{}` has no instance in the corpus", t.instance_id))
        })
        .collect::<anyhow::Result<_>>()?;
    let report = aggregate(&records, &corpus).context("aggregating")?;
    let text = render_report(&report, ReportFormat::Text);
    write_jsonl(&dir.join(RECORDS_FILE), &records)?;
    write_json(&dir.join(REPORT_JSON), &report)?;
    crate::io::atomic_write(&dir.join(REPORT_TXT), text.as_bytes())?;
    crate::io::atomic_write(
        &dir.join(REPORT_MD),
        render_report(&report, ReportFormat::Markdown).as_bytes(),
    )?;
    write!(ctx.out, "{text}").map_err(anyhow::Error::from)?;
    Ok(())
}

fn report(ctx: &mut Ctx<'_>, args: ReportArgs) -> Result<(), CliError> {
    let report: Report = read_json(&args.input.join(REPORT_JSON))?;
    let format = match args.format {
        FormatArg::Md => ReportFormat::Markdown,
        FormatArg::Txt => ReportFormat::Text,
    };
    write!(ctx.out, "{}", render_report(&report, format)).map_err(anyhow::Error::from)?;
    Ok(())
}
