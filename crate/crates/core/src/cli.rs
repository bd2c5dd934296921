//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation or constraint failure, 2 I/O error,
//! 3 parse or schema error (including malformed command lines).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analyzer::{self, format_millions, MemoryEstimate, Mode, Optimizer, ParamReport};
use crate::graph::{self, FormatError, ModelGraph, TensorShape};
use crate::pareto::{self, MemoryFrontier, ParetoError, QuadrantConfig};
use crate::scalar::format_decimal;
use crate::transform::{self, PassReport, TransformError};
use crate::zoo::{self, FireModuleSpec, OptimizedConfig, ZooError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Validation = 1,
    Io = 2,
    Parse = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            status: ExitStatus::Validation,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            status: ExitStatus::Io,
            message: format!("{}: {e}", path.display()),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Self {
            status: ExitStatus::Parse,
            message: message.into(),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::parse(e.to_string())
    }
}

impl From<ZooError> for CliError {
    fn from(e: ZooError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<graph::GraphError> for CliError {
    fn from(e: graph::GraphError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<ParetoError> for CliError {
    fn from(e: ParetoError) -> Self {
        match e {
            ParetoError::Parse { .. } | ParetoError::Range { .. } => CliError::parse(e.to_string()),
            _ => CliError::validation(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "cndkit",
    version,
    about = "Build, rewrite, analyze and compare CNN architectures"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a reference architecture and write it as model JSON.
    Build {
        #[arg(value_enum)]
        model: ModelChoice,
        #[arg(long, default_value_t = 101)]
        classes: usize,
        /// Input resolution as HxWxC (default 299x299x3, 224x224x3 for mobilenetv2).
        #[arg(long)]
        input: Option<TensorShape>,
        /// OptimizedConfig JSON (optimized-xception only).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output path; model JSON goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply rewrite passes to a model.
    Transform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        pass: PassChoice,
        /// JSON object mapping module tags to {"s1x1","e1x1","e3x3"}.
        /// Defaults to the built-in optimized Xception specs.
        #[arg(long)]
        specs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Pass report destination; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Parameter, MAC and memory report for a model.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long, default_value_t = 32)]
        batch: usize,
        #[arg(long, value_enum, default_value_t = ModeChoice::Training)]
        mode: ModeChoice,
        #[arg(long, value_enum, default_value_t = OptimizerChoice::Adam)]
        optimizer: OptimizerChoice,
        #[arg(long, default_value_t = 0)]
        overhead_bytes: u64,
    },
    /// Module-by-module comparison of two models.
    Diff {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Quadrant and Pareto-front analysis of measurement CSV.
    Pareto {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 70.0)]
        accuracy_frontier: f64,
        /// `auto` (midpoint of min and max memory) or a value in MB.
        #[arg(long, default_value = "auto")]
        memory_frontier: String,
        /// Write plot data CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelChoice {
    Xception,
    OptimizedXception,
    Mobilenetv2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PassChoice {
    Strategy1,
    Strategy2,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeChoice {
    Training,
    Inference,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OptimizerChoice {
    Sgd,
    Adam,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    ExitStatus::Success.code()
                }
                _ => ExitStatus::Parse.code(),
            };
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.status.code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<ExitStatus, CliError> {
    match command {
        Command::Build {
            model,
            classes,
            input,
            config,
            out: path,
        } => cmd_build(model, classes, input, config.as_deref(), path.as_deref(), out, err),
        Command::Transform {
            input,
            pass,
            specs,
            out: path,
            report,
            format,
        } => cmd_transform(&input, pass, specs.as_deref(), &path, report.as_deref(), format, out),
        Command::Analyze {
            input,
            format,
            batch,
            mode,
            optimizer,
            overhead_bytes,
        } => {
            let mode = match mode {
                ModeChoice::Training => Mode::Training,
                ModeChoice::Inference => Mode::Inference,
            };
            let optimizer = match optimizer {
                OptimizerChoice::Sgd => Optimizer::SgdMomentum,
                OptimizerChoice::Adam => Optimizer::Adam,
            };
            cmd_analyze(&input, format, batch, mode, optimizer, overhead_bytes, out)
        }
        Command::Diff { a, b, format } => cmd_diff(&a, &b, format, out),
        Command::Pareto {
            csv,
            accuracy_frontier,
            memory_frontier,
            out: path,
        } => cmd_pareto(&csv, accuracy_frontier, &memory_frontier, path.as_deref(), out),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn load_model(path: &Path) -> Result<ModelGraph, CliError> {
    Ok(graph::deserialize(&read(path)?)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn cmd_build(
    model: ModelChoice,
    classes: usize,
    input: Option<TensorShape>,
    config: Option<&Path>,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<ExitStatus, CliError> {
    let xception_input = TensorShape::new(299, 299, 3).expect("non-zero");
    let graph = match model {
        ModelChoice::Xception => zoo::build_xception(input.unwrap_or(xception_input), classes)?,
        ModelChoice::OptimizedXception => {
            let cfg = match config {
                Some(p) => serde_json::from_str::<OptimizedConfig>(&read(p)?)
                    .map_err(|e| CliError::parse(format!("{}: {e}", p.display())))?,
                None => OptimizedConfig::default(),
            };
            zoo::build_optimized_xception(input.unwrap_or(xception_input), classes, &cfg)?
        }
        ModelChoice::Mobilenetv2 => {
            let shape = input.unwrap_or(TensorShape::new(224, 224, 3).expect("non-zero"));
            zoo::build_mobilenet_v2(shape, classes)?
        }
    };
    if config.is_some() && !matches!(model, ModelChoice::OptimizedXception) {
        return Err(CliError::validation("--config only applies to optimized-xception"));
    }
    let text = graph::serialize(&graph)?;
    let total = analyzer::count_params(&graph)?.total;
    let summary = format!("{}: {} parameters ({})\n", graph.name, total, format_millions(total));
    match path {
        Some(p) => {
            write_file(p, &text)?;
            emit(out, &summary)?;
        }
        None => {
            emit(out, &text)?;
            let _ = err.write_all(summary.as_bytes());
        }
    }
    Ok(ExitStatus::Success)
}

fn cmd_transform(
    input: &Path,
    pass: PassChoice,
    specs: Option<&Path>,
    path: &Path,
    report_path: Option<&Path>,
    format: Format,
    out: &mut dyn Write,
) -> Result<ExitStatus, CliError> {
    let graph = load_model(input)?;
    let specs: BTreeMap<String, FireModuleSpec> = match specs {
        Some(p) => serde_json::from_str(&read(p)?)
            .map_err(|e| CliError::parse(format!("{}: {e}", p.display())))?,
        None => OptimizedConfig::default().fire_specs(),
    };
    let mut reports: Vec<PassReport> = Vec::new();
    let mut current = graph;
    if matches!(pass, PassChoice::Strategy1 | PassChoice::All) {
        let (g, r) = transform::strategy1_replace_kernels(&current)?;
        current = g;
        reports.push(r);
    }
    if matches!(pass, PassChoice::Strategy2 | PassChoice::All) {
        let (g, r) = transform::strategy2_insert_fire(&current, &specs)?;
        current = g;
        reports.push(r);
    }
    write_file(path, &graph::serialize(&current)?)?;

    let text = match format {
        Format::Json => to_json(&reports),
        Format::Table => reports.iter().map(PassReport::render_table).collect(),
    };
    match report_path {
        Some(p) => write_file(p, &text)?,
        None => emit(out, &text)?,
    }
    let violations = transform::validate_fire_constraints(&current);
    if violations.is_empty() {
        Ok(ExitStatus::Success)
    } else {
        Err(CliError::validation(violations.join("; ")))
    }
}

#[derive(Serialize)]
struct AnalyzeOutput<'a> {
    model: &'a str,
    params: &'a ParamReport,
    params_rounded: String,
    macs: u64,
    memory: &'a MemoryEstimate,
}

fn cmd_analyze(
    input: &Path,
    format: Format,
    batch: usize,
    mode: Mode,
    optimizer: Optimizer,
    overhead_bytes: u64,
    out: &mut dyn Write,
) -> Result<ExitStatus, CliError> {
    let graph = load_model(input)?;
    if batch == 0 {
        return Err(CliError::validation("--batch must be >= 1"));
    }
    let params = analyzer::count_params(&graph)?;
    let macs = analyzer::flops_estimate(&graph, graph.input_shape)?;
    let memory = analyzer::memory_estimate(&graph, batch, mode, optimizer, overhead_bytes)?;
    let text = match format {
        Format::Json => to_json(&AnalyzeOutput {
            model: &graph.name,
            params: &params,
            params_rounded: format_millions(params.total),
            macs,
            memory: &memory,
        }),
        Format::Table => render_analysis(&graph, &params, macs, &memory),
    };
    emit(out, &text)?;
    Ok(ExitStatus::Success)
}

fn render_analysis(graph: &ModelGraph, params: &ParamReport, macs: u64, memory: &MemoryEstimate) -> String {
    let w = params.per_layer.iter().map(|l| l.id.len()).max().unwrap_or(2).max(2);
    let mut s = format!("model: {} (input {})\n", graph.name, graph.input_shape);
    s.push_str(&format!(
        "{:<w$}  {:<16}  {:>6}  {:>6}  {:>3}  {:>10}  {:>8}\n",
        "id", "kind", "N", "M", "psi", "kernel", "aux"
    ));
    for l in &params.per_layer {
        s.push_str(&format!(
            "{:<w$}  {:<16}  {:>6}  {:>6}  {:>3}  {:>10}  {:>8}\n",
            l.id, l.kind, l.n_channels, l.m_filters, l.psi, l.kernel_params, l.aux_params
        ));
    }
    let a = &memory.assumptions;
    s.push_str(&format!(
        "total params: {} ({})\ntrainable params: {}\nMACs: {}\n",
        params.total,
        format_millions(params.total),
        params.total_trainable,
        macs
    ));
    s.push_str(&format!(
        "memory ({}, {}, batch {}, {} bytes/scalar):\n",
        a.mode, a.optimizer, a.batch_size, a.bytes_per_scalar
    ));
    for (label, v) in [
        ("weights", memory.weights_bytes),
        ("gradients", memory.gradients_bytes),
        ("optimizer_state", memory.optimizer_state_bytes),
        ("activations", memory.activations_bytes),
        ("overhead", memory.overhead_bytes),
        ("total", memory.total_bytes),
    ] {
        s.push_str(&format!(
            "  {label:<16} {v:>14} bytes ({:.1} MB)\n",
            v as f64 / (1024.0 * 1024.0)
        ));
    }
    s
}

fn cmd_diff(a: &Path, b: &Path, format: Format, out: &mut dyn Write) -> Result<ExitStatus, CliError> {
    let ga = load_model(a)?;
    let gb = load_model(b)?;
    let report = transform::diff_report(&ga, &gb)?;
    let text = match format {
        Format::Json => to_json(&report),
        Format::Table => report.render(),
    };
    emit(out, &text)?;
    Ok(ExitStatus::Success)
}

fn cmd_pareto(
    csv: &Path,
    accuracy_frontier: f64,
    memory_frontier: &str,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<ExitStatus, CliError> {
    let memory_rule = match memory_frontier {
        "auto" | "midpoint" => MemoryFrontier::Midpoint,
        v => MemoryFrontier::Explicit(
            v.parse::<f64>()
                .map_err(|_| CliError::parse(format!("invalid --memory-frontier '{v}'")))?,
        ),
    };
    let config = QuadrantConfig::new(accuracy_frontier, memory_rule)?;
    let records = pareto::load_measurements::<f64>(&read(csv)?)?;
    let frontier = config.memory_frontier_for(&records)?;
    let front = pareto::pareto_front_indices(&records);

    let w = records.iter().map(|r| r.model.len()).max().unwrap_or(5).max(5);
    let mut s = format!(
        "accuracy frontier: {}%\nmemory frontier: {} MB\n",
        format_decimal(config.accuracy_frontier),
        format_decimal(frontier)
    );
    s.push_str(&format!(
        "{:<w$}  {:>8}  {:>10}  {:<14}  {}\n",
        "model", "test_acc", "avg_mem_mb", "quadrant", "pareto"
    ));
    for (i, r) in records.iter().enumerate() {
        s.push_str(&format!(
            "{:<w$}  {:>8}  {:>10}  {:<14}  {}\n",
            r.model,
            format_decimal(r.test_acc),
            format_decimal(r.avg_mem_mb),
            pareto::classify_quadrant(r, &config, frontier).to_string(),
            if front.contains(&i) { "yes" } else { "no" }
        ));
    }
    let names: Vec<&str> = front.iter().map(|&i| records[i].model.as_str()).collect();
    s.push_str(&format!("pareto front: {}\n", names.join(", ")));
    emit(out, &s)?;
    if let Some(p) = path {
        write_file(p, &pareto::export_plot_data(&records, &config)?)?;
    }
    Ok(ExitStatus::Success)
}
