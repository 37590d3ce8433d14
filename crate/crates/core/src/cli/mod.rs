//! Command-line front end: CSV in, result CSV out, stats JSON on request.
//!
//! Three subcommands share the library engine. `query` evaluates one window
//! expression over a CSV table and echoes the input columns plus a result
//! column. `analyze` tabulates expected remembered-entry counts three ways
//! (recurrence, exhaustive enumeration, seeded simulation) as CSV. `bench`
//! replays one query under every strategy that can run it and reports the
//! operation and I/O counters side by side.
//!
//! Exit codes: 0 when every row produced a value; 1 when the run completed
//! but some frames were empty; 2 for expression errors; 3 for ingestion
//! errors; 4 for spill I/O errors; 5 for anything else. Everything is
//! configured by flags; no environment variables are read.

pub mod expr;
pub mod table;

pub use expr::{parse_window_expr, WindowExpr};
pub use table::Table;

use crate::analysis::{self, DistributionKind, DistributionSpec, ENUMERATION_LIMIT};
use crate::error::{Error, Result};
use crate::executor::{self, EngineConfig, EvalOutput, Strategy};
use crate::frames::FrameMode;
use crate::spill::SpillConfig;
use crate::value::{Column, Value};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(
    name = "spillway",
    version,
    about = "Windowed aggregation over CSV tables with disk-spilling extremum state"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one window expression over a CSV table.
    Query(QueryArgs),
    /// Tabulate expected remembered-entry counts: exact, enumerated, simulated.
    Analyze(AnalyzeArgs),
    /// Replay one query under every applicable strategy and compare counters.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Input CSV path; a header row is required.
    #[arg(long)]
    pub input: PathBuf,

    /// Window expression, e.g. "AVG(Score) OVER (ROWS BETWEEN 2 PRECEDING AND 1 FOLLOWING)".
    #[arg(long)]
    pub expr: String,

    /// Extremum entries kept in memory before spilling to disk.
    #[arg(long, default_value_t = 4096, value_parser = parse_at_least_one)]
    pub memory_budget: usize,

    /// Entries per disk page.
    #[arg(long, default_value_t = 256, value_parser = parse_at_least_one)]
    pub page_size: usize,

    /// Directory for spill files; created if absent (default: system temp).
    #[arg(long)]
    pub spill_dir: Option<PathBuf>,

    /// Write a single JSON stats object to this path.
    #[arg(long)]
    pub stats_out: Option<PathBuf>,

    /// Base RNG seed; accepted for interface symmetry, query evaluation is
    /// deterministic and never draws from it.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Override the planner's strategy choice.
    #[arg(long, value_enum, default_value_t = ForceStrategy::Auto)]
    pub force_strategy: ForceStrategy,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Largest window width to tabulate.
    #[arg(long, default_value_t = 10, value_parser = parse_at_least_one)]
    pub max_d: usize,

    /// Monte Carlo trials per width; 0 skips the simulation rows.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,

    /// Input distribution for the simulation rows.
    #[arg(long, value_enum, default_value_t = DistChoice::Uniform)]
    pub dist: DistChoice,

    /// Mean for --dist normal.
    #[arg(long, default_value_t = 0.0)]
    pub mean: f64,

    /// Standard deviation for --dist normal; must be positive.
    #[arg(long, default_value_t = 1.0)]
    pub std_dev: f64,

    /// Base RNG seed; per-trial streams derive from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Input CSV path; a header row is required.
    #[arg(long)]
    pub input: PathBuf,

    /// Window expression to replay under each strategy.
    #[arg(long)]
    pub expr: String,

    /// Extremum entries kept in memory before spilling to disk.
    #[arg(long, default_value_t = 4096, value_parser = parse_at_least_one)]
    pub memory_budget: usize,

    /// Entries per disk page.
    #[arg(long, default_value_t = 256, value_parser = parse_at_least_one)]
    pub page_size: usize,

    /// Directory for spill files; created if absent (default: system temp).
    #[arg(long)]
    pub spill_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ForceStrategy {
    /// Let the planner decide.
    Auto,
    /// Recompute every frame from scratch.
    Brute,
    /// In-memory extremum deque.
    Deque,
    /// Disk-spilling extremum deque.
    Spill,
}

impl ForceStrategy {
    fn to_strategy(self) -> Option<Strategy> {
        match self {
            ForceStrategy::Auto => None,
            ForceStrategy::Brute => Some(Strategy::BruteForce),
            ForceStrategy::Deque => Some(Strategy::InMemoryDeque),
            ForceStrategy::Spill => Some(Strategy::SpilledDeque),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistChoice {
    Uniform,
    Normal,
    Increasing,
    Decreasing,
}

impl DistChoice {
    fn to_kind(self, mean: f64, std_dev: f64) -> DistributionKind {
        match self {
            DistChoice::Uniform => DistributionKind::UniformPermutation,
            DistChoice::Normal => DistributionKind::Normal { mean, std_dev },
            DistChoice::Increasing => DistributionKind::Increasing,
            DistChoice::Decreasing => DistributionKind::Decreasing,
        }
    }
}

fn parse_at_least_one(s: &str) -> std::result::Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v == 0 {
        return Err("must be at least 1".into());
    }
    Ok(v)
}

/// Map an error to its process exit code; see the module doc for the table.
pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::InvalidFrame(_) => 2,
        Error::Ingest(_) => 3,
        Error::SpillIo(_) => 4,
        _ => 5,
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8> {
    match &cli.command {
        Command::Query(args) => run_query(args, out),
        Command::Analyze(args) => run_analyze(args, out),
        Command::Bench(args) => run_bench(args, out),
    }
}

/// The one JSON record `--stats-out` produces; field order is the wire order.
#[derive(Debug, serde::Serialize)]
struct StatsRecord<'a> {
    strategy: &'a str,
    page_reads: u64,
    page_writes: u64,
    pages_live_peak: u64,
    hot_tail_peak: u64,
    rows: u64,
    runtime_ms: u64,
}

pub fn run_query(args: &QueryArgs, out: &mut dyn Write) -> Result<u8> {
    let expr = parse_window_expr(&args.expr)?;
    let table = Table::from_path(&args.input)?;
    let config = engine_config(
        args.memory_budget,
        args.page_size,
        args.spill_dir.as_deref(),
    )?;

    let started = Instant::now();
    let (output, strategy) =
        evaluate_expression(&expr, &table, &config, args.force_strategy.to_strategy())?;
    let runtime_ms = started.elapsed().as_millis() as u64;

    let mut w = csv::Writer::from_writer(out);
    let display = expr.display();
    let mut header: Vec<&str> = table.headers.iter().map(String::as_str).collect();
    header.push(&display);
    w.write_record(&header).map_err(out_err)?;
    for (row, value) in table.cells.iter().zip(&output.values) {
        let mut record = row.clone();
        record.push(format_value(*value));
        w.write_record(&record).map_err(out_err)?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))?;

    if let Some(path) = &args.stats_out {
        let record = StatsRecord {
            strategy: strategy.name(),
            page_reads: output.stats.io.page_reads,
            page_writes: output.stats.io.page_writes,
            pages_live_peak: output.stats.pages_live_peak,
            hot_tail_peak: output.stats.hot_tail_peak as u64,
            rows: output.stats.rows as u64,
            runtime_ms,
        };
        let json = serde_json::to_string_pretty(&record).expect("fixed-shape record");
        std::fs::write(path, json + "\n")
            .map_err(|e| Error::Output(format!("cannot write {}: {e}", path.display())))?;
    }

    Ok(if output.values.iter().all(Option::is_some) {
        0
    } else {
        1
    })
}

pub fn run_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<u8> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["d", "exact_fraction", "float", "method", "trials", "stderr"])
        .map_err(out_err)?;
    for d in 1..=args.max_d {
        let g = analysis::g_recurrence(d)?;
        w.write_record([
            d.to_string(),
            g.fraction(),
            format_float(g.to_f64()),
            "recurrence".into(),
            String::new(),
            String::new(),
        ])
        .map_err(out_err)?;
        if d <= ENUMERATION_LIMIT {
            let b = analysis::brute_force_expected_length(d)?;
            w.write_record([
                d.to_string(),
                b.fraction(),
                format_float(b.to_f64()),
                "enumeration".into(),
                String::new(),
                String::new(),
            ])
            .map_err(out_err)?;
        }
        if args.trials > 0 {
            let spec = DistributionSpec {
                kind: args.dist.to_kind(args.mean, args.std_dev),
                seed: args.seed,
            };
            let sim = analysis::simulate_expected_length(&spec, d, args.trials)?;
            w.write_record([
                d.to_string(),
                String::new(),
                format_float(sim.mean),
                format!("simulation-{}", spec.kind.label()),
                sim.trials.to_string(),
                format_float(sim.std_error),
            ])
            .map_err(out_err)?;
        }
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))?;
    Ok(0)
}

pub fn run_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<u8> {
    let expr = parse_window_expr(&args.expr)?;
    let table = Table::from_path(&args.input)?;
    let config = engine_config(
        args.memory_budget,
        args.page_size,
        args.spill_dir.as_deref(),
    )?;

    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "strategy",
        "rows",
        "add_ops",
        "remove_ops",
        "page_reads",
        "page_writes",
        "pages_live_peak",
        "hot_tail_peak",
        "runtime_ms",
    ])
    .map_err(out_err)?;
    for strategy in [
        Strategy::IncrementalUpdate,
        Strategy::RunningExtremum,
        Strategy::InMemoryDeque,
        Strategy::SpilledDeque,
        Strategy::BruteForce,
    ] {
        let started = Instant::now();
        match evaluate_expression(&expr, &table, &config, Some(strategy)) {
            Ok((output, _)) => {
                let runtime_ms = started.elapsed().as_millis() as u64;
                w.write_record([
                    strategy.name().to_string(),
                    output.stats.rows.to_string(),
                    output.stats.add_ops.to_string(),
                    output.stats.remove_ops.to_string(),
                    output.stats.io.page_reads.to_string(),
                    output.stats.io.page_writes.to_string(),
                    output.stats.pages_live_peak.to_string(),
                    output.stats.hot_tail_peak.to_string(),
                    runtime_ms.to_string(),
                ])
                .map_err(out_err)?;
            }
            // A strategy that cannot run this aggregate or frame is simply
            // absent from the report.
            Err(Error::UnsupportedStrategy(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))?;
    Ok(0)
}

fn out_err(e: csv::Error) -> Error {
    Error::Output(e.to_string())
}

fn engine_config(
    memory_budget: usize,
    page_size: usize,
    spill_dir: Option<&Path>,
) -> Result<EngineConfig> {
    let mut spill = SpillConfig {
        memory_budget,
        page_capacity: page_size,
        ..SpillConfig::default()
    };
    if let Some(dir) = spill_dir {
        std::fs::create_dir_all(dir)?;
        spill.dir = dir.to_path_buf();
    }
    Ok(EngineConfig { spill })
}

/// Resolve the expression's columns against the table, then evaluate.
pub fn evaluate_expression(
    expr: &WindowExpr,
    table: &Table,
    config: &EngineConfig,
    force: Option<Strategy>,
) -> Result<(EvalOutput, Strategy)> {
    let data = table.numeric_column(&expr.column)?;
    let keys = match &expr.spec.order_key {
        Some(k) => Some(table.numeric_column(k)?),
        None => None,
    };
    evaluate_with_keys(expr, &data, keys.as_ref(), config, force)
}

/// Plan and evaluate over already-resolved columns. ROWS frames with an ORDER
/// BY walk the sort order and scatter results back to input row order; RANGE
/// frames hand the key column to the engine, which does its own sort and
/// scatter.
pub fn evaluate_with_keys(
    expr: &WindowExpr,
    data: &Column,
    keys: Option<&Column>,
    config: &EngineConfig,
    force: Option<Strategy>,
) -> Result<(EvalOutput, Strategy)> {
    let mut plan = executor::plan(expr.kind, &expr.spec, config);
    if let Some(s) = force {
        plan = plan.with_strategy(s);
    }
    let strategy = plan.strategy;
    let output = match (expr.spec.mode, expr.spec.order_key.is_some()) {
        (FrameMode::Range, _) => executor::evaluate(&plan, config, data, keys)?,
        (FrameMode::Rows, false) => executor::evaluate(&plan, config, data, None)?,
        (FrameMode::Rows, true) => {
            let keys = keys.ok_or_else(|| {
                Error::InvalidFrame("frames with ORDER BY need a key column".into())
            })?;
            if keys.len() != data.len() {
                return Err(Error::InvalidFrame(format!(
                    "key column has {} rows but data column has {}",
                    keys.len(),
                    data.len()
                )));
            }
            let perm = sort_permutation(keys);
            let sorted = permute(data, &perm);
            let mut output = executor::evaluate(&plan, config, &sorted, None)?;
            let mut values = vec![None; output.values.len()];
            for (pos, &orig) in perm.iter().enumerate() {
                values[orig] = output.values[pos].take();
            }
            output.values = values;
            output
        }
    };
    Ok((output, strategy))
}

/// Stable order of row indices sorted by key; ties keep input order.
fn sort_permutation(keys: &Column) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    match keys {
        Column::Int(k) => idx.sort_by_key(|&i| k[i]),
        Column::Float(k) => idx.sort_by(|&a, &b| k[a].total_cmp(&k[b])),
    }
    idx
}

fn permute(data: &Column, perm: &[usize]) -> Column {
    match data {
        Column::Int(v) => Column::Int(perm.iter().map(|&i| v[i]).collect()),
        Column::Float(v) => Column::Float(perm.iter().map(|&i| v[i]).collect()),
    }
}

/// Render a result cell: NULL is empty, integers are bare, floats round to at
/// most 12 significant digits with no trailing zero padding.
pub fn format_value(v: Option<Value>) -> String {
    match v {
        None => String::new(),
        Some(Value::Int(i)) => i.to_string(),
        Some(Value::Float(f)) => format_float(f),
    }
}

pub fn format_float(f: f64) -> String {
    // Round to 12 significant digits via the exponent form, then let the
    // shortest-round-trip formatter drop the padding.
    let rounded: f64 = format!("{f:.11e}").parse().expect("round-trip");
    if rounded == 0.0 {
        return "0".to_string();
    }
    format!("{rounded}")
}
