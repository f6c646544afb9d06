//! Command-line front end.
//!
//! Exit codes: 0 success, 1 malformed input or dimension mismatch, 2
//! infeasible instance, 3 node budget exhausted (the incumbent is still
//! written), 4 infeasible allocation.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bench::{run_sweep_streaming, summarize, write_summary, RecordWriter, Reductions, SweepConfig};
use crate::error::{Result, RsepError};
use crate::model::{check_feasibility, count_linked, Allocation, Instance};
use crate::pipeline::{solve, SolverConfig};
use crate::reduction::{aggregate_solution, plan_aggregation};
use crate::scenario::{fixed_scenario, generate, ScenarioSpec, SCENARIO_NAMES};
use crate::solvers::{SolverId, DEFAULT_NODE_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_INFEASIBLE_INSTANCE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INFEASIBLE_ALLOCATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "rsep", version, about = "Resource-block slicing enforcement solver")]
pub struct Cli {
    /// Print progress and summaries to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and write the result as JSON.
    Solve(SolveArgs),
    /// Run a parameter sweep over M and B and write CSV records.
    Sweep(SweepArgs),
    /// Check an allocation against an instance and count its linked RBs.
    Validate(ValidateArgs),
    /// Show the aggregation plan, optionally mapping an allocation onto it.
    Aggregate(AggregateArgs),
    /// Generate a random instance.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct InstanceSource {
    /// Named scenario (fig1, appendix_shape).
    #[arg(long, group = "source")]
    pub scenario: Option<String>,
    /// Instance JSON file, or `-` for stdin.
    #[arg(long, group = "source")]
    pub instance: Option<PathBuf>,
    /// Scenario spec JSON file used to generate the instance.
    #[arg(long, group = "source")]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    /// Penalty weight for the relaxed solver (default: largest eigenvalue + 1).
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Random seed (solver seed; for sweeps also the base instance seed).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: InstanceSource,
    #[arg(long, default_value = "exact")]
    pub solver: SolverId,
    #[command(flatten)]
    pub params: SolverArgs,
    /// Drop MVNO/BS pairs with zero quota before the exact search.
    #[arg(long)]
    pub sparsity: bool,
    /// Solve on the aggregated grid when the instance is aggregable.
    #[arg(long)]
    pub aggregate: bool,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Base scenario spec JSON file; M and B are overridden by the sweep.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Inclusive MVNO range, e.g. `2..6`.
    #[arg(long, value_parser = parse_range, default_value = "2..6")]
    pub sweep_m: RangeInclusive<usize>,
    /// Inclusive BS range, e.g. `2..3`.
    #[arg(long, value_parser = parse_range, default_value = "3..3")]
    pub sweep_b: RangeInclusive<usize>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// Solvers to run; repeat the flag or separate with commas.
    #[arg(long, value_delimiter = ',', default_values = ["exact", "relaxed", "mlf"])]
    pub solver: Vec<SolverId>,
    #[command(flatten)]
    pub params: SolverArgs,
    /// Also run every solver with sparsity elimination.
    #[arg(long)]
    pub sparsity: bool,
    /// Also run every solver with RB aggregation.
    #[arg(long)]
    pub aggregate: bool,
    /// CSV record output (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-cell mean/std summary CSV.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// JSON-lines output including allocations.
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub source: InstanceSource,
    /// Allocation grid JSON or a solve result JSON; `-` for stdin.
    #[arg(long)]
    pub allocation: PathBuf,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    #[command(flatten)]
    pub source: InstanceSource,
    /// Optimal allocation to map onto the aggregated grid.
    #[arg(long)]
    pub allocation: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Scenario spec JSON file; other flags are ignored when given.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Emit a named scenario instead of a random one.
    #[arg(long, conflicts_with = "spec")]
    pub scenario: Option<String>,
    #[arg(short, long, default_value_t = 3)]
    pub m: usize,
    #[arg(short, long, default_value_t = 3)]
    pub b: usize,
    #[arg(long, default_value_t = 6)]
    pub n_rb: usize,
    #[arg(long, default_value_t = 10)]
    pub n_sf: usize,
    #[arg(long, default_value_t = 1)]
    pub n_frames: usize,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 1.0)]
    pub load: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Round quotas down to multiples of this factor.
    #[arg(long)]
    pub force_k: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `A..B` (inclusive) or a single value.
pub fn parse_range(text: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("`{s}`: {e}"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(text)?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!("invalid range `{text}`"));
    }
    Ok(lo..=hi)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(err: &RsepError) -> i32 {
    match err {
        RsepError::Overloaded { .. } => EXIT_INFEASIBLE_INSTANCE,
        RsepError::OracleBudgetExceeded(_) => EXIT_BUDGET,
        RsepError::InfeasibleAllocation(_) => EXIT_INFEASIBLE_ALLOCATION,
        _ => EXIT_MALFORMED,
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Solve(args) => cmd_solve(args, cli.verbose),
        Command::Sweep(args) => cmd_sweep(args, cli.verbose),
        Command::Validate(args) => cmd_validate(args),
        Command::Aggregate(args) => cmd_aggregate(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn read_input(path: &Path) -> Result<String> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

/// Wraps a JSON error with `path:line:column`.
fn located(path: &Path, err: serde_json::Error) -> RsepError {
    RsepError::InvalidInstance(format!("{}:{}:{}: {err}", path.display(), err.line(), err.column()))
}

fn load_instance(source: &InstanceSource) -> Result<Instance> {
    if let Some(name) = &source.scenario {
        return fixed_scenario(name).map_err(|e| match e {
            RsepError::UnknownScenario(n) => {
                RsepError::UnknownScenario(format!("{n} (known: {})", SCENARIO_NAMES.join(", ")))
            }
            e => e,
        });
    }
    if let Some(path) = &source.instance {
        let text = read_input(path)?;
        return serde_json::from_str(&text).map_err(|e| located(path, e));
    }
    if let Some(path) = &source.spec {
        return generate(&load_spec(path)?);
    }
    Err(RsepError::InvalidParameter(
        "one of --scenario, --instance or --spec is required".into(),
    ))
}

fn load_spec(path: &Path) -> Result<ScenarioSpec> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| located(path, e))
}

fn load_allocation(path: &Path) -> Result<Allocation> {
    let text = read_input(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| located(path, e))?;
    let grid = match value {
        serde_json::Value::Object(mut obj) => obj
            .remove("allocation")
            .ok_or_else(|| RsepError::InvalidInstance(format!("{}: object without an `allocation` field", path.display())))?,
        other => other,
    };
    serde_json::from_value(grid).map_err(|e| RsepError::InvalidInstance(format!("{}: {e}", path.display())))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write + Send>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout()),
    })
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    let mut out = open_output(path)?;
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn solver_config(params: &SolverArgs, sparsity: bool, aggregation: bool) -> SolverConfig {
    SolverConfig {
        node_budget: params.node_budget,
        lambda: params.lambda,
        restarts: params.restarts,
        seed: params.seed.unwrap_or(0),
        sparsity,
        aggregation,
    }
}

fn cmd_solve(args: &SolveArgs, verbose: bool) -> Result<i32> {
    let instance = load_instance(&args.source)?;
    let config = solver_config(&args.params, args.sparsity, args.aggregate);
    let result = solve(&instance, args.solver, &config)?;
    write_text(args.out.as_deref(), &result.to_json())?;
    let budget_hit = args.solver == SolverId::Exact && !result.certified;
    if verbose || args.out.is_some() {
        eprintln!(
            "objective {} ({}, {}, {:.3} ms, {} nodes)",
            result.objective,
            result.solver,
            if result.certified { "certified" } else { "uncertified" },
            result.elapsed.as_secs_f64() * 1e3,
            result.nodes
        );
    }
    if budget_hit {
        eprintln!("node budget exhausted; best incumbent written");
        return Ok(EXIT_BUDGET);
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(args: &SweepArgs, verbose: bool) -> Result<i32> {
    let mut base = match &args.spec {
        Some(path) => load_spec(path)?,
        None => ScenarioSpec::new(1, 1),
    };
    if let Some(seed) = args.params.seed {
        base.seed = seed;
    }
    let mut reductions = vec![Reductions::NONE];
    if args.sparsity {
        reductions.push(Reductions::SPARSITY);
    }
    if args.aggregate {
        reductions.push(Reductions::AGGREGATION);
    }
    let config = SweepConfig {
        m_values: args.sweep_m.clone().collect(),
        b_values: args.sweep_b.clone().collect(),
        repetitions: args.reps,
        solvers: args.solver.clone(),
        reductions,
        solver: solver_config(&args.params, false, false),
        threads: None,
    };
    let mut writer = RecordWriter::new(open_output(args.out.as_deref())?);
    if let Some(path) = &args.jsonl {
        writer = writer.with_jsonl(Box::new(BufWriter::new(File::create(path)?)));
    }
    let mut records = Vec::new();
    run_sweep_streaming(&base, &config, |r| {
        writer.write(r)?;
        if verbose {
            eprintln!("M={} B={} rep={} {} {} -> {}", r.m, r.b, r.rep, r.solver, r.reductions.label(), r.objective);
        }
        records.push(r.clone());
        Ok(())
    })?;
    writer.flush()?;
    if let Some(path) = &args.summary {
        write_summary(&summarize(&records), File::create(path)?)?;
    }
    Ok(EXIT_OK)
}

fn cmd_validate(args: &ValidateArgs) -> Result<i32> {
    let instance = load_instance(&args.source)?;
    let alloc = load_allocation(&args.allocation)?;
    let report = check_feasibility(&instance, &alloc)?;
    if !report.is_feasible() {
        println!("infeasible");
        println!("{report}");
        return Ok(EXIT_INFEASIBLE_ALLOCATION);
    }
    println!("feasible");
    println!("linked RBs: {}", count_linked(&instance, &alloc)?);
    Ok(EXIT_OK)
}

fn cmd_aggregate(args: &AggregateArgs) -> Result<i32> {
    let instance = load_instance(&args.source)?;
    let Some(plan) = plan_aggregation(&instance) else {
        write_text(args.out.as_deref(), &json!({ "aggregable": false }).to_string())?;
        return Ok(EXIT_OK);
    };
    let mut doc = json!({
        "aggregable": true,
        "k": plan.k,
        "axis": plan.axis,
        "scaled_instance": plan.scaled_instance,
    });
    if let Some(path) = &args.allocation {
        let alloc = load_allocation(path)?;
        let rbam = aggregate_solution(&instance, &alloc, plan.k)?;
        eprintln!("{rbam}");
        doc["links"] = json!(count_linked(&instance, &alloc)?);
        doc["aggregated_links"] = json!(rbam.links(&instance));
        doc["aggregated"] = serde_json::to_value(&rbam)?;
    }
    write_text(args.out.as_deref(), &serde_json::to_string_pretty(&doc)?)?;
    Ok(EXIT_OK)
}

fn cmd_gen(args: &GenArgs) -> Result<i32> {
    let instance = if let Some(name) = &args.scenario {
        fixed_scenario(name)?
    } else {
        let spec = match &args.spec {
            Some(path) => load_spec(path)?,
            None => ScenarioSpec {
                m: args.m,
                b: args.b,
                n_rb: args.n_rb,
                n_sf: args.n_sf,
                n_frames: args.n_frames,
                adjacency_density: args.density,
                load_fraction: args.load,
                seed: args.seed,
                force_aggregable_k: args.force_k,
            },
        };
        generate(&spec)?
    };
    write_text(args.out.as_deref(), &instance.to_json_pretty())?;
    Ok(EXIT_OK)
}
