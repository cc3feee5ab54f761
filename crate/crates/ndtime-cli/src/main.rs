//! Command-line front end for neighbor-discovery time analysis.
//!
//! Every data subcommand reads a JSON topology
//! (`{"nodes": {"<id>": {"probabilities": [..]}, ..}}`) from a file path or
//! standard input (`-`) and writes results to standard output as a human
//! table, JSON, or RFC-4180 CSV. `verify` instead runs numerical sweeps of
//! the library's structural guarantees on randomly generated instances.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when `verify`
//! finds a violation.

mod output;
mod verify;

use std::fs;
use std::io::Read;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ndtime::{
    analyze_topology, expected_discovery_time_capped, expected_time_quadrature, iterate_average,
    lower_bound_capped, simulate_discovery, slotted_expected_time_capped, AnalysisOptions,
    AnalysisRow, Method, NetworkTopology, SimulationOptions, TimeModel,
};

use output::{emit_rows, Cell, Format, Tabular};

#[derive(Parser)]
#[command(
    name = "ndtime",
    version,
    about = "Expected-time analysis for one-way neighbor discovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact expected discovery time per node
    Exact(ExactArgs),
    /// Harmonic lower bound (and gap to the exact value) per node
    Bound(BoundArgs),
    /// Monte Carlo estimate of the expected discovery time per node
    Simulate(SimulateArgs),
    /// Iterated-averaging trace for one node's probability vector
    Converge(ConvergeArgs),
    /// Numerical sweeps of the library's guarantees; nonzero exit on violation
    Verify(verify::VerifyArgs),
    /// Exact value, bound, gap, and optional simulation for every node
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Exponential,
    Slotted,
}

impl From<ModelArg> for TimeModel {
    fn from(arg: ModelArg) -> Self {
        match arg {
            ModelArg::Exponential => TimeModel::ContinuousExponential,
            ModelArg::Slotted => TimeModel::SlottedGeometric,
        }
    }
}

#[derive(Args)]
struct ExactArgs {
    /// Topology JSON path, or - for stdin
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Waiting-time model
    #[arg(long, value_enum, default_value_t = ModelArg::Exponential)]
    model: ModelArg,
    /// Neighbor-count cap for exact enumeration
    #[arg(long, default_value_t = 24)]
    max_exact_n: usize,
    /// Integrate the survival function instead of summing the series
    /// (exponential model only)
    #[arg(long)]
    quadrature: bool,
    /// Relative tolerance for --quadrature
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
}

#[derive(Args)]
struct BoundArgs {
    /// Topology JSON path, or - for stdin
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Neighbor-count cap for the optional exact column
    #[arg(long, default_value_t = 24)]
    max_exact_n: usize,
}

#[derive(Args)]
struct SimulateArgs {
    /// Topology JSON path, or - for stdin
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Waiting-time model
    #[arg(long, value_enum, default_value_t = ModelArg::Exponential)]
    model: ModelArg,
    /// Replications per node
    #[arg(long, default_value_t = 100_000)]
    reps: u64,
    /// Base seed; replication r derives its stream from (seed, r)
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Topology JSON path, or - for stdin
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Node to trace; may be omitted when the topology has exactly one node
    #[arg(long)]
    node: Option<String>,
    /// Max-norm distance from the mean vector to stop at
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Iteration budget
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Topology JSON path, or - for stdin
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Skip the exact expectation (bound-only rows)
    #[arg(long)]
    no_exact: bool,
    /// Neighbor-count cap for exact enumeration
    #[arg(long, default_value_t = 24)]
    max_exact_n: usize,
    /// Also simulate each node
    #[arg(long)]
    simulate: bool,
    /// Waiting-time model for --simulate
    #[arg(long, value_enum, default_value_t = ModelArg::Exponential)]
    model: ModelArg,
    /// Replications per node for --simulate
    #[arg(long, default_value_t = 100_000)]
    reps: u64,
    /// Base seed for --simulate
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(1);
        }
    }
}

fn run(command: Command) -> Result<i32, String> {
    match command {
        Command::Exact(args) => run_exact(args),
        Command::Bound(args) => run_bound(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Converge(args) => run_converge(args),
        Command::Verify(args) => verify::run(args),
        Command::Analyze(args) => run_analyze(args),
    }
}

fn read_topology(path: &str) -> Result<NetworkTopology, String> {
    let raw = if path == "-" {
        let mut buffer = String::new();
        std::io::stdin()
            .read_to_string(&mut buffer)
            .map_err(|e| format!("reading stdin: {e}"))?;
        buffer
    } else {
        fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?
    };
    serde_json::from_str(&raw).map_err(|e| format!("parsing topology: {e}"))
}

#[derive(Serialize)]
struct ExactRow {
    node_id: String,
    n: usize,
    method: Method,
    value: f64,
    terms_evaluated: u64,
}

impl Tabular for ExactRow {
    const HEADER: &'static [&'static str] = &["node_id", "n", "method", "value", "terms_evaluated"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::text(&self.node_id),
            Cell::Int(self.n as u64),
            Cell::text(match self.method {
                Method::InclusionExclusion => "InclusionExclusion",
                Method::Quadrature => "Quadrature",
                Method::SlottedInclusionExclusion => "SlottedInclusionExclusion",
            }),
            Cell::Float(self.value),
            Cell::Int(self.terms_evaluated),
        ]
    }
}

fn run_exact(args: ExactArgs) -> Result<i32, String> {
    if args.quadrature && args.model == ModelArg::Slotted {
        return Err("--quadrature applies only to the exponential model".into());
    }
    let topology = read_topology(&args.input)?;
    let mut rows = Vec::new();
    for (id, p) in topology.nodes() {
        let report = match (args.model, args.quadrature) {
            (ModelArg::Exponential, false) => expected_discovery_time_capped(p, args.max_exact_n),
            (ModelArg::Exponential, true) => expected_time_quadrature(p, args.rel_tol),
            (ModelArg::Slotted, _) => slotted_expected_time_capped(p, args.max_exact_n),
        }
        .map_err(|e| format!("node {id}: {e}"))?;
        rows.push(ExactRow {
            node_id: id.to_string(),
            n: report.n,
            method: report.method,
            value: report.value,
            terms_evaluated: report.terms_evaluated,
        });
    }
    emit_rows(&rows, args.format)?;
    Ok(0)
}

#[derive(Serialize)]
struct BoundRow {
    node_id: String,
    n: usize,
    harmonic: f64,
    mean_probability: f64,
    bound: f64,
    exact: Option<f64>,
    gap: Option<f64>,
}

impl Tabular for BoundRow {
    const HEADER: &'static [&'static str] = &[
        "node_id",
        "n",
        "harmonic",
        "mean_probability",
        "bound",
        "exact",
        "gap",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::text(&self.node_id),
            Cell::Int(self.n as u64),
            Cell::Float(self.harmonic),
            Cell::Float(self.mean_probability),
            Cell::Float(self.bound),
            Cell::OptFloat(self.exact),
            Cell::OptFloat(self.gap),
        ]
    }
}

fn run_bound(args: BoundArgs) -> Result<i32, String> {
    let topology = read_topology(&args.input)?;
    let rows: Vec<BoundRow> = topology
        .nodes()
        .map(|(id, p)| {
            let report = lower_bound_capped(p, args.max_exact_n);
            BoundRow {
                node_id: id.to_string(),
                n: p.len(),
                harmonic: report.harmonic,
                mean_probability: report.mean_probability,
                bound: report.bound,
                exact: report.exact,
                gap: report.gap,
            }
        })
        .collect();
    emit_rows(&rows, args.format)?;
    Ok(0)
}

#[derive(Serialize)]
struct SimulateRow {
    node_id: String,
    n: usize,
    model: TimeModel,
    mean: f64,
    std_error: f64,
    ci95_low: f64,
    ci95_high: f64,
    reps: u64,
    seed: u64,
}

impl Tabular for SimulateRow {
    const HEADER: &'static [&'static str] = &[
        "node_id",
        "n",
        "model",
        "mean",
        "std_error",
        "ci95_low",
        "ci95_high",
        "reps",
        "seed",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::text(&self.node_id),
            Cell::Int(self.n as u64),
            Cell::Text(self.model.to_string()),
            Cell::Float(self.mean),
            Cell::Float(self.std_error),
            Cell::Float(self.ci95_low),
            Cell::Float(self.ci95_high),
            Cell::Int(self.reps),
            Cell::Int(self.seed),
        ]
    }
}

fn run_simulate(args: SimulateArgs) -> Result<i32, String> {
    let topology = read_topology(&args.input)?;
    let model = TimeModel::from(args.model);
    let mut rows = Vec::new();
    for (id, p) in topology.nodes() {
        let report = simulate_discovery(p, model, args.reps, args.seed)
            .map_err(|e| format!("node {id}: {e}"))?;
        rows.push(SimulateRow {
            node_id: id.to_string(),
            n: p.len(),
            model: report.model,
            mean: report.mean,
            std_error: report.std_error,
            ci95_low: report.ci95_low,
            ci95_high: report.ci95_high,
            reps: report.reps,
            seed: report.seed,
        });
    }
    emit_rows(&rows, args.format)?;
    Ok(0)
}

fn run_converge(args: ConvergeArgs) -> Result<i32, String> {
    let topology = read_topology(&args.input)?;
    let (id, p) = match &args.node {
        Some(id) => {
            let p = topology
                .get(id)
                .ok_or_else(|| format!("node {id} not found in the topology"))?;
            (id.as_str(), p)
        }
        None => {
            if topology.len() != 1 {
                let ids: Vec<&str> = topology.nodes().map(|(id, _)| id).collect();
                return Err(format!(
                    "topology has {} nodes; pick one with --node (available: {})",
                    topology.len(),
                    ids.join(", ")
                ));
            }
            topology.nodes().next().expect("one node")
        }
    };
    let trace = iterate_average(p.values(), args.tol, args.max_iters)
        .map_err(|e| format!("node {id}: {e}"))?;
    output::emit_convergence(id, &trace, args.format)
}

impl Tabular for AnalysisRow {
    const HEADER: &'static [&'static str] = &[
        "node_id",
        "n",
        "exact",
        "bound",
        "gap",
        "sim_mean",
        "sim_ci95_low",
        "sim_ci95_high",
        "error",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::text(&self.node_id),
            Cell::Int(self.n as u64),
            Cell::OptFloat(self.exact),
            Cell::Float(self.bound),
            Cell::OptFloat(self.gap),
            Cell::OptFloat(self.sim_mean),
            Cell::OptFloat(self.sim_ci95_low),
            Cell::OptFloat(self.sim_ci95_high),
            Cell::OptText(self.error.clone()),
        ]
    }
}

fn run_analyze(args: AnalyzeArgs) -> Result<i32, String> {
    let topology = read_topology(&args.input)?;
    let options = AnalysisOptions {
        exact: !args.no_exact,
        max_exact_n: args.max_exact_n,
        simulation: args.simulate.then_some(SimulationOptions {
            model: TimeModel::from(args.model),
            reps: args.reps,
            seed: args.seed,
        }),
    };
    let rows = analyze_topology(&topology, &options);
    emit_rows(&rows, args.format)?;
    Ok(0)
}
