//! `hornmc`: count, optimize, sweep, generate and emit polynomial evaluation code.

mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hornmc::Direction;
use serde::Serialize;

/// Environment variable naming the directory for cached resultants.
pub const CACHE_DIR_ENV: &str = "HORNMC_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "hornmc", version, about = "Find cheap evaluation schemes for sparse polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Operation counts of the expanded polynomial.
    Count(CountArgs),
    /// Pick a variable order, apply Horner and CSE, and emit the code.
    Optimize(OptimizeArgs),
    /// Run MCTS over a grid of cp and N values and print CSV rows.
    Sweep(SweepArgs),
    /// Write a benchmark polynomial.
    Generate(GenerateArgs),
    /// Convert three-address code to another format.
    Emit(EmitArgs),
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Polynomial file (the whole file is one polynomial).
    #[arg(conflicts_with_all = ["expr", "resultant"])]
    input: Option<PathBuf>,
    /// Inline polynomial text.
    #[arg(long, conflicts_with = "resultant")]
    expr: Option<String>,
    /// Use the resultant of generic polynomials of degrees M and N.
    #[arg(long, num_args = 2, value_names = ["M", "N"])]
    resultant: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Print the JSON stats document instead of one line of text.
    #[arg(long)]
    json: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Method {
    Occurrence,
    Random,
    Mcts,
    Exhaustive,
    GivenOrder,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Tac,
    C,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum EmitFormat {
    Tac,
    C,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum DirectionArg {
    Front,
    Back,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Front => Direction::Front,
            DirectionArg::Back => Direction::Back,
        }
    }
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = Method::Mcts)]
    method: Method,
    /// Comma-separated variable order for `given-order`.
    #[arg(long)]
    order: Option<String>,
    /// MCTS expansions, or samples for `random`.
    #[arg(long, default_value_t = 1000)]
    mcts_n: usize,
    #[arg(long, default_value_t = 1.0)]
    cp: f64,
    /// Defaults to front for `--resultant` inputs and back otherwise.
    #[arg(long, value_enum)]
    direction: Option<DirectionArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest variable count `exhaustive` accepts.
    #[arg(long, default_value_t = hornmc::search::DEFAULT_EXHAUSTIVE_LIMIT)]
    max_exhaustive_vars: usize,
    #[arg(long, value_enum, default_value_t = Format::Tac)]
    format: Format,
    /// Function name for C output.
    #[arg(long, default_value = "evaluate")]
    name: String,
    /// Write the code here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the JSON stats document here.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Include the per-expansion trace in the stats.
    #[arg(long)]
    trace: bool,
    /// Include wall time in the stats (makes output run dependent).
    #[arg(long)]
    wall_time: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// cp values, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    sweep_cp: Vec<f64>,
    /// Expansion budgets, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    sweep_n: Vec<usize>,
    /// Seeds per (cp, N) cell; seed k of a cell is `--seed` + k.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    direction: Option<DirectionArg>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a JSON document with the config and rows here.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(subcommand)]
    kind: GenerateKind,
    /// Write the polynomial here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum GenerateKind {
    /// Resultant of generic polynomials of degrees M and N.
    Resultant { m: usize, n: usize },
    /// Sum of products drawn from a shared pool of factors.
    Structured {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        max_degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        pool: Option<usize>,
        #[arg(long)]
        factors: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct EmitArgs {
    /// Three-address code file.
    tac: PathBuf,
    #[arg(long, value_enum, default_value_t = EmitFormat::C)]
    format: EmitFormat,
    #[arg(long, default_value = "evaluate")]
    name: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(run::exit_code(&e))
        }
    }
}
