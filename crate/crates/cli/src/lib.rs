//! The `genmr` command line.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 query error (parse or
//! compile, and malformed arguments), 3 infeasible configuration (capacity
//! or placement), 4 I/O (including unreadable or ragged CSV input).

mod bench;
mod commands;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use genmr_core::{PartitionMode, PlacementStrategy, RoundingMode};
use genmr_sql::Dialect;

pub use bench::{parse_queries_file, BenchQuery, BENCH_HEADER};

/// Names the JSON cost-model file that replaces the built-in defaults.
pub const COST_MODEL_ENV: &str = "GENMR_COST_MODEL";

#[derive(Debug, Parser)]
#[command(
    name = "genmr",
    version,
    about = "Compile SQL-dialect queries to MapReduce and run them on a simulated cluster"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the MapReduce plan and the query form.
    Explain(ExplainArgs),
    /// Run a query and write the JSON execution report.
    Query(QueryArgs),
    /// Run a query and compare the result with the reference evaluator.
    Verify(QueryArgs),
    /// Print the reference evaluator's result as JSON.
    Oracle(OracleArgs),
    /// Run a query x capacity x mode x strategy matrix and write CSV.
    Bench(BenchArgs),
    /// Write the seeded synthetic teachers table.
    Fixture(FixtureArgs),
}

#[derive(Debug, Clone, Args)]
pub struct QuerySource {
    /// Query text.
    #[arg(
        long,
        conflicts_with = "query_file",
        required_unless_present = "query_file"
    )]
    pub query: Option<String>,
    /// File holding the query text.
    #[arg(long)]
    pub query_file: Option<PathBuf>,
    #[arg(long, default_value_t = Dialect::Sql)]
    pub dialect: Dialect,
}

#[derive(Debug, Clone, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub source: QuerySource,
    /// Table to compile against. Without it the schema is the query's own
    /// columns.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub source: QuerySource,
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub racks: u32,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    pub nodes_per_rack: u32,
    /// Rows per datanode.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    pub capacity: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub reducers: u32,
    #[arg(long, default_value_t = RoundingMode::Ceil)]
    pub rounding: RoundingMode,
    #[command(flatten)]
    pub cost: CostArgs,
    /// Worker threads (default: available parallelism). Never affects output.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
}

/// Per-field cost overrides in milli-units, applied after the
/// `GENMR_COST_MODEL` file.
#[derive(Debug, Clone, Default, Args)]
pub struct CostArgs {
    #[arg(long)]
    pub t_map: Option<u64>,
    #[arg(long)]
    pub t_reduce: Option<u64>,
    #[arg(long)]
    pub t_local: Option<u64>,
    #[arg(long)]
    pub t_intra: Option<u64>,
    #[arg(long)]
    pub t_inter: Option<u64>,
    #[arg(long)]
    pub t_start: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub source: QuerySource,
    #[arg(long)]
    pub csv: PathBuf,
    #[command(flatten)]
    pub cluster: ClusterArgs,
    #[arg(long, default_value_t = PartitionMode::InterRack)]
    pub mode: PartitionMode,
    #[arg(long, default_value_t = PlacementStrategy::Colocated)]
    pub strategy: PlacementStrategy,
    /// Report (or diff) destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the row-to-datanode assignment as JSON.
    #[arg(long)]
    pub layout_out: Option<PathBuf>,
    /// Also write mapper and reducer placement as JSON.
    #[arg(long)]
    pub placement_out: Option<PathBuf>,
    /// Test hook: lose one record in the shuffle.
    #[arg(long, hide = true)]
    pub inject_drop_record: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// One query per line; `#` starts a comment; `dialect:` prefixes allowed.
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long)]
    pub csv: PathBuf,
    #[command(flatten)]
    pub cluster: ClusterArgs,
    #[arg(long, value_delimiter = ',', default_value = "10,30,50", value_parser = clap::value_parser!(u32).range(1..))]
    pub capacities: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "colocated")]
    pub strategies: Vec<PlacementStrategy>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FixtureArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 325)]
    pub rows: usize,
    /// Destination file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command: the message for stderr and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub const MISMATCH: i32 = 1;
    pub const QUERY: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const IO: i32 = 4;

    pub fn new(code: i32, message: impl fmt::Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Failure::QUERY } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Explain(a) => commands::explain(&a),
        Command::Query(a) => commands::query(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Oracle(a) => commands::oracle(&a),
        Command::Bench(a) => bench::bench(&a),
        Command::Fixture(a) => commands::fixture(&a),
    }
}
