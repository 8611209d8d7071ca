//! Command-line grammar.

use std::path::PathBuf;

use capcalc_core::classes::ExceptionalClass;
use capcalc_core::num::{parse_rational, Rational};
use clap::{Args, Parser, Subcommand, ValueEnum};

fn rational(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

fn class(text: &str) -> Result<ExceptionalClass, String> {
    text.parse().map_err(|e: capcalc_core::classes::ClassError| e.to_string())
}

fn positive(text: &str) -> Result<i64, String> {
    match text.parse::<i64>() {
        Ok(n) if n > 0 => Ok(n),
        Ok(n) => Err(format!("must be positive, got {n}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Closed form only.
    Closed,
    /// Search over candidate classes only (48/7 ≤ a ≤ 9).
    Search,
    /// Closed form, cross-checked by the search where it applies.
    Both,
}

/// Exact computation of the ellipsoid embedding capacity function c(a).
#[derive(Debug, Parser)]
#[command(name = "capcalc", version, about)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "json")]
    pub format: Format,

    /// Worker threads for the parallel searches.
    #[arg(long, global = true, env = "CAPCALC_JOBS", value_parser = positive)]
    pub jobs: Option<i64>,

    /// Optional `key = value` file with default search bounds.
    #[arg(long, global = true, env = "CAPCALC_CONFIG")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// c(a) for a rational a ≥ 1, with its regime and witnessing classes.
    Capacity(CapacityArgs),
    /// Exceptional classes found by the point or interval search.
    Classes(ClassesArgs),
    /// Cremona reduction of a class, with the full trace.
    Reduce(ReduceArgs),
    /// The Fibonacci stairs table.
    Stairs(StairsArgs),
    /// Lattice-point counts and k-values of triangles.
    Ech(EchArgs),
    /// Sampled graph of c with its exact breakpoints.
    Graph(GraphArgs),
    /// Run named verification checks (all of them by default).
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// The point a, as `p/q` or an integer.
    #[arg(value_parser = rational)]
    pub a: Rational,
    #[arg(long, value_enum, default_value = "both")]
    pub method: Method,
    /// Degree bound of the point search.
    #[arg(long = "dmax", value_parser = positive)]
    pub d_max: Option<i64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "query")]
pub struct ClassQuery {
    /// Classes of degree ≤ dmax obstructive at this point.
    #[arg(long, value_parser = rational)]
    pub at: Option<Rational>,
    /// Classes with centres in [7 + 1/(k+1), 7 + 1/k].
    #[arg(long, value_parser = positive)]
    pub interval: Option<i64>,
}

#[derive(Debug, Args)]
pub struct ClassesArgs {
    #[command(flatten)]
    pub query: ClassQuery,
    /// Degree bound (defaults from the configuration).
    #[arg(long = "dmax", value_parser = positive)]
    pub d_max: Option<i64>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// A class `d;m1,m2,…`, with optional `x^k` runs.
    #[arg(value_parser = class)]
    pub class: ExceptionalClass,
}

#[derive(Debug, Args)]
pub struct StairsArgs {
    /// Last step index.
    #[arg(long, default_value_t = 8)]
    pub n: i64,
}

#[derive(Debug, Args)]
pub struct EchArgs {
    /// Slope parameter a of the triangle.
    #[arg(long, value_parser = rational, required_unless_present = "verify_tables")]
    pub slope: Option<Rational>,
    /// A point (A, B) on the slant edge.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub anchor: Option<Vec<i64>>,
    /// Scan square anchor windows for a lower bound of K(a), up to this size.
    #[arg(long = "k-bound", value_parser = positive, conflicts_with = "anchor")]
    pub k_bound: Option<i64>,
    /// Recompute the lattice tables.
    #[arg(long, conflicts_with_all = ["slope", "anchor", "k_bound"])]
    pub verify_tables: bool,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long, value_parser = rational)]
    pub from: Rational,
    #[arg(long, value_parser = rational)]
    pub to: Rational,
    #[arg(long, value_parser = rational)]
    pub step: Rational,
    /// Write the samples as CSV to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Decimal places in the decimal column.
    #[arg(long, default_value_t = 12)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Checks to run; all when omitted.
    pub checks: Vec<String>,
    /// List the available checks and exit.
    #[arg(long)]
    pub list: bool,
    /// Include wall-clock timings (makes the output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}
