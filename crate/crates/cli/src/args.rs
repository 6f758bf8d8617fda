use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cesaro", version, about = "Exact verification of posinormality identities for Cesàro matrices")]
pub struct Cli {
    /// TOML file with defaults for the global options.
    #[arg(long, global = true, env = "CESARO_CONFIG")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file, or a directory to receive `<command>.<ext>`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print one matrix entry, or its rational-function form.
    Entry(EntryArgs),
    /// Check MM* = M*PM and the contraction property.
    Verify(VerifyArgs),
    /// Symbolic verification for a range of orders N >= 5.
    Conjecture(RangeArgs),
    /// Per-vector hyponormality certificates.
    Certify(CertifyArgs),
    /// Print the telescoping antidifference coefficients.
    Telescope(TelescopeArgs),
    /// Print the finite-sum expansion and its Faulhaber closed form.
    Faulhaber(OrderArg),
}

#[derive(Debug, Args)]
pub struct OrderArg {
    #[arg(long)]
    pub order: u32,
}

#[derive(Debug, Args)]
pub struct EntryArgs {
    #[arg(long)]
    pub order: u32,
    #[arg(long, required_unless_present = "symbolic")]
    pub i: Option<u64>,
    #[arg(long, required_unless_present = "symbolic")]
    pub j: Option<u64>,
    /// Print the entry as a rational function on j <= i.
    #[arg(long)]
    pub symbolic: bool,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[arg(long)]
    pub from: u32,
    #[arg(long)]
    pub to: u32,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with_all = ["from", "to"], required_unless_present_all = ["from", "to"])]
    pub order: Option<u32>,
    #[arg(long, requires = "to")]
    pub from: Option<u32>,
    #[arg(long, requires = "from")]
    pub to: Option<u32>,
    /// Compare closed forms as rational functions (default).
    #[arg(long, conflicts_with = "grid")]
    pub symbolic: bool,
    /// Compare entries on 0 <= i <= j <= G.
    #[arg(long, value_name = "G")]
    pub grid: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub order: u32,
    /// Inline vector, e.g. `0:1,3:-1/2`.
    #[arg(long, conflicts_with = "seed", required_unless_present = "seed")]
    pub vector: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest support size of generated vectors.
    #[arg(long, default_value_t = 10)]
    pub support: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Maximum number of terms of ||Mf||^2 to accumulate.
    #[arg(long)]
    pub cap: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TelescopeArgs {
    #[arg(long)]
    pub order: u32,
    /// Solve at a fixed cell instead of symbolically; also sums the series.
    #[arg(long, requires = "j")]
    pub i: Option<u64>,
    #[arg(long, requires = "i")]
    pub j: Option<u64>,
    /// Width of the numeric enclosure, as `1e-10` or `p/q`.
    #[arg(long, requires = "i")]
    pub tol: Option<String>,
}
