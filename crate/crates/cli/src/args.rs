use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "expcycle",
    version,
    about = "Cycles and bit statistics of u -> g^u mod p"
)]
pub struct Cli {
    /// Output format; defaults to csv for `survey` and json elsewhere
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the payload to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Memory budget in bytes for scratch tables
    #[arg(long, global = true, env = "EXPCYCLE_MEM_BUDGET")]
    pub mem_budget: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map parameters, the trajectory of --u0, and optionally the full cycle structure
    Analyze(AnalyzeArgs),
    /// Period of the k-bit sequence along a trajectory
    Tau(BitArgs),
    /// Number of distinct k-bit strings among the first N trajectory values
    Nu(NuArgs),
    /// Frequency table of k-bit strings along a trajectory
    Freq(FreqArgs),
    /// Number of u with u = f^k(u)
    Fixed(FixedArgs),
    /// Count u with a*u in I and b*g^u in J (mod p)
    Rcount(RcountArgs),
    /// Sumset and productset sizes of a set of residues
    Sumprod(SumprodArgs),
    /// Cycle statistics over random (p, g) pairs from [2^(m-1), 2^m - 1]
    Survey(SurveyArgs),
    /// Average fixed-point counts over primes up to --q
    Artin(ArtinArgs),
    /// Observed quantities against every bound over a (p, g, u0, k) grid
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub g: u64,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long)]
    pub u0: Option<u64>,
    /// Include the cycle decomposition (g must be a primitive root)
    #[arg(long)]
    pub cycles: bool,
}

#[derive(Debug, Args)]
pub struct BitArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long)]
    pub u0: u64,
    #[arg(long)]
    pub k: u32,
}

#[derive(Debug, Args)]
pub struct NuArgs {
    #[command(flatten)]
    pub bits: BitArgs,
    /// Prefix length; the whole trajectory when omitted
    #[arg(long)]
    pub n: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FreqArgs {
    #[command(flatten)]
    pub bits: BitArgs,
    /// Report the strings seen at least this often
    #[arg(long, default_value_t = 2)]
    pub threshold: u64,
}

#[derive(Debug, Args)]
pub struct FixedArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Permit k > 3
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Args)]
pub struct RcountArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long)]
    pub a: u64,
    #[arg(long)]
    pub b: u64,
    #[arg(long)]
    pub i_start: u64,
    #[arg(long)]
    pub i_len: u64,
    #[arg(long)]
    pub j_start: u64,
    #[arg(long)]
    pub j_len: u64,
}

#[derive(Debug, Args)]
pub struct SumprodArgs {
    #[arg(long)]
    pub p: u64,
    /// Comma-separated residues
    #[arg(long, value_delimiter = ',', required = true)]
    pub set: Vec<u64>,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub pairs: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArtinSelect {
    Primitive,
    All,
    Both,
}

#[derive(Debug, Args)]
pub struct ArtinArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, value_enum, default_value_t = ArtinSelect::Both)]
    pub mode: ArtinSelect,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Comma-separated primes
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<u64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub g: Vec<u64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub u0: Vec<u64>,
    /// Bit widths; 1..=min(bitlen(p), 32) when omitted
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<u32>,
    #[arg(long, default_value_t = 2)]
    pub threshold: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}
