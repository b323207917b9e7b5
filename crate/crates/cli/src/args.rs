use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "polya", version, about = "Pólya threshold graph experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample one realisation; writes graph.json and edges.csv.
    Generate(GenerateArgs),
    /// Degree law of one node; writes degree.csv.
    DegreeDist(DegreeArgs),
    /// Expected and/or empirical decay centrality; writes centrality.csv.
    Centrality(CentralityArgs),
    /// Laplacian spectrum and eigenpair check; writes spectrum.csv.
    Spectrum(SpectrumArgs),
    /// Averaging dynamics on one realisation; writes trajectory.csv.
    Consensus(ConsensusArgs),
    /// Expected consensus weights; writes pi_e.csv.
    PiE(PiEArgs),
    /// Consensus values over repeated runs; writes histogram.csv.
    Histogram(HistogramArgs),
    /// Expected consensus versus memory length; writes sweep.csv.
    MemorySweep(SweepArgs),
    /// Runs the oracle-equivalence suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PiEMethod {
    Exact,
    Mc,
}

/// Urn parameters: either ball counts or proportions.
#[derive(Debug, Clone, Args)]
pub struct UrnArgs {
    /// Initial red balls.
    #[arg(long = "R", value_name = "R")]
    pub red: Option<f64>,
    /// Initial black balls.
    #[arg(long = "B", value_name = "B")]
    pub black: Option<f64>,
    /// Balls of the drawn colour added per draw (the count Δ).
    #[arg(long = "delta-balls", value_name = "DELTA")]
    pub delta_balls: Option<f64>,
    /// Initial red proportion ρ = R/(R+B).
    #[arg(long)]
    pub rho: Option<f64>,
    /// Reinforcement ratio δ = Δ/(R+B).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Finite memory length M.
    #[arg(long)]
    pub memory: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output directory.
    #[arg(long, env = "POLYA_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct Execution {
    /// Run heavy loops on one thread.
    #[arg(long)]
    pub sequential: bool,
}

/// `--force-last-universal` / `--no-force-last-universal`; the default
/// depends on the subcommand.
#[derive(Debug, Clone, Args)]
pub struct LastNode {
    /// Force the last node to be universal (z_n = 1).
    #[arg(long, overrides_with = "no_force_last_universal")]
    pub force_last_universal: bool,
    #[arg(long, overrides_with = "force_last_universal")]
    pub no_force_last_universal: bool,
}

impl LastNode {
    pub fn resolve(&self, default: bool) -> bool {
        if self.force_last_universal {
            true
        } else if self.no_force_last_universal {
            false
        } else {
            default
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub urn: UrnArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub last: LastNode,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct DegreeArgs {
    #[command(flatten)]
    pub urn: UrnArgs,
    #[arg(long)]
    pub n: usize,
    /// Node index, 1-based.
    #[arg(long)]
    pub i: usize,
    #[command(flatten)]
    pub last: LastNode,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    #[command(flatten)]
    pub urn: UrnArgs,
    #[arg(long)]
    pub n: Option<usize>,
    /// Node index; all nodes when omitted.
    #[arg(long)]
    pub i: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Creation sequence (e.g. 10010) for empirical centrality.
    #[arg(long)]
    pub draws: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub urn: UrnArgs,
    /// Creation sequence; sampled from the urn when omitted.
    #[arg(long)]
    pub draws: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub last: LastNode,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ConsensusArgs {
    #[command(flatten)]
    pub urn: UrnArgs,
    /// Creation sequence; sampled from the urn when omitted.
    #[arg(long)]
    pub draws: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial opinions: a comma list, @file, or paper-n10 | paper-n100 | polarized.
    #[arg(long)]
    pub x0: String,
    #[arg(long, default_value_t = 10_000)]
    pub t_max: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Keep running to t_max after convergence.
    #[arg(long)]
    pub full: bool,
    #[command(flatten)]
    pub last: LastNode,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PiEArgs {
    #[command(flatten)]
    pub urn: UrnArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = PiEMethod::Exact)]
    pub mode: PiEMethod,
    #[arg(long, default_value_t = 100_000)]
    pub runs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest horizon enumerated in exact mode.
    #[arg(long, default_value_t = 24)]
    pub limit: usize,
    /// Also report π^(E)·x0.
    #[arg(long)]
    pub x0: Option<String>,
    #[command(flatten)]
    pub last: LastNode,
    #[command(flatten)]
    pub exec: Execution,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    #[command(flatten)]
    pub urn: UrnArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub runs: u64,
    /// Step at which the node-averaged opinion is recorded.
    #[arg(long, default_value_t = 100)]
    pub t: usize,
    #[arg(long, default_value = "paper-n10")]
    pub x0: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo runs for the theoretical value when n exceeds --limit.
    #[arg(long, default_value_t = 100_000)]
    pub theory_runs: u64,
    #[arg(long, default_value_t = 24)]
    pub limit: usize,
    #[command(flatten)]
    pub last: LastNode,
    #[command(flatten)]
    pub exec: Execution,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub urn: UrnArgs,
    #[arg(long)]
    pub n: usize,
    /// Reinforcement ratios δ.
    #[arg(long, value_delimiter = ',', default_value = "0.2,1,10")]
    pub deltas: Vec<f64>,
    /// Memory lengths; defaults to 1, 2, 5, 10, … up to n.
    #[arg(long, value_delimiter = ',')]
    pub memories: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub runs: u64,
    #[arg(long, default_value = "polarized")]
    pub x0: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub last: LastNode,
    #[command(flatten)]
    pub exec: Execution,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub exec: Execution,
}
