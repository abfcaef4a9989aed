use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "misinfo", version, about = "Consensus and misinformation analysis for gossip networks with forceful agents")]
pub struct Cli {
    /// Master seed for every random choice (simulation, random graphs).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cross-check tolerance, also the simulator's consensus threshold.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tolerance: f64,
    /// Require exhaustive cut enumeration (fails above the node limit).
    /// Without it, cuts are exact up to the limit and heuristic beyond.
    #[arg(long, global = true)]
    pub exact_cuts: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the modelling assumptions of a network file.
    Validate { path: PathBuf },
    /// Write a network from one of the built-in families.
    Generate(GenerateArgs),
    /// Full report: consensus, excess influence, bounds, bridges.
    Analyze(AnalyzeArgs),
    /// Misinformation and commute-time bounds against their actual values.
    Bounds {
        path: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
    },
    /// Iterative cut descent bounding the commute time of a pair.
    Cluster { path: PathBuf, a: usize, b: usize },
    /// Monte Carlo runs of the gossip process.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Dyad,
    Complete,
    Ring,
    Path,
    Barbell,
    Bridged,
    Example2,
    RandomRegular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Case {
    A,
    B,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    pub kind: Kind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    /// Cluster sizes for `bridged`.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, value_enum)]
    pub case: Option<Case>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// `FORCEFUL:INFLUENCED:ALPHA`, repeatable.
    #[arg(long = "forceful")]
    pub forceful: Vec<String>,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    pub path: PathBuf,
    /// Initial beliefs, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Estimate consensus weights from this many trials per agent.
    #[arg(long)]
    pub simulate: Option<usize>,
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub cluster: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_events: u64,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub path: PathBuf,
    /// Run one trajectory from these beliefs instead of estimating weights.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_events: u64,
    /// Keep every k-th spread value in traces.
    #[arg(long, default_value_t = 100)]
    pub decimation: u64,
    /// Mean spread per n^2-event window over `trials` paths from `--x0`.
    #[arg(long, requires = "x0")]
    pub decay: bool,
}
