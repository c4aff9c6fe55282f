use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use snn_ldpc::decoder::{Algorithm, ScnuBackend};

#[derive(Debug, Parser)]
#[command(name = "snn-ldpc", version, about = "LDPC decoding with spiking check-node updates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a random regular code without 4-cycles and write it as alist
    Construct(ConstructArgs),
    /// Monte Carlo BER/FER over an Eb/N0 grid
    Simulate(SimulateArgs),
    /// Line search over theta1 with theta2 = gamma * theta1
    Sweep(SweepArgs),
    /// Tabulate the SCNU staircase
    Characterize(CharacterizeArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML config file; flags override its values
    #[arg(short, long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for outputs without an explicit path
    #[arg(long, env = "SNN_LDPC_OUT_DIR", global = true)]
    pub out_dir: Option<PathBuf>,
    /// Output file
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Block length
    #[arg(long)]
    pub n: Option<usize>,
    /// Variable node degree
    #[arg(long)]
    pub dv: Option<usize>,
    /// Check node degree
    #[arg(long)]
    pub dc: Option<usize>,
    /// Construction seed
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_restarts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    /// Parity-check matrix in alist format
    #[arg(long, value_name = "ALIST")]
    pub code: Option<PathBuf>,
    /// Declared dimension of an alist code (default: N - M)
    #[arg(long, requires = "code")]
    pub k: Option<usize>,
    /// Construct a regular code of this length instead of loading one
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub dv: Option<usize>,
    #[arg(long)]
    pub dc: Option<usize>,
    /// Seed of the constructed code
    #[arg(long)]
    pub code_seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Functional,
    SnnEmulation,
}

impl From<BackendArg> for ScnuBackend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Functional => ScnuBackend::Functional,
            BackendArg::SnnEmulation => ScnuBackend::SnnEmulation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReliabilityArg {
    Matched,
    Fixed,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
        format!("unknown decoder '{s}' (expected one of {})", names.join(", "))
    })
}

#[derive(Debug, Args)]
pub struct DecoderArgs {
    /// spa, ms, oms, nms, elena or ml-elena
    #[arg(long, value_parser = parse_algorithm)]
    pub decoder: Option<Algorithm>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// NMS scaling factor
    #[arg(long)]
    pub lambda: Option<f64>,
    /// OMS offset
    #[arg(long)]
    pub offset: Option<f64>,
    /// Number of SCNU levels
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub theta1: Option<f64>,
    #[arg(long)]
    pub theta2: Option<f64>,
    /// Sets theta2 = gamma * theta1
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    /// Memory neuron steps per decoding iteration
    #[arg(long)]
    pub memory_steps: Option<usize>,
    /// Stop as soon as the syndrome is zero
    #[arg(long)]
    pub early_stop: bool,
}

#[derive(Debug, Args)]
pub struct StopArgs {
    /// Stop a point after this many bit errors
    #[arg(long)]
    pub min_errors: Option<u64>,
    #[arg(long)]
    pub min_codewords: Option<u64>,
    #[arg(long)]
    pub max_codewords: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Master seed for the channel noise
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    #[command(flatten)]
    pub stop: StopArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated Eb/N0 values in dB
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub ebn0: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub reliability: Option<ReliabilityArg>,
    /// Design Eb/N0 (dB) for fixed reliability
    #[arg(long)]
    pub design_ebn0: Option<f64>,
    /// Code rate used for Eb/N0 (default: k / n)
    #[arg(long)]
    pub rate: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub stop: StopArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Operating and design point in dB
    #[arg(long)]
    pub design_ebn0: Option<f64>,
    /// Comma-separated theta1 grid (default 0.1, 0.2, ..., 4.0)
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub theta1: Option<Vec<f64>>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
}

#[derive(Debug, Args)]
pub struct CharacterizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub theta1: Option<f64>,
    #[arg(long)]
    pub theta2: Option<f64>,
    #[arg(long, conflicts_with = "theta2")]
    pub gamma: Option<f64>,
    /// Largest magnitude on the grid (default: (levels + 1) * theta1)
    #[arg(long)]
    pub max_mag: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    pub points: Option<usize>,
}
