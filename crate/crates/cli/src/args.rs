use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use seqfab::vmpo::{InitStrategy, Schedule, UpdateRule};

#[derive(Debug, Parser)]
#[command(name = "seqfab", version, about = "Sequential ancilla-assisted gate analysis and decomposition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Operator-Schmidt analysis of a gate across a qubit cut.
    Analyze(AnalyzeArgs),
    /// Best sequential approximation of a gate.
    Decompose(DecomposeArgs),
    /// Reproduce the six-gate fidelity table.
    Table1(Table1Args),
    /// Decoupling witness of a two-step sequential dilation.
    Witness(WitnessArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Gate name (CNOT, CZ, CPHASE, SWAP, TOFFOLI, FREDKIN) or matrix JSON file.
    pub gate: String,
    /// Number of leading qubits on the left side of the cut.
    #[arg(long, default_value_t = 1)]
    pub cut: usize,
    /// CPHASE angle in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub phase: Option<f64>,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 2)]
    pub ancilla_dim: usize,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, env = "SEQFAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of sweeps per restart.
    #[arg(long, default_value_t = 500)]
    pub sweeps: usize,
    /// Sweep-to-sweep cost decrease that counts as converged.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = UpdateArg::Procrustes)]
    pub update: UpdateArg,
    #[arg(long, value_enum, default_value_t = InitArg::Haar)]
    pub init: InitArg,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Alternating)]
    pub schedule: ScheduleArg,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Gate name or matrix JSON file.
    pub gate: String,
    #[command(flatten)]
    pub opt: OptimizerArgs,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    /// CPHASE angle in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub phase: Option<f64>,
    /// Manifest JSON output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional CSV of the per-sweep cost of the best restart.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[command(flatten)]
    pub opt: OptimizerArgs,
    /// Output file; `.json` selects JSON, anything else CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// Matrix file for the first step (qubit 1 with the ancilla).
    #[arg(required_unless_present = "random", requires = "u2a")]
    pub u1a: Option<PathBuf>,
    /// Matrix file for the second step (qubit 2 with the ancilla).
    pub u2a: Option<PathBuf>,
    /// Draw both steps Haar-randomly instead of reading files.
    #[arg(long, conflicts_with = "u1a")]
    pub random: bool,
    #[arg(long, default_value_t = 2)]
    pub ancilla_dim: usize,
    #[arg(long, env = "SEQFAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UpdateArg {
    Procrustes,
    PauliGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Haar,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Alternating,
    SameDirection,
}

impl From<UpdateArg> for UpdateRule {
    fn from(u: UpdateArg) -> Self {
        match u {
            UpdateArg::Procrustes => UpdateRule::Procrustes,
            UpdateArg::PauliGradient => UpdateRule::PauliGradient,
        }
    }
}

impl From<InitArg> for InitStrategy {
    fn from(i: InitArg) -> Self {
        match i {
            InitArg::Haar => InitStrategy::HaarRandom,
            InitArg::Identity => InitStrategy::Identity,
        }
    }
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Alternating => Schedule::Alternating,
            ScheduleArg::SameDirection => Schedule::SameDirection,
        }
    }
}
