//! Command-line grammar.
//!
//! Every numeric option is an `Option` so that a value given on the command
//! line can be told apart from one that should come from the configuration
//! file or the built-in default.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "polyphase",
    version,
    about = "Polynomial phase gates for GKP codes: synthesis, circuit checks and Fock-space benchmarks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// INI-style configuration file; `[global]` and per-command sections,
    /// keys named like the long flags.  Flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory of the on-disk operator cache.
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Complex precision of cached operators on disk: 128 (two f64) or 64
    /// (two f32, smaller files, ~1e-7 relative rounding).
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Output file (written atomically); standard output when absent.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Seed for the stochastic checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal polynomial representations of diagonal logical gates.
    Synth(SynthArgs),
    /// Gaussian circuit identities and the determinant no-go check.
    VerifyCircuits(VerifyArgs),
    /// Average-gate-fidelity sweep over (n̄, λ).
    Sweep(SweepArgs),
    /// Vacuum-state magic-state preparation with syndrome postselection.
    Vacuum(VacuumArgs),
    /// Closed-form moments of the twirled gate error.
    Moments(MomentsArgs),
    /// Fault-tolerance lower bound on the cubic gate fidelity.
    FtBound(FtBoundArgs),
    /// Twirled error density of the cubic gate on a grid over the patch.
    TwirlDensity(TwirlArgs),
    /// Operator cache management.
    Cache(CacheArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Clifford-hierarchy level `m` of the target `diag(1, e^{2πi/2^m})`.
    #[arg(long)]
    pub level: Option<i64>,
    /// Reduce this polynomial instead: coefficients from the constant term
    /// up, e.g. `0,-1/4,1/8,1/4`.
    #[arg(long, value_name = "COEFFS", allow_hyphen_values = true)]
    pub poly: Option<String>,
    /// Number of qubits for the multi-controlled gate `C^{N−1}Λ_m`.
    #[arg(long)]
    pub qubits: Option<i64>,
    /// Starting representation for `--level`: `power` (`x^{2^{m−1}}/2^m`) or
    /// `lift:<file>`, squaring a level-(m−1) polynomial read from a file
    /// (a previous `synth` JSON output or comma-separated coefficients).
    #[arg(long, value_name = "power|lift:FILE")]
    pub start: Option<String>,
    /// Print the benchmark gate table.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Random circuits per Δ in the no-go check.
    #[arg(long)]
    pub nogo_count: Option<usize>,
    /// Largest number of ancillas in the random circuits.
    #[arg(long)]
    pub max_ancilla: Option<usize>,
    /// Comma-separated Δ values for the no-go check.
    #[arg(long, value_delimiter = ',')]
    pub delta: Option<Vec<f64>>,
}

#[derive(Debug, Args, Clone)]
pub struct TruncationArgs {
    /// Fock dimension of the codewords.
    #[arg(long)]
    pub dinit: Option<usize>,
    /// Ratio of the temporary and output dimensions to the input one.
    #[arg(long)]
    pub expand_factor: Option<usize>,
    /// Odd-term cutoff of the Pauli readout sums.
    #[arg(long)]
    pub ncut: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Gates to sweep (repeatable or comma-separated):
    /// T3, TGKP, T4, sqrtT, T4th, T4th-mirror, T8th, I, I-as-T8th.
    #[arg(long, value_delimiter = ',')]
    pub gate: Option<Vec<String>>,
    #[arg(long)]
    pub nbar_min: Option<f64>,
    #[arg(long)]
    pub nbar_max: Option<f64>,
    #[arg(long)]
    pub nbar_step: Option<f64>,
    #[arg(long)]
    pub lam_min: Option<f64>,
    #[arg(long)]
    pub lam_max: Option<f64>,
    #[arg(long)]
    pub lam_count: Option<usize>,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    /// Disable the readout noise `tanh(Δ²/2)·diag(λ, 1/λ)`.
    #[arg(long)]
    pub no_smear: bool,
    /// Also write the per-(gate, n̄) optima and the λ_opt(n̄) fits as JSON.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VacuumArgs {
    /// Comma-separated Δ values.
    #[arg(long, value_delimiter = ',')]
    pub delta: Option<Vec<f64>>,
    /// Syndrome cells per patch axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Comma-separated accepted fractions p ∈ [0, 1]; 0 is the best cell.
    #[arg(long, value_delimiter = ',')]
    pub postselect: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Tabulated gate (default T3).
    #[arg(long)]
    pub gate: Option<String>,
    /// Explicit polynomial, coefficients from the constant term up.
    #[arg(long, value_name = "COEFFS", allow_hyphen_values = true)]
    pub poly: Option<String>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub lam: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FtBoundArgs {
    /// Comma-separated Δ values.
    #[arg(long, value_delimiter = ',')]
    pub delta: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct TwirlArgs {
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub lam: Option<f64>,
    /// Points per patch axis.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CacheArgs {
    #[command(subcommand)]
    pub action: CacheAction,
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// List cache files with their headers.
    List,
    /// Delete every cache file.
    Purge,
    /// Build the Pauli measurement operators of a sweep grid.
    Prewarm(PrewarmArgs),
}

#[derive(Debug, Args)]
pub struct PrewarmArgs {
    #[arg(long)]
    pub nbar_min: Option<f64>,
    #[arg(long)]
    pub nbar_max: Option<f64>,
    #[arg(long)]
    pub nbar_step: Option<f64>,
    #[arg(long)]
    pub lam_min: Option<f64>,
    #[arg(long)]
    pub lam_max: Option<f64>,
    #[arg(long)]
    pub lam_count: Option<usize>,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[arg(long)]
    pub no_smear: bool,
}
