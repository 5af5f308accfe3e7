//! `csreg`: run the regularizer experiments and utilities from the shell.
//!
//! Every subcommand writes one artifact to `--out` and a manifest with the
//! full configuration to `<out>.manifest.json`. Exit status is 0 on success,
//! 2 on an invalid configuration and 1 when a solver aborts or I/O fails.

mod commands;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "csreg",
    version,
    about = "Cauchy–Schwarz regularizer experiments"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Base seed; trial t of sweep point r uses stream r·trials + t.
    #[arg(long, global = true, env = "CSREG_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Worker threads for trial execution (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Solver iteration cap per run.
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Random initializations per instance (default depends on the experiment).
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Relative iterate-change tolerance of the solver.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Use 1000 trials per sweep point instead of the desk-scale 100.
    #[arg(long, global = true)]
    pub paper_scale: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Success curve for binary / ternary recovery over a sweep of M.
    Recover(RecoverArgs),
    /// Success curve for sparse recovery over a sweep of the support size K.
    Sparse(SparseArgs),
    /// Eigenvector recovery success curve.
    Eigvec(EigvecArgs),
    /// Recovery of matrices with orthogonal columns.
    Ortho(OrthoArgs),
    /// Two-bit (four-level) recovery with the penalized equispaced regularizer.
    Twobit(TwobitArgs),
    /// Approximate MAX-CUT by box-constrained binarization.
    Maxcut(MaxcutArgs),
    /// Closed-form binarization or ternarization of a weight vector.
    Quantize(QuantizeArgs),
    /// Finite-difference check of every analytic gradient.
    Gradcheck(GradcheckArgs),
    /// Two-dimensional regularizer landscape on a square grid.
    Landscape(LandscapeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoverKind {
    SymBinary,
    OneSidedBinary,
    SymTernary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoverMethod {
    Bin,
    Osb,
    Ter,
    Bbin,
    BinExp,
    FixedScale,
    LinfDr,
    L1Dr,
    BinBetaFixed,
    BinBetaJoint,
}

#[derive(Debug, Args, Serialize)]
pub struct RecoverArgs {
    #[arg(long, value_enum, default_value = "sym-binary")]
    pub kind: RecoverKind,
    #[arg(long, value_enum, default_value = "bin")]
    pub reg: RecoverMethod,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Measurement counts: `lo:step:hi`, a comma list or a single value.
    #[arg(long, default_value = "30:10:90")]
    pub m: String,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Scale of the fixed-scale binarizer.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Target square of the fixed-β baseline.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value = "recover.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SparseKind {
    SparseOsb,
    SparseTer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SparseMethod {
    Osb,
    Ter,
    L1Dr,
}

#[derive(Debug, Args, Serialize)]
pub struct SparseArgs {
    #[arg(long, value_enum, default_value = "sparse-osb")]
    pub kind: SparseKind,
    #[arg(long, value_enum, default_value = "osb")]
    pub reg: SparseMethod,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 75)]
    pub m: usize,
    /// Support sizes: `lo:step:hi`, a comma list or a single value.
    #[arg(long, default_value = "20:10:80")]
    pub k: String,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value = "sparse.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EigvecArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value = "30:10:90")]
    pub m: String,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Run the joint `(x, μ)` least-squares baseline instead of the regularizer.
    #[arg(long)]
    pub baseline: bool,
    #[arg(long, default_value = "eigvec.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct OrthoArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value = "1,5,10")]
    pub m: String,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value = "ortho.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct TwobitArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value = "1:1:9")]
    pub m: String,
    #[arg(long, default_value_t = 1e-5)]
    pub lambda: f64,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value = "twobit.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
#[group(required = true, multiple = false, id = "source")]
pub struct GraphSource {
    /// Built-in graph: weighted4, unit5, triangle or edge.
    #[arg(long, group = "source")]
    pub demo: Option<String>,
    /// Gset-format graph file.
    #[arg(long, group = "source")]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MaxcutArgs {
    #[command(flatten)]
    pub source: GraphSource,
    /// Weight of the binarizer (default 1 for demo graphs, 1e-7 for files).
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value = "maxcut.json")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantMode {
    Binary,
    Ternary,
}

#[derive(Debug, Args, Serialize)]
pub struct QuantizeArgs {
    /// Whitespace- or comma-separated weights.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "ternary")]
    pub mode: QuantMode,
    #[arg(long, default_value = "quantize.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, default_value = "gradcheck.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LandscapeKind {
    Bin,
    Osb,
    Ter,
    Bbin,
    BinExp,
    NondiffSq,
    NondiffRoot,
}

#[derive(Debug, Args, Serialize)]
pub struct LandscapeArgs {
    #[arg(long, value_enum, default_value = "bin")]
    pub reg: LandscapeKind,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 201)]
    pub resolution: usize,
    #[arg(long, default_value = "landscape.csv")]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("csreg: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
