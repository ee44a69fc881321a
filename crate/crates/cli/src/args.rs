//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gcurkit::curfac::IdMode;

use crate::experiments::MatrixKind;
use crate::report::Format;

#[derive(Debug, Parser)]
#[command(name = "gcurkit", version, about = "Generalized CUR decompositions of matrix pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Treat the first row of CSV inputs as a header.
    #[arg(long, global = true)]
    pub csv_header: bool,

    /// Leave the timestamp and wall-clock times out of reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generalized SVD of a pair, with truncation diagnostics.
    Gsvd(GsvdArgs),
    /// DEIM-CUR of one matrix.
    Cur(CurArgs),
    /// DEIM-GCUR of a pair.
    Gcur(GcurArgs),
    /// Run a seeded reproduction experiment.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct GsvdArgs {
    /// Data matrix A (Matrix Market or CSV).
    pub a: PathBuf,
    /// Reference matrix B with the same number of columns.
    pub b: PathBuf,
    /// Truncation rank for the sandwich diagnostics.
    #[arg(short = 'k', long = "rank")]
    pub rank: Option<usize>,
    /// Write U, V, Y (and X) as Matrix Market files into this directory.
    #[arg(long, value_name = "DIR")]
    pub factors_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurArgs {
    pub a: PathBuf,
    #[arg(short = 'k', long = "rank")]
    pub rank: usize,
    /// Also compute a one-sided interpolative decomposition.
    #[arg(long, value_enum)]
    pub id_mode: Option<IdModeArg>,
    /// Write C, M, R as Matrix Market files into this directory.
    #[arg(long, value_name = "DIR")]
    pub factors_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GcurArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(short = 'k', long = "rank")]
    pub rank: usize,
    /// Skip the row selection and middle matrix for B.
    #[arg(long)]
    pub only_a: bool,
    /// Evaluate the a-posteriori error bounds.
    #[arg(long)]
    pub bounds: bool,
    #[arg(long, value_enum)]
    pub id_mode: Option<IdModeArg>,
    /// Write C_A, M_A, R_A (and C_B, M_B, R_B) into this directory.
    #[arg(long, value_name = "DIR")]
    pub factors_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment name.
    #[arg(value_parser = ["intro-angles", "noise-recovery", "noise-recovery-inexact", "subgroups"])]
    pub name: String,
    /// Ranks, comma separated.
    #[arg(short = 'k', long = "rank", value_delimiter = ',')]
    pub rank: Option<Vec<usize>>,
    /// Noise levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Monte Carlo trials (defaults depend on the experiment).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed; every trial derives its own stream from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Toeplitz covariance parameter.
    #[arg(long, default_value_t = 0.99)]
    pub rho: f64,
    /// Perturb the Cholesky factor handed to the GSVD-based methods.
    #[arg(long)]
    pub inexact_chol: bool,
    /// Use the full problem sizes and trial counts.
    #[arg(long)]
    pub paper_scale: bool,
    /// Test matrix for noise-recovery.
    #[arg(long, value_enum)]
    pub matrix: Option<MatrixArg>,
    /// Rows of the noise-recovery test matrix.
    #[arg(long)]
    pub rows: Option<usize>,
    /// Write SVG plots into this directory.
    #[arg(long, value_name = "DIR")]
    pub plot_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IdModeArg {
    Column,
    Row,
}

impl From<IdModeArg> for IdMode {
    fn from(m: IdModeArg) -> Self {
        match m {
            IdModeArg::Column => IdMode::Column,
            IdModeArg::Row => IdMode::Row,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MatrixArg {
    Gapped,
    Sparse,
}

impl From<MatrixArg> for MatrixKind {
    fn from(m: MatrixArg) -> Self {
        match m {
            MatrixArg::Gapped => MatrixKind::Gapped,
            MatrixArg::Sparse => MatrixKind::Sparse,
        }
    }
}
