use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "hadapow", version, about = "Entrywise powers of PSD matrices and the exponents that keep them PSD")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a matrix and print it in the text file format.
    Matrix {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Map out {α ≥ 0 : A^∘α is PSD} on a window.
    Scan {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        precision: PrecisionArgs,
        /// Use |A|^∘α (needed for signed matrices).
        #[arg(long)]
        use_abs: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Determinant curve; defaults to n=4, k=1, eps=1e-7 on [1, 2.5].
    Detcurve {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        precision: PrecisionArgs,
        #[arg(long)]
        use_abs: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a verification driver.
    Verify {
        #[command(subcommand)]
        driver: Driver,
    },
    /// Expand a principal minor of A^∘α as Σ c e^{μα}.
    Exppoly {
        #[command(flatten)]
        family: FamilyArgs,
        /// Zero-based indices of the principal block, e.g. 0,1,3 (default: all).
        #[arg(long, value_delimiter = ',')]
        indices: Option<Vec<usize>>,
        /// Allow zero entries (valid for α > 0 only).
        #[arg(long)]
        positive_alpha: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum Driver {
    /// Interval components of the perturbed Gram family.
    Thm1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        opts: VerifyArgs,
    },
    /// Interval components of the perturbed cosine family under |·|.
    Thm2 {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        opts: VerifyArgs,
    },
    /// Known sign patterns of the unperturbed families.
    Baselines {
        /// Only this order (default: Gram 3..=8 and cosine 4..=9).
        #[arg(long)]
        n: Option<usize>,
        /// Only this family.
        #[arg(long)]
        family: Option<BaselineFamily>,
        #[arg(long, env = "HPA_DIGITS", default_value_t = 50)]
        digits: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    PolyGram,
    PerturbedPolyGram,
    Cos,
    PerturbedCos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineFamily {
    PolyGram,
    Cos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Exactly one of --family, --file, --spec or --random.
#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub family: Option<FamilyName>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated nodes; fractions like 1/3 are kept exact.
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<String>>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub eps: Option<String>,
    /// Matrix in the text file format.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Family spec as JSON.
    #[arg(long)]
    pub spec: Option<String>,
    /// Random non-negative PSD matrix of this order.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    #[arg(long)]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    /// Number of grid points (at least 2).
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PrecisionArgs {
    /// Significant digits of the extended-precision referee.
    #[arg(long, env = "HPA_DIGITS", default_value_t = 50)]
    pub digits: usize,
    /// Decide everything at binary64; undecidable points become BOUNDARY.
    #[arg(long)]
    pub no_oracle: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Use this ε instead of walking the ladder.
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<String>>,
    #[arg(long, env = "HPA_DIGITS", default_value_t = 50)]
    pub digits: usize,
    /// Smallest acceptable certified half-width.
    #[arg(long, default_value_t = 0.0)]
    pub min_delta: f64,
    /// Cross-check every binary64 verdict against the referee.
    #[arg(long)]
    pub audit: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}
