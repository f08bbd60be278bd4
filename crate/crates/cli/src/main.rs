//! Command-line harness: embed datasets into bit codes, run the
//! bound-verification suites, benchmark the pipelines, and drive variance
//! and covariance experiments. All randomness flows from `--seed`.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

fn parse_seed(s: &str) -> Result<u64, String> {
    if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).map_err(|e| format!("invalid hex seed: {e}"))
    } else {
        s.parse().map_err(|e| format!("invalid seed: {e}"))
    }
}

#[derive(Parser)]
#[command(name = "circembed", version, about = "Binary embeddings of spherical data")]
struct Cli {
    /// Optional config file (key=value lines or a JSON object); flags override it
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a dataset into bit codes
    Embed(EmbedArgs),
    /// Run a named verification suite and emit a CSV report
    Verify(VerifyArgs),
    /// Wall-clock benchmarks of the embedding stages (single-threaded)
    Bench(BenchArgs),
    /// Variance of the embedded distance over an (n, m) grid
    Variance(VarianceArgs),
    /// Indicator covariance bound over random and adversarial 4-tuples
    Covariance(CovarianceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Dense,
    AcceleratedFjlt,
    AcceleratedSjlt,
    SubsampledCirculant,
    SignedCirculant,
    MedianFjlt,
    MedianSjlt,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IModeArg {
    FirstM,
    Uniform,
    Dyadic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Binary,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKindArg {
    Dense,
    SignedUniform,
    SignedFirstM,
    SubsampledFirstM,
    SubsampledUniform,
    SubsampledDyadic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairKindArg {
    Random,
    Alternating,
    Sparse,
}

/// Multipliers for the parameter conditions that are stated only up to
/// absolute constants.
#[derive(Args, Clone, Copy)]
pub struct MultiplierArgs {
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    #[arg(long, default_value_t = 1.0)]
    c3: f64,
    #[arg(long, default_value_t = 1.0)]
    c4: f64,
}

impl MultiplierArgs {
    fn to_multipliers(self) -> circembed::params::Multipliers {
        circembed::params::Multipliers { c1: self.c1, c2: self.c2, c3: self.c3, c4: self.c4 }
    }
}

#[derive(Args)]
pub struct EmbedArgs {
    /// Dataset: one vector per line, comma- or whitespace-separated floats
    #[arg(long)]
    input: String,
    #[arg(long)]
    output: String,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Normalize rows onto the sphere before embedding
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    normalize: bool,
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    seed: u64,
    /// Row subsampling for the circulant kinds
    #[arg(long, value_enum, default_value = "uniform")]
    imode: IModeArg,
    /// Output bits (per block for the median kinds); derived from --delta
    /// when omitted
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    nprime: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    mprime: Option<usize>,
    /// Target embedding accuracy; drives the parameter formulas
    #[arg(long)]
    delta: Option<f64>,
    /// Failure probability in the parameter formulas
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Use Toeplitz instead of circulant blocks in the median kinds
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    toeplitz_blocks: bool,
    #[command(flatten)]
    multipliers: MultiplierArgs,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// One of: withoutrad, unbiasedness, ab, cov, varbound, radcov, geo,
    /// embedding, proofgap
    #[arg(long)]
    suite: String,
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    seed: u64,
    /// Scales every Monte Carlo trial count (1.0 = full size)
    #[arg(long, default_value_t = 1.0)]
    trial_scale: f64,
    /// CSV report path; stdout when omitted
    #[arg(long)]
    out: Option<String>,
    #[command(flatten)]
    multipliers: MultiplierArgs,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Sizes for the circulant sign stage
    #[arg(long, value_delimiter = ',', default_values_t = [16384usize, 65536, 262144])]
    sizes: Vec<usize>,
    /// Sizes for the dense Gaussian embedding
    #[arg(long, value_delimiter = ',', default_values_t = [1024usize, 4096, 16384])]
    dense_sizes: Vec<usize>,
    /// Input dimension for the sparse-vs-dense SJLT comparison
    #[arg(long, default_value_t = 65536)]
    sjlt_n: usize,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
pub struct VarianceArgs {
    #[arg(long, value_enum)]
    kind: CurveKindArg,
    #[arg(long)]
    n: usize,
    #[arg(long, value_delimiter = ',')]
    m_grid: Vec<usize>,
    #[arg(long, value_enum, default_value = "random")]
    pair_kind: PairKindArg,
    /// Sparsity for --pair-kind sparse
    #[arg(long)]
    sparsity: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pairs: usize,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
pub struct CovarianceArgs {
    #[arg(long, default_value_t = 50)]
    random: usize,
    #[arg(long, default_value_t = 5)]
    adversarial: usize,
    #[arg(long, default_value_t = 200_000)]
    trials: u64,
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::inject_config_args(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(argv);
    let outcome = match cli.command {
        Command::Embed(args) => commands::run_embed(args),
        Command::Verify(args) => commands::run_verify(args),
        Command::Bench(args) => commands::run_bench(args),
        Command::Variance(args) => commands::run_variance(args),
        Command::Covariance(args) => commands::run_covariance(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
