use std::path::PathBuf;
use std::str::FromStr;

use atsp_core::GenModel;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "atsp", version, about = "Approximation algorithms for the asymmetric TSP")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an ATSP instance and print a JSON report.
    Solve(SolveArgs),
    /// Solve an s-t path instance through the ATSP reduction.
    Atspp(AtsppArgs),
    /// Run solvers over generated instances and print CSV.
    Bench(BenchArgs),
    /// Re-check a stored report against its instance.
    Verify(VerifyArgs),
    /// Print a generated instance in TSPLIB format.
    Gen(GenArgs),
}

/// `n,model,seed`, e.g. `8,uniform-metric,3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub n: usize,
    pub model: GenModel,
    pub seed: u64,
}

impl FromStr for GenSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [n, model, seed] = parts[..] else {
            return Err(format!("expected n,model,seed but got '{s}'"));
        };
        Ok(Self {
            n: n.parse().map_err(|_| format!("bad vertex count '{n}'"))?,
            model: model.parse().map_err(|e: atsp_core::Error| e.to_string())?,
            seed: seed.parse().map_err(|_| format!("bad seed '{seed}'"))?,
        })
    }
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct InstanceSource {
    /// TSPLIB file (TYPE: ATSP, EXPLICIT FULL_MATRIX).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generated instance as n,model,seed.
    #[arg(long)]
    pub gen: Option<GenSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Asadpour,
    Cyclecover,
    Exact,
}

impl Algo {
    pub fn id(self) -> &'static str {
        match self {
            Algo::Asadpour => "asadpour",
            Algo::Cyclecover => "cyclecover",
            Algo::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Inner {
    Cyclecover,
    Asadpour,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: InstanceSource,
    #[arg(long, value_enum, default_value = "asadpour")]
    pub algo: Algo,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Marginal slack for the max-entropy fit.
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    /// Trees to sample (default ⌈2 ln n⌉).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Also run the exact oracle (n <= 18) and report the ratio.
    #[arg(long)]
    pub exact_compare: bool,
    /// Pretty-print the JSON report.
    #[arg(long)]
    pub json: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AtsppArgs {
    #[command(flatten)]
    pub source: InstanceSource,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long, value_enum, default_value = "cyclecover")]
    pub inner: Inner,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid spacing and merge group size parameter.
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    /// Trees to sample in the inner solver when it is `asadpour`.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub exact_compare: bool,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Comma-separated instance sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "asadpour,cyclecover")]
    pub algos: Vec<Algo>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "euclidean-perturbed")]
    pub model: GenModel,
    /// Largest size for which the exact oracle fills the ratio column.
    #[arg(long, default_value_t = 12)]
    pub exact_max: usize,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[command(flatten)]
    pub source: InstanceSource,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// n,model,seed
    pub spec: GenSpec,
}
