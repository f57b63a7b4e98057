use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gmspec::rank::{DEFAULT_ALPHA, DEFAULT_MAX_ITER, DEFAULT_TOL};
use gmspec::subspaces::DEFAULT_DENSE_LIMIT;

#[derive(Debug, Parser)]
#[command(name = "gmspec", version, about = "Spectral analysis of Google matrices of directed networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Node, link and dangling-node counts.
    Stats(Shared),
    /// Invariant subspaces and core space.
    Subspaces(Shared),
    /// Subspace spectrum, core Ritz values and eigenvectors.
    Spectrum(Shared),
    /// PageRank and CheiRank with power-law fits.
    Rank(Shared),
    /// Correlator, density grids, cut counts and community report.
    Analyze(Shared),
    /// Every output of the commands above in one run.
    Pipeline(Shared),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Fwd,
    Inv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Debug, Args)]
pub struct Shared {
    /// Edge list, one `source destination` pair per line.
    #[arg(long)]
    pub edges: PathBuf,
    /// Node labels, `id<TAB>text` per line.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long = "n-arnoldi", default_value_t = 500)]
    pub n_arnoldi: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long = "max-iter", default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Seed of the random Arnoldi start vector; uniform start when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Fwd)]
    pub direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Id of the first node in the edge file.
    #[arg(long = "index-base", default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub index_base: u8,
    /// Map arbitrary node ids to 0..N in increasing order.
    #[arg(long)]
    pub remap: bool,
    /// Also run the α → 1 PageRank.
    #[arg(long = "near-one")]
    pub near_one: bool,
    #[arg(long = "dense-limit", default_value_t = DEFAULT_DENSE_LIMIT)]
    pub dense_limit: usize,
    /// Move oversized components into the core.
    #[arg(long = "reclassify-oversized")]
    pub reclassify_oversized: bool,
    /// Krylov basis budget in GiB.
    #[arg(long = "memory-gib", default_value_t = 4.0)]
    pub memory_gib: f64,
    /// Core eigenvectors written by `spectrum`.
    #[arg(long, default_value_t = 10)]
    pub eigenvectors: usize,
    /// Eigenvalues closest to the unit circle examined by `analyze`.
    #[arg(long, default_value_t = 10)]
    pub communities: usize,
    /// Largest eigenvector entries pooled for the community word count.
    #[arg(long = "word-pool", default_value_t = 20)]
    pub word_pool: usize,
    /// Density grid resolution per axis.
    #[arg(long, default_value_t = 100)]
    pub cells: usize,
    #[arg(long = "fit-min")]
    pub fit_min: Option<usize>,
    #[arg(long = "fit-max")]
    pub fit_max: Option<usize>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Stats(_) => "stats",
            Command::Subspaces(_) => "subspaces",
            Command::Spectrum(_) => "spectrum",
            Command::Rank(_) => "rank",
            Command::Analyze(_) => "analyze",
            Command::Pipeline(_) => "pipeline",
        }
    }

    pub fn shared(&self) -> &Shared {
        match self {
            Command::Stats(s)
            | Command::Subspaces(s)
            | Command::Spectrum(s)
            | Command::Rank(s)
            | Command::Analyze(s)
            | Command::Pipeline(s) => s,
        }
    }
}
