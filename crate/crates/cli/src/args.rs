use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gramops::fermion::Normalization;
use gramops::rng::DEFAULT_SEED;

/// Graph invariants from operator commutation algebras.
///
/// Graphs are given as a file (JSON `{"n", "edges"[, "weights"]}` or DIMACS)
/// or as a builtin: `cycle:N`, `complete:N`, `empty:N`, `paper-example`.
#[derive(Debug, Parser)]
#[command(name = "gramops", version, arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Random seed.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Solver tolerance (SDP residuals and eigensolver residuals).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graph inspection.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Lovász theta function.
    Theta { graph: String },
    /// Commutation-only lower bound on the ground energy of Σ J_α O_α.
    SdpH(SdpArgs),
    /// Commutation-only upper bound on the largest eigenvalue of (Σ J_α O_α)².
    SdpH2(SdpArgs),
    /// Explicit-representation lower bound on Ψ(G).
    Psi(PsiArgs),
    /// Searches for separations between α(G) and Ψ(G).
    #[command(subcommand)]
    Search(SearchCommand),
    /// Blow-up of an integer-weighted graph.
    Blowup { graph: String },
    /// SYK instances, free fermions and Wick evaluation.
    #[command(subcommand)]
    Syk(SykCommand),
    /// Least singular value of c + Σ_i O_i.
    #[command(subcommand)]
    Knapsack(KnapsackCommand),
    /// Reproduces a published example.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Size, fingerprint, triangle-freeness and independence number.
    Info { graph: String },
}

#[derive(Debug, Args)]
pub struct SdpArgs {
    pub graph: String,
    /// `uniform` or a JSON file holding an array of coefficients.
    #[arg(long, default_value = "uniform")]
    pub coeffs: String,
}

#[derive(Debug, Args)]
pub struct PsiArgs {
    pub graph: String,
    /// `uniform` or a JSON file holding an array of coefficients.
    #[arg(long, default_value = "uniform")]
    pub coeffs: String,
    /// Run this many projected-ascent steps on the coefficients.
    #[arg(long)]
    pub optimize: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub step_size: f64,
    /// Also compute ϑ(G).
    #[arg(long)]
    pub theta: bool,
}

#[derive(Debug, Subcommand)]
pub enum SearchCommand {
    /// Complements of random maximal triangle-free graphs, uniform coefficients.
    TriangleFree {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 2.005)]
        threshold: f64,
        /// Also compute ϑ for every trial.
        #[arg(long)]
        theta: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Sphere,
    Expectation,
}

impl From<NormArg> for Normalization {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Sphere => Normalization::Sphere,
            NormArg::Expectation => Normalization::Expectation,
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Use the random-sign free-fermion model (any even n) instead of the
    /// Hadamard model (n/2 a power of two).
    #[arg(long)]
    pub random_sign: bool,
}

#[derive(Debug, Subcommand)]
pub enum SykCommand {
    /// Random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, value_enum, default_value_t = NormArg::Sphere)]
        norm: NormArg,
    },
    /// Commutation graph of the degree-q Majorana monomials.
    Graph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: usize,
        /// Also compute ϑ of the graph.
        #[arg(long)]
        theta: bool,
    },
    /// Couplings J⁰ built from the free-fermion model.
    J0 {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Ground energy of the free-fermion model.
    FreeEnergy {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Energy of an instance in the free-fermion ground state.
    Wick {
        #[arg(long)]
        n: usize,
        /// Instance JSON (default: J⁰).
        #[arg(long)]
        instance: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Extreme eigenvalues of a random instance.
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, value_enum, default_value_t = NormArg::Sphere)]
        norm: NormArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum KnapsackCommand {
    /// Recursive lower bound on the least singular value.
    Bound {
        file: PathBuf,
        /// Try every qubit order (n ≤ 6).
        #[arg(long)]
        orders: bool,
        /// List |c + Σ σ_i c_i| for every sign pattern (n ≤ 16).
        #[arg(long)]
        leaves: bool,
        /// Also compute the exact value (n ≤ 12).
        #[arg(long)]
        exact: bool,
    },
    /// Exact least singular value and ground energy of O†O (n ≤ 12).
    Exact { file: PathBuf },
    /// min_σ |c + Σ σ_i c_i| from `{"c": [re, im], "coeffs": [[re, im], …]}`.
    SubsetSum { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// The 12-vertex graph with α = 2 and squared norm above 2.
    PaperExample {
        /// Replace the embedded complement adjacency matrix (JSON array of rows).
        #[arg(long)]
        complement: Option<PathBuf>,
    },
}
