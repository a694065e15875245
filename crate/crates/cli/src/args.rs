//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "siegel",
    version,
    about = "Theta characteristics, Siegel Fourier expansions and their verifications"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Trace bound on exponent keys `E = 8T`.
    #[arg(long, global = true)]
    pub trunc: Option<u64>,
    /// Absolute tolerance for numerical evaluation.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Node budget for orbit searches.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "SIEGEL_WORKERS")]
    pub workers: Option<usize>,
    /// Record wall-clock timings in the report (makes it run-dependent).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Theta characteristics and theta constants.
    #[command(subcommand)]
    Theta(ThetaCmd),
    /// Operations on stored Fourier expansions.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Builds the expansion of a named form.
    Construct(ConstructArgs),
    /// Verifications of identities and sampling checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Formal Fourier–Jacobi series of genus 2.
    #[command(subcommand)]
    Fj(FjCmd),
    /// The paramodular group and paramodular tables.
    #[command(subcommand)]
    Para(ParaCmd),
    /// Quadratic-form reduction utilities.
    #[command(subcommand)]
    Reduce(ReduceCmd),
}

#[derive(Debug, Subcommand)]
pub enum ThetaCmd {
    /// Numbers of even and odd characteristics.
    Count {
        #[arg(long)]
        genus: usize,
    },
    /// Orbits of `Sp_2n(F_2)` on characteristics, or the orbit of a set.
    Orbits {
        #[arg(long)]
        genus: usize,
        /// A characteristic set, e.g. `E3`, `E1xE2`, `E1xE3*` or
        /// `00;00,10;00`.
        #[arg(long)]
        set: Option<String>,
    },
    /// Fourier expansion of `θ[m]^power`.
    Qexp {
        #[arg(long = "char")]
        characteristic: String,
        #[arg(long, default_value_t = 1)]
        power: u32,
        #[arg(long)]
        table_out: Option<PathBuf>,
    },
    /// Numerical value of `θ[m](τ)`.
    Eval {
        #[arg(long = "char")]
        characteristic: String,
        #[command(flatten)]
        point: PointArgs,
    },
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Real part of `τ` as a JSON matrix.
    #[arg(long)]
    pub re: String,
    /// Imaginary part of `τ` as a JSON matrix.
    #[arg(long)]
    pub im: String,
}

#[derive(Debug, Subcommand)]
pub enum SeriesCmd {
    /// Product of two tables.
    Mul {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Valuation-aware truncation.
        #[arg(long)]
        graded: bool,
        #[arg(long)]
        table_out: Option<PathBuf>,
    },
    /// The Siegel Φ operator.
    Phi {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        table_out: Option<PathBuf>,
    },
    /// Restriction to block-diagonal points `diag(τ₁, τ₂)`.
    Restrict {
        #[arg(long)]
        table: PathBuf,
        /// Size of the first block.
        #[arg(long)]
        split: usize,
        #[arg(long)]
        table_out: Option<PathBuf>,
    },
    /// `a(ᵗuTu) = det(u)^k a(T)` on the table.
    Symmetry {
        #[arg(long)]
        table: PathBuf,
        /// Weight to check; defaults to the header weight.
        #[arg(long)]
        weight: Option<i64>,
    },
    /// Cuspidality of a table, or of `θ[S]⁸` from the orbit of `S`.
    Cusp {
        #[arg(long, conflicts_with = "set")]
        table: Option<PathBuf>,
        #[arg(long, requires = "genus")]
        set: Option<String>,
        #[arg(long)]
        genus: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// `F_null`, `F1`, `FT`, `FH` or a block pushforward such as `F12`.
    pub name: String,
    #[arg(long)]
    pub genus: usize,
    #[arg(long)]
    pub table_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Number of points per block split.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Restriction identity of `θ[E₁×E₂]⁸` to `H₁ × H₂`.
    F12 {
        /// Keys above the valuation covered by the window comparison.
        #[arg(long, default_value_t = 16)]
        window: u64,
    },
    /// `F_null⁸ = c·Δ` in genus 1.
    Delta,
    /// Seeded common-zero sampling for the genus-3 family.
    Acn3Scan(ScanArgs),
    /// Seeded common-zero sampling for the genus-4 family.
    Acn4Scan(ScanArgs),
}

#[derive(Debug, Subcommand)]
pub enum FjCmd {
    /// Splits a genus-2 table into Jacobi tables.
    Decompose {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        fj_out: Option<PathBuf>,
    },
    /// Reassembles the Fourier table of a Fourier–Jacobi file.
    Assemble {
        #[arg(long)]
        fj: PathBuf,
        #[arg(long)]
        table_out: Option<PathBuf>,
    },
    /// psd support and elliptic invariance of each Jacobi table.
    Validate {
        #[arg(long, conflicts_with = "table")]
        fj: Option<PathBuf>,
        #[arg(long)]
        table: Option<PathBuf>,
        /// Only this index.
        #[arg(long)]
        index: Option<i64>,
        /// Translations `λ` are multiples of this.
        #[arg(long, default_value_t = 1)]
        step: i64,
    },
    /// The symmetry condition on the assembled Fourier table.
    Symmetry {
        #[arg(long, conflicts_with = "table")]
        fj: Option<PathBuf>,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        weight: Option<i64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ParaCmd {
    /// Membership of a rational 4×4 matrix in `K(N)`.
    Member {
        /// JSON matrix with integer or `"p/q"` entries.
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        level: u64,
    },
    /// Builds and checks `V_d`.
    AtkinLehner {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        divisor: u64,
    },
    /// The involution condition `a(μ_N T) = ε a(T)`.
    Involution {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        level: Option<u64>,
    },
    /// Strong symmetry under `Γ₀(N)*`.
    StrongSymmetry {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        level: Option<u64>,
        #[arg(long)]
        weight: Option<i64>,
        /// Primes `p | N` with `χ(p) = −1`, comma separated.
        #[arg(long, default_value = "")]
        character: String,
        /// Use `{translation, Fricke}` (levels 1 to 3 only).
        #[arg(long)]
        minimal_generators: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReduceCmd {
    /// Minimum of a positive definite form over nonzero integer vectors.
    Min {
        #[arg(long)]
        matrix: String,
    },
    /// Exact decomposition `Y = ᵗW·D·W`.
    Jacobi {
        #[arg(long)]
        matrix: String,
    },
    /// Membership of `τ` in the Siegel domain of parameter `u`.
    SiegelDomain {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 2.0)]
        param: f64,
    },
    /// `GL₂(Z)`-reduced representative of an exponent key.
    Gl2 {
        #[arg(long)]
        key: String,
    },
}
