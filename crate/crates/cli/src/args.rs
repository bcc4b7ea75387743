use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use quiver_dt::rational::parse_rational;

/// Exact generating series for quiver moduli, Euler-product duality and
/// Kronecker DT invariants.
#[derive(Debug, Parser)]
#[command(name = "quiver-dt", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Truncation bound on the total degree.
    #[arg(long, global = true, default_value_t = 6)]
    pub max_degree: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hilbert scheme series of a framed quiver.
    Hilb(HilbArgs),
    /// Smooth model series over a slope stratum.
    Moduli(ModuliArgs),
    /// Euler product versus functional equation.
    Duality(DualityArgs),
    /// DT invariants of the m-Kronecker quiver.
    Dt(DtArgs),
    /// Runs the property suite.
    Verify,
}

#[derive(Debug, Args)]
pub struct HilbArgs {
    /// Quiver JSON file.
    #[arg(long)]
    pub quiver: PathBuf,

    /// Framing vector, comma separated. Defaults to one at every vertex.
    #[arg(long, value_delimiter = ',')]
    pub framing: Option<Vec<u32>>,

    /// Cross-check every coefficient against forest enumeration.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModuliSeries {
    /// `Q^η`, the smooth model series for the framing `η`.
    Q,
    /// `R^d`.
    R,
    /// `S^d`.
    S,
}

#[derive(Debug, Args)]
pub struct ModuliArgs {
    #[arg(long)]
    pub quiver: PathBuf,

    /// Stability JSON file.
    #[arg(long)]
    pub stability: PathBuf,

    /// Slope stratum JSON file.
    #[arg(long)]
    pub stratum: PathBuf,

    #[arg(long, value_enum, default_value_t = ModuliSeries::Q)]
    pub series: ModuliSeries,

    /// The framing `η` for `q`, the dimension vector for `r` and `s`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub vector: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DualityOp {
    /// Solve the functional equation for `F`.
    Solve,
    /// Exponents `a_i` by factorizing the solution.
    Factorize,
    /// Exponents `a_i` by the Möbius formula.
    Moebius,
    /// Exponents `b_i` from an Euler product.
    Extract,
}

#[derive(Debug, Args)]
pub struct DualityArgs {
    #[arg(long = "N", allow_hyphen_values = true)]
    pub n: i64,

    #[arg(long, value_enum, default_value_t = DualityOp::Factorize)]
    pub op: DualityOp,

    /// Functional equation exponents as `i:b_i` pairs, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = exponent_pair)]
    pub b: Vec<(u32, BigRational)>,

    /// Euler product exponents as `i:a_i` pairs, for `extract`.
    #[arg(long, value_delimiter = ',', value_parser = exponent_pair)]
    pub a: Vec<(u32, BigRational)>,
}

#[derive(Debug, Args)]
pub struct DtArgs {
    #[arg(long)]
    pub m: u32,

    /// Append the stable Euler characteristics along every primitive ray.
    #[arg(long)]
    pub stable_chi: bool,

    /// Compare the diagonal with its closed form (needs m >= 3).
    #[arg(long)]
    pub diagonal_check: bool,
}

fn exponent_pair(s: &str) -> Result<(u32, BigRational), String> {
    let (i, v) = s.split_once(':').ok_or_else(|| format!("expected i:value, got {s:?}"))?;
    let i: u32 = i.trim().parse().map_err(|e| format!("index {i:?}: {e}"))?;
    if i == 0 {
        return Err("exponent indices start at 1".into());
    }
    let v = parse_rational(v.trim()).map_err(|e| e.to_string())?;
    Ok((i, v))
}
