use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use omegas_core::oscillation::KernelKind;
use omegas_core::sieve::SieveFunc;
use omegas_core::{Line, Problem};

#[derive(Debug, Parser)]
#[command(name = "omegas", version, about = "Summatory functions of (-1)^ω(n), λ(n) and μ(n)")]
pub struct Cli {
    /// Worker threads; never changes the output.
    #[arg(long, global = true, env = "OMEGAS_WORKERS", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,

    /// Working precision in bits (each command has its own default).
    #[arg(long, global = true, env = "OMEGAS_PRECISION", value_parser = clap::value_parser!(u32).range(2..))]
    pub precision: Option<u32>,

    /// Artifact path; standard output when absent.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load, validate or generate tables of zero ordinates.
    Zeros {
        #[command(subcommand)]
        action: ZerosCmd,
    },
    /// Checkpointed summatory function of ξ, λ or μ.
    Sieve(SieveArgs),
    /// Brackets and estimates of the parity-agreement density β.
    Beta(BetaArgs),
    /// Per-zero residues of the explicit formulas.
    Residues(ResiduesArgs),
    /// Kernel-weighted sums over zeros.
    Oscillate {
        #[command(subcommand)]
        action: OscillateCmd,
    },
    /// Weak-independence certificate for the heaviest ordinates.
    Certify(CertifyArgs),
    /// Integer power series behind the factorisation of h(s).
    Series {
        #[command(subcommand)]
        action: SeriesCmd,
    },
}

#[derive(Debug, Args)]
pub struct ZerosFile {
    /// Table of ordinates, one per line.
    #[arg(long, env = "OMEGAS_ZEROS", default_value = "data/zeros.txt")]
    pub zeros: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum ZerosCmd {
    /// Parse a table and report its extent.
    Load {
        #[command(flatten)]
        file: ZerosFile,
    },
    /// Check |ζ(1/2 + iγ)| for each ordinate.
    Validate {
        #[command(flatten)]
        file: ZerosFile,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        /// Only the first `count` records.
        #[arg(long, value_parser = parse_count)]
        count: Option<u64>,
    },
    /// Compute the first `count` ordinates by root finding.
    Generate {
        #[arg(long, value_parser = parse_count)]
        count: u64,
        #[arg(long, default_value_t = 40)]
        digits: usize,
    },
}

#[derive(Debug, Args)]
pub struct SieveArgs {
    /// xi, lambda or mu.
    #[arg(long)]
    pub func: SieveFunc,
    #[arg(long, value_parser = parse_count)]
    pub xmax: u64,
    /// Checkpoint at every multiple of this stride.
    #[arg(long, value_parser = parse_count, group = "checkpoints")]
    pub stride: Option<u64>,
    /// Checkpoint at ⌊ratio^k⌋.
    #[arg(long, group = "checkpoints")]
    pub ratio: Option<f64>,
    /// Checkpoint at these positions.
    #[arg(long, value_delimiter = ',', value_parser = parse_count, group = "checkpoints")]
    pub points: Option<Vec<u64>>,
    /// Checkpoint at ⌊e^u⌋ for `n` points u evenly spaced in [a, b].
    #[arg(long, value_name = "A,B,N", value_parser = parse_grid, group = "checkpoints")]
    pub u_grid: Option<Grid>,
    /// Write (u, S(x)/√x) rows instead of (x, S(x)).
    #[arg(long)]
    pub normalized: bool,
    #[arg(long, value_parser = parse_count)]
    pub table_size: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    pub block_size: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BetaMode {
    ByR,
    ByProduct,
    Renyi,
    Empirical,
}

#[derive(Debug, Args)]
pub struct BetaArgs {
    #[arg(long, value_enum)]
    pub mode: BetaMode,
    /// Prime caps for the sets of size 1, 2, … (by-r).
    #[arg(long, value_delimiter = ',', value_parser = parse_count,
          default_value = "3000000,17500,1500,450,250,170")]
    pub caps: Vec<u64>,
    /// Bound on the squarefree products (by-product).
    #[arg(long = "B", value_parser = parse_count, default_value = "10000000")]
    pub bound: u64,
    /// Truncation of the Euler product (renyi).
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub prime_bound: u64,
    /// Argument of R (renyi).
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub z: f64,
    /// Sieve limit (empirical).
    #[arg(long, value_parser = parse_count, default_value = "100000000")]
    pub x: u64,
}

#[derive(Debug, Args)]
pub struct ResidueSource {
    #[command(flatten)]
    pub file: ZerosFile,
    /// Precomputed residues; computed from the zero table when absent.
    #[arg(long)]
    pub residues: Option<PathBuf>,
    /// Primes kept in F₆.
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    pub prime_bound: u64,
    /// Ceiling on |Im s| for ζ with Re s < 1.
    #[arg(long)]
    pub height_ceiling: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ResiduesArgs {
    /// m, l or h.
    #[arg(long)]
    pub problem: Problem,
    #[arg(long, default_value = "half")]
    pub line: Line,
    /// The first `count` zeros.
    #[arg(long, value_parser = parse_count, conflicts_with = "height")]
    pub count: Option<u64>,
    /// Zeros with γ ≤ height.
    #[arg(long)]
    pub height: Option<f64>,
    #[command(flatten)]
    pub file: ZerosFile,
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    pub prime_bound: u64,
    #[arg(long)]
    pub height_ceiling: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Cutoff {
    /// Kernel length.
    #[arg(long = "T", required_unless_present = "m")]
    pub t: Option<f64>,
    /// Use T = γ_{m+1} − ε.
    #[arg(long, conflicts_with = "t")]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub epsilon: f64,
}

#[derive(Debug, Subcommand)]
pub enum OscillateCmd {
    /// B*_T(u) at the given points.
    Bstar {
        #[arg(long)]
        problem: Problem,
        /// fejer or jp.
        #[arg(long, default_value = "fejer")]
        kernel: KernelKind,
        #[command(flatten)]
        cutoff: Cutoff,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required_unless_present = "u_grid")]
        u: Vec<f64>,
        #[arg(long, value_name = "A,B,N", value_parser = parse_grid, conflicts_with = "u")]
        u_grid: Option<Grid>,
        #[command(flatten)]
        source: ResidueSource,
    },
    /// Truncated explicit formula for e^{-u/2} S(e^u) on a grid.
    Estimate {
        #[arg(long)]
        problem: Problem,
        #[command(flatten)]
        cutoff: Cutoff,
        #[arg(long, value_name = "A,B,N", value_parser = parse_grid)]
        u_grid: Grid,
        /// Add the ρ/2 poles (problem h).
        #[arg(long)]
        quarter: bool,
        /// Precomputed quarter-line residues.
        #[arg(long, requires = "quarter")]
        quarter_residues: Option<PathBuf>,
        #[command(flatten)]
        source: ResidueSource,
    },
    /// Oscillation bounds from an N-independent set of ordinates.
    Bound {
        #[arg(long)]
        problem: Problem,
        #[arg(long, default_value = "jp")]
        kernel: KernelKind,
        #[command(flatten)]
        cutoff: Cutoff,
        /// Independence multiplier.
        #[arg(long = "N", value_parser = parse_count)]
        big_n: u64,
        /// Zero indices such as `1-72,74-76`; all ordinates below T when absent.
        #[arg(long, conflicts_with = "select")]
        indices: Option<String>,
        /// Keep the `n` heaviest ordinates.
        #[arg(long)]
        select: Option<usize>,
        #[command(flatten)]
        source: ResidueSource,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LllArg {
    Exact,
    Hybrid,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub problem: Problem,
    /// Size of Γ′.
    #[arg(long)]
    pub n: usize,
    /// Zeros below T.
    #[arg(long)]
    pub m: usize,
    /// Scaling bits of the lattice.
    #[arg(long)]
    pub b: u32,
    #[arg(long, default_value_t = 0.99)]
    pub delta: f64,
    #[arg(long, default_value = "1e-10")]
    pub epsilon: String,
    #[arg(long, value_enum, default_value = "hybrid")]
    pub lll: LllArg,
    /// Per-lattice records; a rerun resumes from them.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    #[command(flatten)]
    pub source: ResidueSource,
}

#[derive(Debug, Subcommand)]
pub enum SeriesCmd {
    /// Exponents a_1 … a_order.
    ASequence {
        #[arg(long)]
        order: usize,
    },
    /// Coefficients of the tail factor F_k.
    FkTail {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        order: usize,
    },
}

/// `n` evenly spaced points on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.a];
        }
        let step = (self.b - self.a) / (self.n - 1) as f64;
        (0..self.n).map(|i| if i + 1 == self.n { self.b } else { self.a + step * i as f64 }).collect()
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.n)
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("expected A,B,N, got '{s}'"));
    };
    let a: f64 = a.parse().map_err(|_| format!("bad number '{a}'"))?;
    let b: f64 = b.parse().map_err(|_| format!("bad number '{b}'"))?;
    let n: usize = n.parse().map_err(|_| format!("bad count '{n}'"))?;
    if !(a.is_finite() && b.is_finite()) || n == 0 || (n > 1 && b <= a) {
        return Err(format!("empty or reversed grid '{s}'"));
    }
    Ok(Grid { a, b, n })
}

/// Accepts `10000000` as well as `1e7`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.trim().replace('_', "");
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(x as u64),
        _ => Err(format!("'{s}' is not a non-negative integer")),
    }
}

/// Expands `1-72,74,76–80` into indices.
pub fn parse_indices(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || format!("bad index range '{part}'");
        match part.split_once(['-', '–']) {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a == 0 || b < a {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => {
                let i: usize = part.parse().map_err(|_| bad())?;
                if i == 0 {
                    return Err(bad());
                }
                out.push(i);
            }
        }
    }
    if out.is_empty() {
        return Err("no indices given".into());
    }
    Ok(out)
}
