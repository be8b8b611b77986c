//! Sieving ξ(n) = (−1)^ω(n), λ(n) = (−1)^Ω(n) and μ(n) over large intervals.
//!
//! ξ and λ use a table of values on integers prime to 30 to cut factoring
//! work: if `p | n` and `n/p` is tabulated, the value at `n` follows from the
//! table. μ uses a plain segmented squarefree sieve. All three run on the
//! same block framework and produce checkpointed summatory series
//! `H(x)`, `L(x)`, `M(x)`.

mod average;
mod block;
mod summatory;
mod table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use average::{average_order_report, AverageOrderReport};
pub use block::{mu_block, sieve_block, BlockResult, BlockValues, Sieve};
pub use summatory::{
    checkpoint_positions, normalized_export, parity_agreement, read_checkpoints_csv, summatory, summatory_with, write_checkpoints_csv,
    write_normalized_csv, Checkpoints, SieveConfig, SummatorySeries,
};
pub use table::XiTable;

/// Arithmetic function being sieved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SieveFunc {
    /// ξ(n) = (−1)^ω(n); summatory function H.
    Xi,
    /// λ(n) = (−1)^Ω(n); summatory function L.
    Lambda,
    /// μ(n); summatory function M.
    Mu,
}

impl SieveFunc {
    pub fn as_str(&self) -> &'static str {
        match self {
            SieveFunc::Xi => "XI",
            SieveFunc::Lambda => "LAMBDA",
            SieveFunc::Mu => "MU",
        }
    }

    /// Name of the summatory function.
    pub fn summatory_name(&self) -> char {
        match self {
            SieveFunc::Xi => 'H',
            SieveFunc::Lambda => 'L',
            SieveFunc::Mu => 'M',
        }
    }
}

impl fmt::Display for SieveFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SieveFunc {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "xi" | "h" => Ok(SieveFunc::Xi),
            "lambda" | "l" => Ok(SieveFunc::Lambda),
            "mu" | "m" => Ok(SieveFunc::Mu),
            other => Err(format!("unknown function '{other}' (expected xi, lambda or mu)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SieveError {
    #[error("table limit {0} must be a positive multiple of 30")]
    TableLimit(u64),
    #[error("table of {bytes} bytes exceeds the memory cap of {cap} bytes")]
    MemoryCap { bytes: u64, cap: u64 },
    #[error("tables hold XI or LAMBDA, not {0}")]
    TableFunc(SieveFunc),
    #[error("invalid block [{a}, {b})")]
    Range { a: u64, b: u64 },
    #[error("block end {b} exceeds (N-1)^2 for table limit N = {limit}")]
    Guard { b: u64, limit: u64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("internal sieve invariant violated: {0}")]
    Internal(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `(ω(n), Ω(n))` by trial division; `(0, 0)` for `n = 1`.
pub fn omega_pair_bruteforce(n: u64) -> (u32, u32) {
    assert!(n >= 1, "n must be positive");
    let mut m = n;
    let (mut omega, mut big_omega) = (0, 0);
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            omega += 1;
            while m % d == 0 {
                m /= d;
                big_omega += 1;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        omega += 1;
        big_omega += 1;
    }
    (omega, big_omega)
}

/// ξ, λ or μ at `n` by trial division.
pub fn value_bruteforce(func: SieveFunc, n: u64) -> i8 {
    let (w, big) = omega_pair_bruteforce(n);
    let sign = |k: u32| if k % 2 == 0 { 1 } else { -1 };
    match func {
        SieveFunc::Xi => sign(w),
        SieveFunc::Lambda => sign(big),
        SieveFunc::Mu if w == big => sign(w),
        SieveFunc::Mu => 0,
    }
}
