use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which summatory function an explicit formula or residue belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Problem {
    /// `M(x) = Σ μ(n)`.
    Mertens,
    /// `L(x) = Σ λ(n)`.
    Polya,
    /// `H(x) = Σ (-1)^ω(n)`.
    Omega,
}

impl Problem {
    pub const ALL: [Problem; 3] = [Problem::Mertens, Problem::Polya, Problem::Omega];

    pub fn as_str(&self) -> &'static str {
        match self {
            Problem::Mertens => "MERTENS",
            Problem::Polya => "POLYA",
            Problem::Omega => "OMEGA",
        }
    }

    /// One-letter name used on the command line.
    pub fn letter(&self) -> char {
        match self {
            Problem::Mertens => 'm',
            Problem::Polya => 'l',
            Problem::Omega => 'h',
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "m" | "mertens" | "mu" => Ok(Problem::Mertens),
            "l" | "polya" | "lambda" => Ok(Problem::Polya),
            "h" | "omega" | "xi" => Ok(Problem::Omega),
            other => Err(format!("unknown problem '{other}' (expected m, l or h)")),
        }
    }
}

/// Vertical line carrying the poles a residue belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Line {
    /// Poles at `ρ = 1/2 + iγ`.
    Half,
    /// Poles at `ρ/2`, damped by an extra `e^{-u/4}`.
    Quarter,
}

impl Line {
    pub fn as_str(&self) -> &'static str {
        match self {
            Line::Half => "HALF",
            Line::Quarter => "QUARTER",
        }
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Line {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "HALF" => Ok(Line::Half),
            "QUARTER" => Ok(Line::Quarter),
            other => Err(format!("unknown line '{other}'")),
        }
    }
}
