//! Tables of ordinates `γ_n` of nontrivial zeros of ζ.
//!
//! The on-disk format is plain text, one positive decimal per line, with an
//! optional leading index column and `#` comments. A TOML sidecar
//! `<file>.meta` records provenance, count and precision.

mod generate;

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

pub use generate::{gram_point, hardy_z, riemann_siegel_theta, generate_zeros, GenerateError};

use crate::hp::{bits_for_digits, digits_for_bits, format_decimal, parse_decimal, ComplexHp};
use crate::parallel::with_workers;
use crate::zeta::{ZetaError, ZetaKernel};

/// Floor on the guaranteed mantissa bits of every record.
pub const MIN_PRECISION_BITS: u32 = 64;
/// Extra bits kept beyond the guaranteed precision when parsing.
pub const GUARD_BITS: u32 = 16;

#[derive(Debug, thiserror::Error)]
pub enum ZerosError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: malformed ordinate '{text}'")]
    Parse { line: usize, text: String },
    #[error("line {line}: {digits} significant digits give {bits} bits, {required} required")]
    Precision { line: usize, digits: usize, bits: u32, required: u32 },
    #[error("line {line}: ordinate does not exceed its predecessor")]
    Monotonicity { line: usize },
    #[error("line {line}: index {found} where {expected} was expected")]
    Index { line: usize, expected: usize, found: String },
    #[error("invalid table: {0}")]
    Invalid(String),
    #[error("metadata {path}: {message}")]
    Meta { path: PathBuf, message: String },
}

/// One ordinate with its guaranteed precision.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroRecord {
    pub index: usize,
    pub gamma: Float,
    /// Guaranteed correct mantissa bits of `gamma`.
    pub precision_bits: u32,
}

/// Immutable, validated sequence of records indexed `1..=count`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTable {
    records: Vec<ZeroRecord>,
    source: String,
}

impl ZeroTable {
    /// Checks the table invariants.
    pub fn new(records: Vec<ZeroRecord>, source: impl Into<String>) -> Result<Self, ZerosError> {
        for (i, r) in records.iter().enumerate() {
            if r.index != i + 1 {
                return Err(ZerosError::Invalid(format!("record {} has index {}", i + 1, r.index)));
            }
            if r.gamma <= 0 {
                return Err(ZerosError::Invalid(format!("γ_{} is not positive", r.index)));
            }
            if r.precision_bits < MIN_PRECISION_BITS {
                return Err(ZerosError::Invalid(format!("γ_{} has {} bits", r.index, r.precision_bits)));
            }
            if i > 0 && r.gamma <= records[i - 1].gamma {
                return Err(ZerosError::Monotonicity { line: i + 1 });
            }
        }
        Ok(ZeroTable { records, source: source.into() })
    }

    pub fn records(&self) -> &[ZeroRecord] {
        &self.records
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn count(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Record with 1-based `index`.
    pub fn get(&self, index: usize) -> Option<&ZeroRecord> {
        index.checked_sub(1).and_then(|i| self.records.get(i))
    }

    /// Smallest precision over all records (`None` when empty).
    pub fn min_precision_bits(&self) -> Option<u32> {
        self.records.iter().map(|r| r.precision_bits).min()
    }

    /// Records with `γ <= height`.
    pub fn up_to_height(&self, height: f64) -> &[ZeroRecord] {
        let end = self.records.partition_point(|r| r.gamma <= height);
        &self.records[..end]
    }

    /// The first `n` records (all of them if fewer).
    pub fn first(&self, n: usize) -> &[ZeroRecord] {
        &self.records[..n.min(self.records.len())]
    }

    pub fn gammas_f64(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.gamma.to_f64()).collect()
    }
}

/// Sidecar metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroMeta {
    pub source: String,
    pub count: usize,
    /// Significant digits written per ordinate (minimum over the table).
    pub digits: usize,
    pub precision_bits: u32,
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Parses table text. `min_precision_bits` below 64 is raised to 64.
pub fn parse_zeros(text: &str, min_precision_bits: u32, source: &str) -> Result<ZeroTable, ZerosError> {
    let required = min_precision_bits.max(MIN_PRECISION_BITS);
    let mut records: Vec<ZeroRecord> = Vec::new();
    let mut indexed: Option<bool> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let has_index = match fields.len() {
            1 => false,
            2 => true,
            _ => return Err(ZerosError::Parse { line, text: raw.to_string() }),
        };
        if *indexed.get_or_insert(has_index) != has_index {
            return Err(ZerosError::Parse { line, text: raw.to_string() });
        }
        let expected = records.len() + 1;
        if has_index && fields[0].parse::<usize>().ok() != Some(expected) {
            return Err(ZerosError::Index { line, expected, found: fields[0].to_string() });
        }
        let token = fields[fields.len() - 1];
        // the digit count decides the working precision, so probe first
        let probe = parse_decimal(token, 64).map_err(|_| ZerosError::Parse { line, text: token.to_string() })?;
        let bits = bits_for_digits(probe.significant_digits);
        if bits < required {
            return Err(ZerosError::Precision { line, digits: probe.significant_digits, bits, required });
        }
        let gamma = parse_decimal(token, bits + GUARD_BITS).expect("validated above").value;
        if gamma <= 0 {
            return Err(ZerosError::Parse { line, text: token.to_string() });
        }
        if let Some(prev) = records.last() {
            if gamma <= prev.gamma {
                return Err(ZerosError::Monotonicity { line });
            }
        }
        records.push(ZeroRecord { index: expected, gamma, precision_bits: bits });
    }
    ZeroTable::new(records, source)
}

/// Reads a table and, when present, its sidecar metadata.
pub fn load_zeros(path: &Path, min_precision_bits: u32) -> Result<ZeroTable, ZerosError> {
    let text = std::fs::read_to_string(path).map_err(|source| ZerosError::Io { path: path.to_owned(), source })?;
    let mp = meta_path(path);
    let source = if mp.exists() {
        let meta = read_meta(&mp)?;
        meta.source
    } else {
        path.display().to_string()
    };
    let table = parse_zeros(&text, min_precision_bits, &source)?;
    if mp.exists() {
        let meta = read_meta(&mp)?;
        if meta.count != table.count() {
            return Err(ZerosError::Meta {
                path: mp,
                message: format!("count {} but the table holds {}", meta.count, table.count()),
            });
        }
    }
    Ok(table)
}

fn read_meta(path: &Path) -> Result<ZeroMeta, ZerosError> {
    let text = std::fs::read_to_string(path).map_err(|source| ZerosError::Io { path: path.to_owned(), source })?;
    toml::from_str(&text).map_err(|e| ZerosError::Meta { path: path.to_owned(), message: e.to_string() })
}

/// Table text: one ordinate per line at the digits its precision implies.
pub fn format_zeros(table: &ZeroTable) -> String {
    let mut out = String::new();
    for r in table.records() {
        out.push_str(&format_decimal(&r.gamma, digits_for_bits(r.precision_bits)));
        out.push('\n');
    }
    out
}

/// Writes the table and its `.meta` sidecar.
pub fn persist_zeros(table: &ZeroTable, path: &Path) -> Result<(), ZerosError> {
    let io = |source| ZerosError::Io { path: path.to_owned(), source };
    std::fs::write(path, format_zeros(table)).map_err(io)?;
    let bits = table.min_precision_bits().unwrap_or(MIN_PRECISION_BITS);
    let meta = ZeroMeta {
        source: table.source().to_string(),
        count: table.count(),
        digits: digits_for_bits(bits),
        precision_bits: bits,
    };
    let mp = meta_path(path);
    let text = toml::to_string(&meta).map_err(|e| ZerosError::Meta { path: mp.clone(), message: e.to_string() })?;
    std::fs::write(&mp, text).map_err(|source| ZerosError::Io { path: mp, source })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationEntry {
    pub index: usize,
    pub abs_zeta: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub tolerance: f64,
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed = self.failures().count();
        write!(f, "{} zeros checked, {} failed (tolerance {:e})", self.entries.len(), failed, self.tolerance)
    }
}

/// Marks each record pass iff `|ζ(1/2 + iγ)| < tolerance`. Evaluation uses
/// the double-precision path at 53 bits and MPFR when `working_bits` is
/// larger.
pub fn validate_zeros(
    table: &ZeroTable,
    kernel: &ZetaKernel,
    tolerance: f64,
    working_bits: u32,
    workers: usize,
) -> Result<ValidationReport, ZetaError> {
    let entries: Vec<Result<ValidationEntry, ZetaError>> = with_workers(workers, || {
        table
            .records()
            .par_iter()
            .map(|r| {
                let abs_zeta = abs_zeta_on_line(kernel, &r.gamma, working_bits)?;
                Ok(ValidationEntry { index: r.index, abs_zeta, pass: abs_zeta < tolerance })
            })
            .collect()
    });
    Ok(ValidationReport { tolerance, entries: entries.into_iter().collect::<Result<_, _>>()? })
}

/// `|ζ(1/2 + iγ)|`.
pub fn abs_zeta_on_line(kernel: &ZetaKernel, gamma: &Float, working_bits: u32) -> Result<f64, ZetaError> {
    if working_bits <= crate::zeta::FAST_PATH_BITS {
        Ok(kernel.zeta_c64(num_complex::Complex64::new(0.5, gamma.to_f64()))?.norm())
    } else {
        let half = Float::with_val(working_bits, 0.5);
        let s = ComplexHp::new(&half, &Float::with_val(working_bits, gamma));
        Ok(kernel.zeta(&s, working_bits)?.abs().to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "14.134725141734693790\n21.022039638771554993\n";

    #[test]
    fn parse_two_records() {
        let t = parse_zeros(TWO, 64, "test").unwrap();
        assert_eq!(t.count(), 2);
        assert_eq!(t.records()[1].index, 2);
        assert_eq!(t.records()[0].precision_bits, 66);
    }

    #[test]
    fn empty_and_comments() {
        assert_eq!(parse_zeros("", 64, "e").unwrap().count(), 0);
        let t = parse_zeros("# header\n\n1 14.134725141734693790 # first\n2 21.022039638771554993\n", 64, "c").unwrap();
        assert_eq!(t.count(), 2);
    }

    #[test]
    fn parse_errors() {
        let swapped = "21.022039638771554993\n14.134725141734693790\n";
        assert!(matches!(parse_zeros(swapped, 64, "s"), Err(ZerosError::Monotonicity { line: 2 })));
        assert!(matches!(parse_zeros("14.13472514\n", 64, "p"), Err(ZerosError::Precision { .. })));
        assert!(matches!(parse_zeros("14.1347251417346937x0\n", 64, "x"), Err(ZerosError::Parse { .. })));
        assert!(matches!(parse_zeros("-14.134725141734693790\n", 64, "n"), Err(ZerosError::Parse { .. })));
        assert!(matches!(
            parse_zeros("2 14.134725141734693790\n", 64, "i"),
            Err(ZerosError::Index { expected: 1, .. })
        ));
        assert!(matches!(parse_zeros(TWO, 80, "hi"), Err(ZerosError::Precision { required: 80, .. })));
    }

    #[test]
    fn persist_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.txt");
        let text = "14.134725141734693790457251983562\n21.022039638771554992628479593897\n25.010857580145688763213790992563\n";
        let t = parse_zeros(text, 64, "unit test").unwrap();
        persist_zeros(&t, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
        let back = load_zeros(&path, 64).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.source(), "unit test");
        let meta: ZeroMeta = toml::from_str(&std::fs::read_to_string(meta_path(&path)).unwrap()).unwrap();
        assert_eq!(meta.count, 3);
        assert_eq!(meta.digits, 32);
    }

    #[test]
    fn validation_flags_non_zero() {
        let k = ZetaKernel::default();
        let t = parse_zeros("14.134725141734693790\n", 64, "v").unwrap();
        let r = validate_zeros(&t, &k, 1e-8, 64, 1).unwrap();
        assert!(r.passed());
        let bad = ZeroTable::new(
            vec![ZeroRecord { index: 1, gamma: Float::with_val(80, 14), precision_bits: 64 }],
            "bad",
        )
        .unwrap();
        let r = validate_zeros(&bad, &k, 1e-8, 53, 1).unwrap();
        assert!(!r.passed());
        assert!(r.entries[0].abs_zeta > 1e-3);
        let empty = ZeroTable::new(Vec::new(), "none").unwrap();
        assert!(validate_zeros(&empty, &k, 1e-8, 64, 1).unwrap().passed());
    }
}
