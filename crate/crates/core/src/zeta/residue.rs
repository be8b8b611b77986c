//! Residues of the Mellin transforms at `ρ = 1/2 + iγ` (and at `ρ/2` for the
//! Omega problem), all sharing the factor `1/(ρ ζ′(ρ))`.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use super::{ZetaError, ZetaKernel, FAST_PATH_BITS};
use crate::hp::{digits_for_bits, format_decimal, parse_decimal, parse_signed_decimal, ComplexHp};
use crate::parallel::with_workers;
use crate::zeros::ZeroRecord;
use crate::{Line, Problem};

/// `(k, e)` pairs: the denominator is `∏ ζ(k w)^e`, with `w = ρ` on the half
/// line and `w = ρ/2` on the quarter line.
const HALF_FACTORS: [(u32, u32); 5] = [(2, 1), (3, 2), (4, 3), (5, 6), (6, 9)];
const QUARTER_FACTORS: [(u32, u32); 5] = [(1, 1), (3, 2), (4, 3), (5, 6), (6, 9)];

#[derive(Debug, thiserror::Error)]
pub enum ResidueError {
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error("|ζ(1/2 + iγ)| = {abs_zeta:e} at γ = {gamma} exceeds {tolerance:e}; not a zero")]
    NotAZero { gamma: String, abs_zeta: f64, tolerance: f64 },
    #[error("ζ′(ρ) vanishes at working precision for γ = {gamma}")]
    DerivativeVanishes { gamma: String },
    #[error("{factor} vanishes at working precision for γ = {gamma}")]
    FactorVanishes { gamma: String, factor: String },
    #[error("{problem} residues are not defined on the {line} line")]
    Unsupported { problem: Problem, line: Line },
    #[error("residue table: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One residue `r_γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residue {
    pub gamma: Float,
    pub value: ComplexHp,
    pub problem: Problem,
    pub line: Line,
    pub precision_bits: u32,
    /// Prime bound used for `F₆` (Omega only).
    pub prime_bound: Option<u64>,
    /// Tail estimate of `F₆` at the relevant argument (Omega only).
    pub f6_tail: Option<f64>,
}

impl Residue {
    pub fn to_c64(&self) -> Complex64 {
        self.value.to_c64()
    }
}

fn gamma_label(gamma: &Float) -> String {
    format_decimal(gamma, 25)
}

fn factor_name(k: u32, quarter: bool) -> String {
    match (quarter, k % 2) {
        (false, _) => format!("ζ({k}ρ)"),
        (true, 0) => format!("ζ({}ρ)", k / 2),
        (true, _) if k == 1 => "ζ(ρ/2)".to_string(),
        (true, _) => format!("ζ({k}ρ/2)"),
    }
}

impl ZetaKernel {
    /// `1/(ρ ζ′(ρ))`, problem MERTENS.
    pub fn residue_m(&self, gamma: &Float, working_bits: u32) -> Result<Residue, ResidueError> {
        self.residue(gamma, Problem::Mertens, Line::Half, working_bits, 0)
    }

    /// `ζ(2ρ)/(ρ ζ′(ρ))`, problem POLYA.
    pub fn residue_l(&self, gamma: &Float, working_bits: u32) -> Result<Residue, ResidueError> {
        self.residue(gamma, Problem::Polya, Line::Half, working_bits, 0)
    }

    /// `F₆(ρ)/(ζ(2ρ)ζ²(3ρ)ζ³(4ρ)ζ⁶(5ρ)ζ⁹(6ρ)) · 1/(ρ ζ′(ρ))`, problem OMEGA.
    pub fn residue_h(&self, gamma: &Float, prime_bound: u64, working_bits: u32) -> Result<Residue, ResidueError> {
        self.residue(gamma, Problem::Omega, Line::Half, working_bits, prime_bound)
    }

    /// `F₆(ρ/2)/(ζ(ρ/2)ζ²(3ρ/2)ζ³(2ρ)ζ⁶(5ρ/2)ζ⁹(3ρ)) · 1/(ρ ζ′(ρ))`. The
    /// consumer applies the extra `e^{-u/4}` damping.
    pub fn residue_h_quarter(&self, gamma: &Float, prime_bound: u64, working_bits: u32) -> Result<Residue, ResidueError> {
        self.residue(gamma, Problem::Omega, Line::Quarter, working_bits, prime_bound)
    }

    /// Dispatches on `(problem, line)`. `prime_bound` is ignored unless the
    /// problem is OMEGA.
    pub fn residue(
        &self,
        gamma: &Float,
        problem: Problem,
        line: Line,
        working_bits: u32,
        prime_bound: u64,
    ) -> Result<Residue, ResidueError> {
        if line == Line::Quarter && problem != Problem::Omega {
            return Err(ResidueError::Unsupported { problem, line });
        }
        let working_bits = working_bits.max(2);
        let (value, f6_tail) = if working_bits <= FAST_PATH_BITS {
            let (v, tail) = self.residue_c64(gamma, problem, line, prime_bound)?;
            (ComplexHp::from_c64(v, working_bits), tail)
        } else {
            self.residue_mp(gamma, problem, line, working_bits, prime_bound)?
        };
        if !value.is_finite() || value.is_zero() {
            return Err(ResidueError::DerivativeVanishes { gamma: gamma_label(gamma) });
        }
        Ok(Residue {
            gamma: gamma.clone(),
            value,
            problem,
            line,
            precision_bits: working_bits,
            prime_bound: (problem == Problem::Omega).then_some(prime_bound),
            f6_tail,
        })
    }

    fn residue_c64(&self, gamma: &Float, problem: Problem, line: Line, prime_bound: u64) -> Result<(Complex64, Option<f64>), ResidueError> {
        let rho = Complex64::new(0.5, gamma.to_f64());
        let (z, d) = self.zeta_with_derivative_c64(rho)?;
        self.check_zero(gamma, z.norm())?;
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(ResidueError::DerivativeVanishes { gamma: gamma_label(gamma) });
        }
        let rm = 1.0 / (rho * d);
        match problem {
            Problem::Mertens => Ok((rm, None)),
            Problem::Polya => Ok((self.zeta_c64(2.0 * rho)? * rm, None)),
            Problem::Omega => {
                let (w, factors) = match line {
                    Line::Half => (rho, &HALF_FACTORS),
                    Line::Quarter => (rho * 0.5, &QUARTER_FACTORS),
                };
                let (f6, tail) = match line {
                    Line::Half => self.f6_c64(w, prime_bound)?,
                    Line::Quarter => self.f6_c64_unchecked(w, prime_bound)?,
                };
                let mut den = Complex64::new(1.0, 0.0);
                for &(k, e) in factors {
                    let zk = self.zeta_c64(w * k as f64)?;
                    if zk.norm() < 1e-14 {
                        return Err(ResidueError::FactorVanishes {
                            gamma: gamma_label(gamma),
                            factor: factor_name(k, line == Line::Quarter),
                        });
                    }
                    den *= zk.powu(e);
                }
                Ok((f6 / den * rm, Some(tail)))
            }
        }
    }

    fn residue_mp(
        &self,
        gamma: &Float,
        problem: Problem,
        line: Line,
        bits: u32,
        prime_bound: u64,
    ) -> Result<(ComplexHp, Option<f64>), ResidueError> {
        let prec = bits + 16;
        let rho = Complex::with_val(prec, (0.5, gamma));
        let (z, d) = self.zeta_with_derivative(&ComplexHp::from_complex(rho.clone()), prec)?;
        self.check_zero(gamma, z.abs().to_f64())?;
        if d.is_zero() || !d.is_finite() {
            return Err(ResidueError::DerivativeVanishes { gamma: gamma_label(gamma) });
        }
        let rm = Complex::with_val(prec, 1) / Complex::with_val(prec, &rho * d.as_complex());
        let tiny = Float::with_val(32, Float::i_exp(1, 8 - bits as i32));
        let (value, tail) = match problem {
            Problem::Mertens => (rm, None),
            Problem::Polya => {
                let z2 = self.zeta(&ComplexHp::from_complex(Complex::with_val(prec, &rho * 2u32)), prec)?;
                (rm * z2.as_complex(), None)
            }
            Problem::Omega => {
                let (w, factors) = match line {
                    Line::Half => (rho.clone(), &HALF_FACTORS),
                    Line::Quarter => (Complex::with_val(prec, &rho / 2u32), &QUARTER_FACTORS),
                };
                let w_hp = ComplexHp::from_complex(w.clone());
                let f6 = match line {
                    Line::Half => self.f6(&w_hp, prime_bound, prec)?,
                    Line::Quarter => self.f6_unchecked(&w_hp, prime_bound, prec)?,
                };
                let mut den = Complex::with_val(prec, 1);
                for &(k, e) in factors {
                    let zk = self.zeta(&ComplexHp::from_complex(Complex::with_val(prec, &w * k)), prec)?;
                    if zk.abs() < tiny {
                        return Err(ResidueError::FactorVanishes {
                            gamma: gamma_label(gamma),
                            factor: factor_name(k, line == Line::Quarter),
                        });
                    }
                    for _ in 0..e {
                        den *= zk.as_complex();
                    }
                }
                (Complex::with_val(prec, f6.value.as_complex() / den) * rm, Some(f6.tail_bound))
            }
        };
        Ok((ComplexHp::from_complex(Complex::with_val(bits, value)), tail))
    }

    fn check_zero(&self, gamma: &Float, abs_zeta: f64) -> Result<(), ResidueError> {
        let tolerance = self.config.zero_tolerance;
        if abs_zeta < tolerance {
            Ok(())
        } else {
            Err(ResidueError::NotAZero { gamma: gamma_label(gamma), abs_zeta, tolerance })
        }
    }
}

/// Residues for a run of zeros, keyed by zero index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResidueSet {
    pub entries: Vec<(usize, Residue)>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    index: usize,
    gamma: String,
    re: String,
    im: String,
    problem: Problem,
    line: Line,
    precision_bits: u32,
    prime_bound: Option<u64>,
}

impl ResidueSet {
    /// Computes residues for every record on `workers` threads. Errors are
    /// reported for the lowest failing index.
    pub fn compute(
        kernel: &ZetaKernel,
        zeros: &[ZeroRecord],
        problem: Problem,
        line: Line,
        working_bits: u32,
        prime_bound: u64,
        workers: usize,
    ) -> Result<Self, ResidueError> {
        let results: Vec<Result<(usize, Residue), ResidueError>> = with_workers(workers, || {
            zeros
                .par_iter()
                .map(|z| kernel.residue(&z.gamma, problem, line, working_bits, prime_bound).map(|r| (z.index, r)))
                .collect()
        });
        let entries = results.into_iter().collect::<Result<Vec<_>, _>>()?;
        Ok(ResidueSet { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Residue)> {
        self.entries.iter()
    }

    pub fn values_c64(&self) -> Vec<Complex64> {
        self.entries.iter().map(|(_, r)| r.to_c64()).collect()
    }

    pub fn gammas_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, r)| r.gamma.to_f64()).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), ResidueError> {
        let mut wtr = csv::Writer::from_writer(w);
        for (index, r) in &self.entries {
            let digits = digits_for_bits(r.precision_bits) + 1;
            let row = Row {
                index: *index,
                gamma: format_decimal(&r.gamma, digits_for_bits(r.gamma.prec())),
                re: format_decimal(r.value.re(), digits),
                im: format_decimal(r.value.im(), digits),
                problem: r.problem,
                line: r.line,
                precision_bits: r.precision_bits,
                prime_bound: r.prime_bound,
            };
            wtr.serialize(row).map_err(|e| ResidueError::Format(e.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, ResidueError> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut entries = Vec::new();
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(|e| ResidueError::Format(e.to_string()))?;
            let bits = row.precision_bits.max(2);
            let bad = |e: crate::hp::DecimalError| ResidueError::Format(e.to_string());
            let gamma = parse_decimal(&row.gamma, bits + 16).map_err(bad)?.value;
            let re = parse_signed_decimal(&row.re, bits).map_err(bad)?.value;
            let im = parse_signed_decimal(&row.im, bits).map_err(bad)?.value;
            entries.push((
                row.index,
                Residue {
                    gamma,
                    value: ComplexHp::new(&re, &im),
                    problem: row.problem,
                    line: row.line,
                    precision_bits: row.precision_bits,
                    prime_bound: row.prime_bound,
                    f6_tail: None,
                },
            ));
        }
        Ok(ResidueSet { entries })
    }

    pub fn save(&self, path: &Path) -> Result<(), ResidueError> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load(path: &Path) -> Result<Self, ResidueError> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G1: &str = "14.134725141734693790457251983562470270784257115699";
    const G2: &str = "21.022039638771554992628479593896902777334340524903";

    fn gamma(text: &str, bits: u32) -> Float {
        parse_decimal(text, bits).unwrap().value
    }

    #[test]
    fn first_mertens_residue() {
        let k = ZetaKernel::default();
        let r = k.residue_m(&gamma(G1, 160), 128).unwrap();
        let (z, d) = k.zeta_with_derivative(&ComplexHp::from_complex(Complex::with_val(160, (0.5, gamma(G1, 160)))), 140).unwrap();
        assert!(z.abs() < 1e-35);
        let rho = Complex64::new(0.5, gamma(G1, 64).to_f64());
        let expected = 1.0 / (rho.norm() * d.to_c64().norm());
        assert!((r.to_c64().norm() - expected).abs() < 1e-15);
        // double precision agrees
        let fast = k.residue_m(&gamma(G1, 64), 53).unwrap();
        assert!((fast.to_c64() - r.to_c64()).norm() < 1e-13);
    }

    #[test]
    fn polya_and_omega_factorisations() {
        let k = ZetaKernel::default();
        let g = gamma(G1, 128);
        let m = k.residue_m(&g, 100).unwrap().to_c64();
        let l = k.residue_l(&g, 100).unwrap().to_c64();
        let rho = Complex64::new(0.5, g.to_f64());
        let z2 = k.zeta_c64(2.0 * rho).unwrap();
        assert!((l - z2 * m).norm() < 1e-14);
        let h = k.residue_h(&g, 100_000, 53).unwrap();
        let f6 = k.f6_c64(rho, 100_000).unwrap().0;
        let mut den = Complex64::new(1.0, 0.0);
        for (kk, e) in HALF_FACTORS {
            den *= k.zeta_c64(rho * kk as f64).unwrap().powu(e);
        }
        assert!((h.to_c64() - f6 / den * m).norm() < 1e-14);
        assert!(h.f6_tail.unwrap() < 1e-10);
        let q = k.residue_h_quarter(&g, 100_000, 53).unwrap();
        assert!(q.to_c64().norm() > 0.0);
        assert_eq!(q.line, Line::Quarter);
    }

    #[test]
    fn not_a_zero_and_unsupported() {
        let k = ZetaKernel::default();
        assert!(matches!(k.residue_m(&Float::with_val(64, 14.0), 64), Err(ResidueError::NotAZero { .. })));
        assert!(matches!(
            k.residue(&gamma(G1, 64), Problem::Mertens, Line::Quarter, 53, 0),
            Err(ResidueError::Unsupported { .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let k = ZetaKernel::default();
        let zeros: Vec<ZeroRecord> = [G1, G2]
            .iter()
            .enumerate()
            .map(|(i, g)| ZeroRecord { index: i + 1, gamma: gamma(g, 150), precision_bits: 150 })
            .collect();
        let set = ResidueSet::compute(&k, &zeros, Problem::Omega, Line::Half, 80, 10_000, 2).unwrap();
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,gamma,re,im,problem,line,precision_bits,prime_bound\n"));
        let back = ResidueSet::read_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        for ((i, a), (j, b)) in set.iter().zip(back.iter()) {
            assert_eq!(i, j);
            assert_eq!(a.value, b.value);
            assert_eq!(b.prime_bound, Some(10_000));
        }
    }
}
