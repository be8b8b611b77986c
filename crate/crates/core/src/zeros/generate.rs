//! Desk-scale generation of zero tables.
//!
//! Zeros are isolated as sign changes of Hardy's `Z(t) = e^{iθ(t)} ζ(1/2+it)`
//! between Gram points, grouped into Rosser blocks bounded by good Gram
//! points: a block `[g_a, g_b]` must contain `b − a` zeros, and intervals are
//! subdivided until they are all seen. Brackets are then refined in double
//! precision and polished by multiprecision Newton steps on `ζ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rug::{Complex, Float};

use super::{ZeroRecord, ZeroTable, ZerosError, GUARD_BITS};
use crate::hp::{bits_for_digits, format_decimal, parse_decimal, ComplexHp};
use crate::parallel::with_workers;
use crate::zeta::{ZetaError, ZetaKernel};

const MAX_SUBDIVISION: u32 = 14;
const MAX_NEWTON: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error("Gram block starting at g_{start}: {found} sign changes, {expected} zeros expected")]
    Missing { start: i64, expected: usize, found: usize },
    #[error("Newton iteration did not converge for zero {index}")]
    NoConvergence { index: usize },
    #[error(transparent)]
    Table(#[from] ZerosError),
}

/// Riemann–Siegel θ by its Stirling expansion; accurate to `~1e-14` for `t >= 9`.
pub fn riemann_siegel_theta(t: f64) -> f64 {
    let t2 = t * t;
    let mut corr = 1.0 / (48.0 * t);
    let mut p = t;
    for (num, den) in [(7.0, 5760.0), (31.0, 80640.0), (381.0, 1290240.0)] {
        p *= t2;
        corr += num / (den * p);
    }
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0 + corr
}

/// Hardy's `Z(t)`, real for real `t`.
pub fn hardy_z(kernel: &ZetaKernel, t: f64) -> Result<f64, ZetaError> {
    let z = kernel.zeta_c64(Complex64::new(0.5, t))?;
    Ok((Complex64::from_polar(1.0, riemann_siegel_theta(t)) * z).re)
}

fn lambert_w(x: f64) -> f64 {
    let mut w = (1.0 + x).ln();
    for _ in 0..50 {
        let e = w.exp();
        let step = (w * e - x) / (e * (w + 1.0));
        w -= step;
        if step.abs() < 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// Gram point `g_n`, the solution of `θ(g_n) = nπ` (`n >= -1`).
pub fn gram_point(n: i64) -> f64 {
    let target = n as f64 * PI;
    // asymptotically θ(t) ≈ (t/2) ln(t/(2πe)) − π/8
    let mut t = 2.0 * PI * std::f64::consts::E * lambert_w((n as f64 + 0.125) / std::f64::consts::E).exp();
    t = t.max(9.0);
    for _ in 0..60 {
        let step = (riemann_siegel_theta(t) - target) / (0.5 * (t / (2.0 * PI)).ln());
        t -= step;
        if step.abs() < 1e-13 * t {
            break;
        }
    }
    t
}

fn gram_sign(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign-change brackets covering the first `count` zeros.
fn isolate(kernel: &ZetaKernel, count: usize) -> Result<Vec<(f64, f64, f64, f64)>, GenerateError> {
    let mut brackets = Vec::with_capacity(count + 8);
    let mut a: i64 = -1;
    let mut ga = gram_point(a);
    let mut za = hardy_z(kernel, ga)?;
    while brackets.len() < count {
        // extend to the next good Gram point
        let mut pts = vec![(ga, za)];
        let mut b = a;
        loop {
            b += 1;
            let g = gram_point(b);
            let z = hardy_z(kernel, g)?;
            pts.push((g, z));
            if gram_sign(b) * z > 0.0 {
                break;
            }
        }
        let expected = (b - a) as usize;
        let mut depth = 0;
        loop {
            let found = pts.windows(2).filter(|w| w[0].1 * w[1].1 < 0.0).count();
            if found == expected {
                break;
            }
            if found > expected || depth == MAX_SUBDIVISION {
                return Err(GenerateError::Missing { start: a, expected, found });
            }
            let mut refined = Vec::with_capacity(2 * pts.len());
            for w in pts.windows(2) {
                refined.push(w[0]);
                let m = 0.5 * (w[0].0 + w[1].0);
                refined.push((m, hardy_z(kernel, m)?));
            }
            refined.push(*pts.last().expect("non-empty"));
            pts = refined;
            depth += 1;
        }
        for w in pts.windows(2) {
            if w[0].1 * w[1].1 < 0.0 {
                brackets.push((w[0].0, w[1].0, w[0].1, w[1].1));
            }
        }
        a = b;
        ga = pts.last().expect("non-empty").0;
        za = pts.last().expect("non-empty").1;
    }
    brackets.truncate(count);
    Ok(brackets)
}

/// Illinois-variant regula falsi on `Z` inside a sign-change bracket.
fn refine_f64(kernel: &ZetaKernel, (mut lo, mut hi, mut flo, mut fhi): (f64, f64, f64, f64)) -> Result<f64, ZetaError> {
    let mut side = 0;
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let mut m = (lo * fhi - hi * flo) / (fhi - flo);
        if !(m > lo && m < hi) {
            m = 0.5 * (lo + hi);
        }
        let fm = hardy_z(kernel, m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm * flo < 0.0 {
            hi = m;
            fhi = fm;
            if side == -1 {
                flo *= 0.5;
            }
            side = -1;
        } else {
            lo = m;
            flo = fm;
            if side == 1 {
                fhi *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Newton on `ζ(1/2 + it)` with increasing precision, up to `bits`.
fn polish(kernel: &ZetaKernel, t0: f64, bits: u32, index: usize) -> Result<Float, GenerateError> {
    let mut t = Float::with_val(bits, t0);
    let mut prec = 64u32;
    let tol = Float::with_val(bits, &t) >> bits;
    for _ in 0..MAX_NEWTON {
        prec = (2 * prec).min(bits);
        let s = ComplexHp::from_complex(Complex::with_val(prec, (0.5, &t)));
        let (z, d) = kernel.zeta_with_derivative(&s, prec)?;
        // ζ(1/2+it) ≈ ζ′(ρ)·i(t − γ)
        let ratio = Complex::with_val(prec, z.as_complex() / d.as_complex());
        let delta = Float::with_val(prec, ratio.imag());
        t = Float::with_val(bits, &t - &delta);
        if prec == bits && delta.abs() <= tol {
            return Ok(t);
        }
    }
    Err(GenerateError::NoConvergence { index })
}

/// The first `count` zeros to `digits` significant digits.
pub fn generate_zeros(kernel: &ZetaKernel, count: usize, digits: usize, workers: usize) -> Result<ZeroTable, GenerateError> {
    let precision_bits = bits_for_digits(digits);
    let newton_bits = precision_bits + GUARD_BITS + 8;
    let brackets = isolate(kernel, count)?;
    let records: Vec<Result<ZeroRecord, GenerateError>> = with_workers(workers, || {
        brackets
            .par_iter()
            .enumerate()
            .map(|(i, &br)| {
                let t0 = refine_f64(kernel, br)?;
                let gamma = polish(kernel, t0, newton_bits, i + 1)?;
                let text = format_decimal(&gamma, digits);
                let gamma = parse_decimal(&text, precision_bits + GUARD_BITS).expect("formatted decimal").value;
                Ok(ZeroRecord { index: i + 1, gamma, precision_bits })
            })
            .collect()
    });
    let records = records.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(ZeroTable::new(
        records,
        format!("generated: Gram/Rosser isolation of Z(t), Newton on ζ at {newton_bits} bits"),
    )?)
}
