//! Euler–Maclaurin summation of `ζ(s)` and `ζ′(s)`.
//!
//! `ζ(s) = Σ_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2 + Σ_{k=1}^{K} T_k`, with
//! `T_k = c_k (s)_{2k-1} N^{-s-2k+1}` and `c_k = B_{2k}/(2k)!`. The Bernoulli
//! terms and their `s`-derivatives are advanced by ratio recurrences so no
//! rising factorial or large power is ever formed explicitly.

use num_complex::Complex64;
use rug::{Complex, Float, Rational};

use super::bernoulli::em_coefficients;
use super::plan::Plan;
use crate::primes::smallest_prime_factors;

/// Exact coefficients and their consecutive ratios.
#[derive(Debug, Clone)]
pub struct EmTables {
    c1: Rational,
    ratios: Vec<Rational>,
    c1_f64: f64,
    ratios_f64: Vec<f64>,
}

impl EmTables {
    /// Tables for up to `kmax` Bernoulli corrections.
    pub fn new(kmax: usize) -> Self {
        let c = em_coefficients(kmax + 1);
        let ratios: Vec<Rational> = c.windows(2).map(|w| Rational::from(&w[1] / &w[0])).collect();
        EmTables {
            c1_f64: c[0].to_f64(),
            ratios_f64: ratios.iter().map(Rational::to_f64).collect(),
            c1: c[0].clone(),
            ratios,
        }
    }

    pub fn kmax(&self) -> usize {
        self.ratios.len()
    }
}

/// `ζ(s)` and, if asked, `ζ′(s)` in double precision.
pub fn em_c64(s: Complex64, plan: &Plan, tables: &EmTables, derivative: bool) -> (Complex64, Complex64) {
    let n = plan.n;
    let spf = smallest_prime_factors(n);
    let mut pow = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut ln = vec![0.0f64; n + 1];
    pow[1] = Complex64::new(1.0, 0.0);
    for m in 2..=n {
        let p = spf[m] as usize;
        if p == m {
            ln[m] = (m as f64).ln();
            pow[m] = (-s * ln[m]).exp();
        } else {
            ln[m] = ln[p] + ln[m / p];
            pow[m] = pow[p] * pow[m / p];
        }
    }
    let mut z = Complex64::new(0.0, 0.0);
    let mut dz = Complex64::new(0.0, 0.0);
    for m in (1..n).rev() {
        z += pow[m];
        if derivative {
            dz -= pow[m] * ln[m];
        }
    }
    let nf = n as f64;
    let ln_n = ln[n];
    let ns = pow[n];
    let sm1 = s - 1.0;
    let a = ns * nf / sm1;
    z += a + ns * 0.5;
    if derivative {
        dz += -a * ln_n - a / sm1 - ns * (0.5 * ln_n);
    }
    let inv_n2 = 1.0 / (nf * nf);
    let mut t = s * ns * (tables.c1_f64 / nf);
    let mut d = ns * (tables.c1_f64 / nf);
    for k in 1..=plan.k {
        z += t;
        if derivative {
            dz += d - t * ln_n;
        }
        if k < plan.k {
            let a = s + (2 * k - 1) as f64;
            let b = s + (2 * k) as f64;
            let r = tables.ratios_f64[k - 1] * inv_n2;
            let ab = a * b;
            d = (d * ab + t * (a + b)) * r;
            t = t * ab * r;
        }
    }
    (z, dz)
}

/// `ζ(s)` and optionally `ζ′(s)` with every operation at `prec` bits.
pub fn em_mp(s: &Complex, plan: &Plan, tables: &EmTables, prec: u32, derivative: bool) -> (Complex, Option<Complex>) {
    let n = plan.n;
    let spf = smallest_prime_factors(n);
    let s = Complex::with_val(prec, s);
    let zero = Complex::new(prec);
    let mut pow: Vec<Complex> = vec![zero.clone(); n + 1];
    let mut ln: Vec<Float> = vec![Float::new(prec); n + 1];
    pow[1] = Complex::with_val(prec, 1);
    for m in 2..=n {
        let p = spf[m] as usize;
        if p == m {
            ln[m] = Float::with_val(prec, m).ln();
            let arg = Complex::with_val(prec, &s * &ln[m]);
            pow[m] = Complex::with_val(prec, -arg).exp();
        } else {
            ln[m] = Float::with_val(prec, &ln[p] + &ln[m / p]);
            pow[m] = Complex::with_val(prec, &pow[p] * &pow[m / p]);
        }
    }
    let mut z = zero.clone();
    let mut dz = zero.clone();
    for m in (1..n).rev() {
        z += &pow[m];
        if derivative {
            dz -= Complex::with_val(prec, &pow[m] * &ln[m]);
        }
    }
    let nf = Float::with_val(prec, n);
    let ln_n = &ln[n];
    let ns = &pow[n];
    let sm1 = Complex::with_val(prec, &s - 1u32);
    let a = Complex::with_val(prec, ns * &nf) / &sm1;
    z += &a;
    let half_ns = Complex::with_val(prec, ns / 2u32);
    z += &half_ns;
    if derivative {
        dz -= Complex::with_val(prec, &a * ln_n);
        dz -= Complex::with_val(prec, &a / &sm1);
        dz -= Complex::with_val(prec, &half_ns * ln_n);
    }
    let inv_n2 = Float::with_val(prec, 1u32) / Float::with_val(prec, nf.square_ref());
    let c1 = Float::with_val(prec, &tables.c1) / &nf;
    let mut d = Complex::with_val(prec, ns * &c1);
    let mut t = Complex::with_val(prec, &d * &s);
    for k in 1..=plan.k {
        z += &t;
        if derivative {
            dz += &d;
            dz -= Complex::with_val(prec, &t * ln_n);
        }
        if k < plan.k {
            let a = Complex::with_val(prec, &s + (2 * k - 1) as u32);
            let b = Complex::with_val(prec, &s + (2 * k) as u32);
            let r = Float::with_val(prec, &tables.ratios[k - 1]) * &inv_n2;
            let ab = Complex::with_val(prec, &a * &b);
            let apb = a + b;
            let mut nd = Complex::with_val(prec, &d * &ab);
            nd += Complex::with_val(prec, &t * &apb);
            d = nd * &r;
            t *= &ab;
            t *= &r;
        }
    }
    (z, derivative.then_some(dz))
}
