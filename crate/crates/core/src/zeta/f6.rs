//! The Euler factor `F₆(s) = ∏_p F6_p(p^{-s})` with the exact local factor
//! `F6_p(x) = (1-2x)(1-x)^{-2}(1-x²)^{-1}(1-x³)^{-2}(1-x⁴)^{-3}(1-x⁵)^{-6}(1-x⁶)^{-9}`.
//!
//! `ln F6_p(x) = Σ_{j≥7} g_j x^j` with `g_j = (Σ_{d|j, d≤6} d·e_d − 2^j)/j`,
//! which gives both a cancellation-free evaluation for small `x` and the
//! tail bound `|ln F_tail| ≤ S(r) Σ_{n>P} n^{-7σ}`, `S(r) = Σ |g_j| r^{j-7}`.

use num_complex::Complex64;
use rug::{Complex, Float};

use super::{complex_at, ZetaError, ZetaKernel, FAST_PATH_BITS};
use crate::hp::ComplexHp;

/// Exponents `e_d` of `(1 - x^d)^{-e_d}`, `d = 1..6`.
const EXPONENTS: [u32; 6] = [2, 1, 2, 3, 6, 9];
/// Number of `g_j` kept for the tail bound.
pub(super) const LOG_TERMS: usize = 400;
/// Below this `|x|` the log series replaces the closed form.
const SERIES_RADIUS: f64 = 0.1;
const SERIES_TERMS: usize = 40;

/// Result of [`ZetaKernel::f6`]: the truncated product and an estimate of
/// `|F₆(s) − value|` from the primes beyond the bound.
#[derive(Debug, Clone, PartialEq)]
pub struct F6Value {
    pub value: ComplexHp,
    pub tail_bound: f64,
}

/// `g_0 … g_{terms}` (the first seven vanish).
pub fn f6_log_coefficients(terms: usize) -> Vec<f64> {
    (0..=terms)
        .map(|j| {
            if j < 7 {
                return 0.0;
            }
            let mut divisor_part = 0.0;
            for (i, &e) in EXPONENTS.iter().enumerate() {
                let d = i + 1;
                if j % d == 0 {
                    divisor_part += (d as u32 * e) as f64;
                }
            }
            (divisor_part - 2f64.powi(j as i32)) / j as f64
        })
        .collect()
}

/// The closed-form local factor in double precision.
pub fn f6_local_factor(x: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut den = one;
    let mut xd = one;
    for &e in &EXPONENTS {
        xd *= x;
        den *= (one - xd).powu(e);
    }
    (one - 2.0 * x) / den
}

fn local_log_series(x: Complex64, g: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in (7..=SERIES_TERMS).rev() {
        acc = acc * x + g[j];
    }
    // acc = Σ g_j x^{j-7}
    acc * x.powu(7)
}

/// `S(r) = Σ_{j≥7} |g_j| r^{j-7}`, infinite once `r` nears the singularity at 1/2.
fn tail_series(r: f64, g: &[f64]) -> f64 {
    if 2.0 * r >= 0.95 {
        return f64::INFINITY;
    }
    let mut s = 0.0;
    let mut rp = 1.0;
    for gj in &g[7..] {
        s += gj.abs() * rp;
        rp *= r;
    }
    // |g_j| <= 2^{j+1}/j beyond the table
    let j = (g.len() - 1) as f64;
    s + 2f64.powf(j + 2.0) * r.powf(j - 6.0) / (j * (1.0 - 2.0 * r))
}

/// Estimate of `|F₆ − F₆^{(P)}|` given `|F₆^{(P)}|`.
pub(super) fn tail_bound(sigma: f64, prime_bound: u64, abs_value: f64, g: &[f64]) -> f64 {
    let p = prime_bound as f64;
    let r = (p + 1.0).powf(-sigma);
    let a = 7.0 * sigma;
    let zsum = p.powf(1.0 - a) / (a - 1.0);
    abs_value * (tail_series(r, g) * zsum).exp_m1()
}

fn powi(z: &Complex, n: u32) -> Complex {
    let mut out = Complex::with_val(z.prec(), 1);
    for _ in 0..n {
        out *= z;
    }
    out
}

impl ZetaKernel {
    fn f6_domain(&self, sigma: f64, prime_bound: u64) -> Result<(), ZetaError> {
        if !sigma.is_finite() {
            return Err(ZetaError::NonFinite);
        }
        if sigma < self.config.f6_min_sigma || 7.0 * sigma <= 1.0 {
            return Err(ZetaError::Domain { sigma, min: self.config.f6_min_sigma });
        }
        if prime_bound < 2 {
            return Err(ZetaError::PrimeBound);
        }
        Ok(())
    }

    fn check_tail(&self, tail: f64) -> Result<(), ZetaError> {
        match self.config.f6_tail_tolerance {
            Some(tolerance) if !(tail <= tolerance) => Err(ZetaError::TailTooLarge { tail, tolerance }),
            _ => Ok(()),
        }
    }

    /// `∏_{p ≤ prime_bound} F6_p(p^{-s})` and its tail estimate. Uses the
    /// double-precision path for `target_bits <= 53`.
    pub fn f6(&self, s: &ComplexHp, prime_bound: u64, target_bits: u32) -> Result<F6Value, ZetaError> {
        let v = self.f6_unchecked(s, prime_bound, target_bits)?;
        self.check_tail(v.tail_bound)?;
        Ok(v)
    }

    /// Like [`f6`](Self::f6) but never rejects a large tail.
    pub fn f6_unchecked(&self, s: &ComplexHp, prime_bound: u64, target_bits: u32) -> Result<F6Value, ZetaError> {
        let sigma = s.re().to_f64();
        self.f6_domain(sigma, prime_bound)?;
        if target_bits <= FAST_PATH_BITS {
            let (v, tail) = self.f6_c64_unchecked(s.to_c64(), prime_bound)?;
            return Ok(F6Value { value: ComplexHp::from_c64(v, target_bits.max(2)), tail_bound: tail });
        }
        let primes = self.primes(prime_bound);
        let prec = target_bits + 16 + (primes.len() as f64 + 1.0).log2().ceil() as u32;
        let s = complex_at(prec, s.re(), s.im());
        let one = Complex::with_val(prec, 1);
        let mut prod = one.clone();
        for &p in primes.iter() {
            let lnp = Float::with_val(prec, p).ln();
            let x = Complex::with_val(prec, -Complex::with_val(prec, &s * &lnp)).exp();
            let mut den = one.clone();
            let mut xd = one.clone();
            for &e in &EXPONENTS {
                xd *= &x;
                den *= powi(&Complex::with_val(prec, &one - &xd), e);
            }
            let num = Complex::with_val(prec, &one - Complex::with_val(prec, &x * 2u32));
            prod *= num / den;
        }
        let abs = Float::with_val(53, prod.abs_ref()).to_f64();
        let tail = tail_bound(sigma, prime_bound, abs, &self.f6_log);
        Ok(F6Value { value: ComplexHp::from_complex(Complex::with_val(target_bits, prod)), tail_bound: tail })
    }

    /// Double-precision `F₆(s)` truncated at `prime_bound`, with tail estimate.
    pub fn f6_c64(&self, s: Complex64, prime_bound: u64) -> Result<(Complex64, f64), ZetaError> {
        let v = self.f6_c64_unchecked(s, prime_bound)?;
        self.check_tail(v.1)?;
        Ok(v)
    }

    pub(crate) fn f6_c64_unchecked(&self, s: Complex64, prime_bound: u64) -> Result<(Complex64, f64), ZetaError> {
        self.f6_domain(s.re, prime_bound)?;
        let mut direct = Complex64::new(1.0, 0.0);
        let mut log = Complex64::new(0.0, 0.0);
        for &p in self.primes(prime_bound).iter() {
            let x = (-s * (p as f64).ln()).exp();
            if x.norm() < SERIES_RADIUS {
                log += local_log_series(x, &self.f6_log);
            } else {
                direct *= f6_local_factor(x);
            }
        }
        let v = if log == Complex64::new(0.0, 0.0) { direct } else { direct * log.exp() };
        Ok((v, tail_bound(s.re, prime_bound, v.norm(), &self.f6_log)))
    }
}

/// `(k, e)` for the `ζ(ks)^e` in the denominator of `h(s)`.
const H_FACTORS: [(u32, u32); 6] = [(1, 1), (2, 1), (3, 2), (4, 3), (5, 6), (6, 9)];

impl ZetaKernel {
    /// `h(s) = Σ (-1)^{ω(n)} n^{-s}` through
    /// `F₆(s)/(ζ(s)ζ(2s)ζ²(3s)ζ³(4s)ζ⁶(5s)ζ⁹(6s))`, which continues it to
    /// `Re s > 1/6`. Returns the value and the `F₆` tail estimate.
    pub fn h_factorized(&self, s: &ComplexHp, prime_bound: u64, target_bits: u32) -> Result<F6Value, ZetaError> {
        let prec = target_bits.max(FAST_PATH_BITS + 1) + 16;
        let f6 = self.f6_unchecked(s, prime_bound, prec)?;
        let s = complex_at(prec, s.re(), s.im());
        let mut den = Complex::with_val(prec, 1);
        for (k, e) in H_FACTORS {
            let z = self.zeta(&ComplexHp::from_complex(Complex::with_val(prec, &s * k)), prec)?;
            den *= powi(z.as_complex(), e);
        }
        let value = Complex::with_val(target_bits.max(2), f6.value.as_complex() / den);
        Ok(F6Value { value: ComplexHp::from_complex(value), tail_bound: f6.tail_bound })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::fk_tail_coefficients;
    use rug::Rational;

    #[test]
    fn log_coefficients_start_at_seven() {
        let g = f6_log_coefficients(9);
        assert!(g[..7].iter().all(|&x| x == 0.0));
        assert_eq!(g[7], -18.0);
    }

    #[test]
    fn closed_form_matches_integer_series() {
        let f = fk_tail_coefficients(6, 30).unwrap();
        let x = Complex64::new(0.03, 0.02);
        let mut series = Complex64::new(0.0, 0.0);
        let mut xp = Complex64::new(1.0, 0.0);
        for c in f.coefficients() {
            series += xp * c.to_f64();
            xp *= x;
        }
        assert!((f6_local_factor(x) - series).norm() < 1e-15);
        let via_log = local_log_series(x, &f6_log_coefficients(60)).exp();
        assert!((via_log - series).norm() < 1e-15);
    }

    #[test]
    fn single_prime_is_exact() {
        let k = ZetaKernel::default();
        let s = Complex64::new(0.5, 1000.0);
        let (v, _) = k.f6_c64_unchecked(s, 2).unwrap();
        let x = (-s * 2f64.ln()).exp();
        assert_eq!(v, f6_local_factor(x));
    }

    #[test]
    fn rational_product_at_one() {
        // exact rational local factors over p <= 2000 against the MP path
        let k = ZetaKernel::default();
        let mut exact = Rational::from(1);
        for p in crate::primes::primes_up_to(2000) {
            let x = Rational::from((1, p));
            let mut den = Rational::from(1);
            let mut xd = Rational::from(1);
            for &e in &EXPONENTS {
                xd *= &x;
                let f = Rational::from(1) - &xd;
                for _ in 0..e {
                    den *= &f;
                }
            }
            exact *= (Rational::from(1) - Rational::from(&x * 2u32)) / den;
        }
        let v = k.f6_unchecked(&ComplexHp::from_f64(1.0, 0.0, 128), 2000, 100).unwrap();
        let diff = Float::with_val(128, v.value.re() - &exact).abs();
        assert!(diff < 1e-28, "{diff}");
        let fast = k.f6_c64(Complex64::new(1.0, 0.0), 2000).unwrap().0;
        assert!((fast.re - exact.to_f64()).abs() < 1e-14);
        assert!(v.tail_bound < 1e-15);
    }

    #[test]
    fn doubling_bound_within_tail() {
        let k = ZetaKernel::default();
        for s in [Complex64::new(0.5, 14.1), Complex64::new(0.25, 7.0)] {
            let (a, ta) = k.f6_c64(s, 10_000).unwrap();
            let (b, _) = k.f6_c64(s, 100_000).unwrap();
            assert!((a - b).norm() < ta, "{s}: {} vs {ta}", (a - b).norm());
        }
    }

    #[test]
    fn domain_and_tolerance() {
        let k = ZetaKernel::default();
        assert!(matches!(k.f6_c64(Complex64::new(0.1, 0.0), 100), Err(ZetaError::Domain { .. })));
        assert!(matches!(k.f6_c64(Complex64::new(1.0, 0.0), 1), Err(ZetaError::PrimeBound)));
        let strict = ZetaKernel::new(super::super::ZetaConfig { f6_tail_tolerance: Some(1e-10), ..Default::default() });
        assert!(matches!(strict.f6_c64(Complex64::new(0.25, 3.0), 1000), Err(ZetaError::TailTooLarge { .. })));
        assert!(strict.f6_c64(Complex64::new(0.5, 3.0), 100_000).is_ok());
    }

    #[test]
    fn h_factorized_matches_local_products() {
        // ∏_p (1-2x)/(1-x) with x = p^{-3}, p ≤ 10⁵, tail below 1e-10
        let kernel = ZetaKernel::new(Default::default());
        let mut direct = 1.0f64;
        for &p in kernel.primes(100_000).iter() {
            let x = (p as f64).powi(-3);
            direct *= (1.0 - 2.0 * x) / (1.0 - x);
        }
        let s = ComplexHp::from_f64(3.0, 0.0, 80);
        let h = kernel.h_factorized(&s, 1000, 80).unwrap().value.to_c64();
        assert!((h.re - direct).abs() < 1e-9, "{h} vs {direct}");
        assert!(h.im.abs() < 1e-20);
    }

    #[test]
    fn h_vanishes_at_one() {
        let kernel = ZetaKernel::new(Default::default());
        let s = ComplexHp::from_f64(1.0 + 1e-6, 0.0, 80);
        let h = kernel.h_factorized(&s, 10_000, 80).unwrap().value.to_c64();
        assert!(h.norm() < 1e-4 && h.norm() > 0.0, "{h}");
    }
}
