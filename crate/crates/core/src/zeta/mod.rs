//! Evaluation of ζ, ζ′, the Euler factor `F₆` and residues at zeros.
//!
//! Two arithmetic paths share one planner: a double-precision path
//! (`Complex64`) used when at most 53 working bits are requested, and an
//! MPFR path otherwise. Error control is heuristic-with-margin: truncation
//! parameters come from the standard Euler–Maclaurin remainder bound and
//! guard bits cover cancellation and rounding.

mod bernoulli;
mod em;
mod f6;
mod plan;
mod residue;

use num_complex::Complex64;
use rug::{Complex, Float};

pub use bernoulli::{bernoulli_even, em_coefficients};
pub use f6::{f6_local_factor, f6_log_coefficients, F6Value};
pub use plan::{plan as plan_em, Plan};
pub use residue::{Residue, ResidueError, ResidueSet};

use crate::hp::ComplexHp;
use crate::primes::primes_up_to;
use em::EmTables;

/// Largest working precision served by the double-precision path.
pub const FAST_PATH_BITS: u32 = 53;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ZetaError {
    #[error("ζ has a pole at s = 1")]
    Pole,
    #[error("|Im s| = {height} exceeds the configured ceiling {ceiling}")]
    HeightExceeded { height: f64, ceiling: f64 },
    #[error("{target_bits} bits unattainable within {max_terms} terms and {bernoulli_terms} Bernoulli corrections")]
    Unattainable { target_bits: u32, max_terms: usize, bernoulli_terms: usize },
    #[error("Re s = {sigma} is below the F6 domain bound {min}")]
    Domain { sigma: f64, min: f64 },
    #[error("F6 tail bound {tail:e} exceeds the requested accuracy {tolerance:e}")]
    TailTooLarge { tail: f64, tolerance: f64 },
    #[error("prime_bound must be at least 2")]
    PrimeBound,
    #[error("non-finite input")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaConfig {
    /// Ceiling on `|Im s|` for `Re s < 1`.
    pub height_ceiling: f64,
    /// For `Re s >= 1` the ceiling is scaled by this factor; `ζ(kρ)` in the
    /// Omega residues reaches height `6γ`.
    pub right_half_factor: f64,
    /// Size of the Bernoulli table (`K` never exceeds it).
    pub bernoulli_terms: usize,
    /// Largest truncation point `N` allowed.
    pub max_terms: usize,
    /// Primes up to this bound are sieved once at construction.
    pub prime_cache: u64,
    /// `f6` refuses `Re s` below this.
    pub f6_min_sigma: f64,
    /// When set, `f6` fails if its tail bound exceeds this value.
    pub f6_tail_tolerance: Option<f64>,
    /// Residues require `|ζ(ρ)|` below this before dividing by `ζ′(ρ)`.
    pub zero_tolerance: f64,
}

impl Default for ZetaConfig {
    fn default() -> Self {
        ZetaConfig {
            height_ceiling: 5000.0,
            right_half_factor: 8.0,
            bernoulli_terms: 256,
            max_terms: 4_000_000,
            prime_cache: 1_000_000,
            f6_min_sigma: 1.0 / 6.0,
            f6_tail_tolerance: None,
            zero_tolerance: 1e-8,
        }
    }
}

/// Immutable evaluator: configuration plus Bernoulli, prime and `F₆`
/// coefficient caches. Shareable across threads.
#[derive(Debug, Clone)]
pub struct ZetaKernel {
    config: ZetaConfig,
    tables: EmTables,
    primes: Vec<u64>,
    f6_log: Vec<f64>,
}

impl Default for ZetaKernel {
    fn default() -> Self {
        Self::new(ZetaConfig::default())
    }
}

impl ZetaKernel {
    pub fn new(config: ZetaConfig) -> Self {
        let tables = EmTables::new(config.bernoulli_terms.max(1));
        let primes = primes_up_to(config.prime_cache);
        ZetaKernel { tables, primes, f6_log: f6_log_coefficients(f6::LOG_TERMS), config }
    }

    pub fn config(&self) -> &ZetaConfig {
        &self.config
    }

    fn check_height(&self, re: f64, im: f64) -> Result<(), ZetaError> {
        if !re.is_finite() || !im.is_finite() {
            return Err(ZetaError::NonFinite);
        }
        let ceiling = if re >= 1.0 {
            self.config.height_ceiling * self.config.right_half_factor
        } else {
            self.config.height_ceiling
        };
        if im.abs() > ceiling {
            return Err(ZetaError::HeightExceeded { height: im.abs(), ceiling });
        }
        Ok(())
    }

    fn plan(&self, re: f64, im: f64, err_log2: f64, target_bits: u32) -> Result<Plan, ZetaError> {
        plan::plan(re, im, err_log2, self.tables.kmax(), self.config.max_terms).ok_or(ZetaError::Unattainable {
            target_bits,
            max_terms: self.config.max_terms,
            bernoulli_terms: self.tables.kmax(),
        })
    }

    fn guard_bits(plan: &Plan, im: f64) -> u32 {
        let n = plan.n as f64;
        let g = plan.log2_peak.max(0.0) + (n + 2.0 * plan.k as f64).log2() + (1.0 + im.abs() * n.ln()).log2() + 10.0;
        g.ceil() as u32
    }

    fn evaluate(&self, s: &ComplexHp, target_bits: u32, derivative: bool) -> Result<(ComplexHp, Option<ComplexHp>), ZetaError> {
        let target_bits = target_bits.max(2);
        let (re, im) = (s.re().to_f64(), s.im().to_f64());
        self.check_height(re, im)?;
        if *s.re() == 1 && s.im().is_zero() {
            return Err(ZetaError::Pole);
        }
        // the derivative picks up a factor ≈ ln N from the remainder
        let extra = if derivative { 6.0 } else { 0.0 };
        let plan = self.plan(re, im, -(target_bits as f64) - 1.0 - extra, target_bits)?;
        let prec = target_bits + Self::guard_bits(&plan, im) + extra as u32;
        let (z, dz) = em::em_mp(s.as_complex(), &plan, &self.tables, prec, derivative);
        let z = ComplexHp::from_complex(Complex::with_val(target_bits, z));
        let dz = dz.map(|d| ComplexHp::from_complex(Complex::with_val(target_bits, d)));
        Ok((z, dz))
    }

    /// `ζ(s)` with absolute error below `2^(1-target_bits)·max(1, |ζ(s)|)`.
    pub fn zeta(&self, s: &ComplexHp, target_bits: u32) -> Result<ComplexHp, ZetaError> {
        Ok(self.evaluate(s, target_bits, false)?.0)
    }

    /// `ζ′(s)` by the term-wise differentiated expansion.
    pub fn zeta_derivative(&self, s: &ComplexHp, target_bits: u32) -> Result<ComplexHp, ZetaError> {
        Ok(self.evaluate(s, target_bits, true)?.1.expect("derivative requested"))
    }

    /// `(ζ(s), ζ′(s))` from one pass.
    pub fn zeta_with_derivative(&self, s: &ComplexHp, target_bits: u32) -> Result<(ComplexHp, ComplexHp), ZetaError> {
        let (z, d) = self.evaluate(s, target_bits, true)?;
        Ok((z, d.expect("derivative requested")))
    }

    fn evaluate_c64(&self, s: Complex64, derivative: bool) -> Result<(Complex64, Complex64), ZetaError> {
        self.check_height(s.re, s.im)?;
        if s.re == 1.0 && s.im == 0.0 {
            return Err(ZetaError::Pole);
        }
        let plan = self.plan(s.re, s.im, -56.0, FAST_PATH_BITS)?;
        Ok(em::em_c64(s, &plan, &self.tables, derivative))
    }

    /// Double-precision `ζ(s)`.
    pub fn zeta_c64(&self, s: Complex64) -> Result<Complex64, ZetaError> {
        Ok(self.evaluate_c64(s, false)?.0)
    }

    /// Double-precision `(ζ(s), ζ′(s))`.
    pub fn zeta_with_derivative_c64(&self, s: Complex64) -> Result<(Complex64, Complex64), ZetaError> {
        self.evaluate_c64(s, true)
    }

    /// Primes `<= bound`, from the cache when it is large enough.
    fn primes(&self, bound: u64) -> std::borrow::Cow<'_, [u64]> {
        if bound <= self.config.prime_cache {
            let end = self.primes.partition_point(|&p| p <= bound);
            std::borrow::Cow::Borrowed(&self.primes[..end])
        } else {
            std::borrow::Cow::Owned(primes_up_to(bound))
        }
    }
}

/// `s` as an MPFR complex at `prec` bits.
pub(crate) fn complex_at(prec: u32, re: &Float, im: &Float) -> Complex {
    Complex::with_val(prec, (re, im))
}
