//! Bracketing the density β of integers with `ω(n) ≡ Ω(n) (mod 2)`.
//!
//! Write `n = A·q` with `q` squarefree, `A` powerful and `gcd(A, q) = 1`. The
//! integers whose powerful part has prime support exactly `P` and exponent
//! excess of a given parity have density
//!
//! ```text
//! (6/π²) · ∏ 1/((p+1)(p²−1)) · ½(∏(1+p) ± ∏(1−p))
//!     = (3/π²) · (∏ 1/(p²−1) ± ∏ −1/(p+1)²)
//! ```
//!
//! (`+` for matching parity). Summing the matching densities over a family of
//! prime sets gives a lower bound for β; summing the non-matching ones gives
//! a lower bound for `1 − β`. All bracket arithmetic is interval arithmetic
//! with directed rounding, so the returned bounds are rigorous.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use rug::float::{Constant, Round};
use rug::ops::{AddAssignRound, AssignRound, DivAssignRound, Pow, SubAssignRound};
use rug::{Assign, Float};

use crate::parallel::with_workers;
use crate::primes::{is_prime, primes_up_to};
use crate::sieve::{parity_agreement, SieveConfig, SieveError};
use crate::zeta::em_coefficients;

/// Working precision floor for bracket arithmetic.
pub const MIN_BITS: u32 = 128;
/// Largest per-r prime cap accepted by [`beta_bounds_by_r`].
pub const MAX_PRIME_CAP: u64 = 1_000_000_000;
/// Largest product bound accepted by [`beta_bounds_by_product`].
pub const MAX_PRODUCT_BOUND: u64 = 10_000_000_000;

#[derive(Debug, thiserror::Error)]
pub enum DensityError {
    #[error("invalid prime set: {0}")]
    PrimeSet(String),
    #[error("the non-matching density needs at least one prime")]
    EmptySet,
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("z = {z} is outside |z| < 2")]
    Domain { z: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

/// Strictly increasing list of distinct primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrimeSet {
    primes: Vec<u64>,
}

impl PrimeSet {
    pub fn new(primes: Vec<u64>) -> Result<Self, DensityError> {
        for w in primes.windows(2) {
            if w[0] >= w[1] {
                return Err(DensityError::PrimeSet(format!("{} does not increase to {}", w[0], w[1])));
            }
        }
        if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(DensityError::PrimeSet(format!("{p} is not prime")));
        }
        Ok(PrimeSet { primes })
    }

    pub fn empty() -> Self {
        PrimeSet::default()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn r(&self) -> usize {
        self.primes.len()
    }
}

/// A rigorous bracket `lower ≤ β ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityBound {
    pub lower: Float,
    pub upper: Float,
    /// Description of the enumerated family of prime sets.
    pub config: String,
    /// Number of nonempty prime sets in the family.
    pub sets: u64,
}

impl DensityBound {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> Float {
        Float::with_val(self.upper.prec(), &self.upper - &self.lower)
    }

    pub fn midpoint(&self) -> Float {
        let mut m = Float::with_val(self.upper.prec(), &self.upper + &self.lower);
        m /= 2u32;
        m
    }
}

impl fmt::Display for DensityBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}] ({}, {} sets)",
            self.lower.to_string_radix_round(10, Some(14), Round::Down),
            self.upper.to_string_radix_round(10, Some(14), Round::Up),
            self.config,
            self.sets
        )
    }
}

/// A closed interval of reals with outward-rounded endpoints.
#[derive(Debug, Clone)]
struct Interval {
    lo: Float,
    hi: Float,
}

impl Interval {
    fn point(bits: u32, v: u32) -> Self {
        Interval { lo: Float::with_val(bits, v), hi: Float::with_val(bits, v) }
    }

    fn add(&mut self, other: &Interval) {
        self.lo.add_assign_round(&other.lo, Round::Down);
        self.hi.add_assign_round(&other.hi, Round::Up);
    }

    /// Divides a nonnegative interval by a positive integer.
    fn div_u64(&mut self, k: u64) {
        self.lo.div_assign_round(k, Round::Down);
        self.hi.div_assign_round(k, Round::Up);
    }

    fn assign(&mut self, other: &Interval) {
        self.lo.assign(&other.lo);
        self.hi.assign(&other.hi);
    }
}

/// Bracket of `3/π²` (half of `6/π²`).
fn half_squarefree_density(bits: u32) -> Interval {
    let (pi_lo, _) = Float::with_val_round(bits, Constant::Pi, Round::Down);
    let (pi_hi, _) = Float::with_val_round(bits, Constant::Pi, Round::Up);
    let mut lo = Float::with_val(bits, 3u32);
    lo.div_assign_round(&pi_hi, Round::Down);
    lo.div_assign_round(&pi_hi, Round::Down);
    let mut hi = Float::with_val(bits, 3u32);
    hi.div_assign_round(&pi_lo, Round::Up);
    hi.div_assign_round(&pi_lo, Round::Up);
    Interval { lo, hi }
}

/// Accumulated `Σ ∏ 1/(p²−1)` and `Σ ∏ 1/(p+1)²` split by parity of `r`,
/// over nonempty prime sets.
#[derive(Debug, Clone)]
struct FamilySums {
    a: Interval,
    b_even: Interval,
    b_odd: Interval,
    sets: u64,
}

impl FamilySums {
    fn zero(bits: u32) -> Self {
        FamilySums {
            a: Interval::point(bits, 0),
            b_even: Interval::point(bits, 0),
            b_odd: Interval::point(bits, 0),
            sets: 0,
        }
    }

    fn add(&mut self, other: &FamilySums) {
        self.a.add(&other.a);
        self.b_even.add(&other.b_even);
        self.b_odd.add(&other.b_odd);
        self.sets += other.sets;
    }

    fn add_set(&mut self, r: usize, a: &Interval, b: &Interval) {
        self.a.add(a);
        if r % 2 == 0 {
            self.b_even.add(b);
        } else {
            self.b_odd.add(b);
        }
        self.sets += 1;
    }

    /// `lower = (6/π²)(1 + ½ Σ(A + (−1)^r B))`,
    /// `upper = 1 − (6/π²) ½ Σ(A − (−1)^r B)`.
    fn bracket(&self, bits: u32, config: String) -> DensityBound {
        let c = half_squarefree_density(bits);
        // matching: A + B_even − B_odd, rounded down
        let mut m = Float::with_val(bits, &self.a.lo);
        m.add_assign_round(&self.b_even.lo, Round::Down);
        m.sub_assign_round(&self.b_odd.hi, Round::Down);
        let mut lower = Float::with_val(bits, 0);
        lower.assign_round(&c.lo * &m, Round::Down);
        let mut sq = Float::with_val(bits, 0);
        sq.assign_round(&c.lo * 2u32, Round::Down);
        lower.add_assign_round(&sq, Round::Down);
        // non-matching: A − B_even + B_odd, rounded down
        let mut n = Float::with_val(bits, &self.a.lo);
        n.sub_assign_round(&self.b_even.hi, Round::Down);
        n.add_assign_round(&self.b_odd.lo, Round::Down);
        let mut nonmatch = Float::with_val(bits, 0);
        nonmatch.assign_round(&c.lo * &n, Round::Down);
        let mut upper = Float::with_val(bits, 1u32);
        upper.sub_assign_round(&nonmatch, Round::Up);
        DensityBound { lower, upper, config, sets: self.sets }
    }
}

fn working_bits(bits: u32) -> u32 {
    bits.max(MIN_BITS)
}

/// `(∏ 1/(p²−1), ∏ 1/(p+1)²)` at `bits` with round-to-nearest.
fn set_products(p: &PrimeSet, bits: u32) -> (Float, Float) {
    let mut a = Float::with_val(bits, 1u32);
    let mut b = Float::with_val(bits, 1u32);
    for &q in p.primes() {
        a /= q - 1;
        a /= q + 1;
        b /= q + 1;
        b /= q + 1;
    }
    (a, b)
}

fn three_over_pi_sq(bits: u32) -> Float {
    let pi = Float::with_val(bits, Constant::Pi);
    Float::with_val(bits, 3u32 / Float::with_val(bits, pi.square_ref()))
}

/// Density of integers whose powerful part has prime support `P` and which
/// have `Ω(n) ≡ ω(n) (mod 2)`. For `P = ∅` this is `6/π²`.
pub fn match_density(p: &PrimeSet, bits: u32) -> Float {
    let bits = working_bits(bits);
    let (a, b) = set_products(p, bits);
    let signed_b = if p.r() % 2 == 0 { b } else { -b };
    Float::with_val(bits, three_over_pi_sq(bits) * Float::with_val(bits, &a + &signed_b))
}

/// As [`match_density`] but for `Ω(n) ≢ ω(n) (mod 2)`; needs `r ≥ 1`.
pub fn nonmatch_density(p: &PrimeSet, bits: u32) -> Result<Float, DensityError> {
    if p.r() == 0 {
        return Err(DensityError::EmptySet);
    }
    let bits = working_bits(bits);
    let (a, b) = set_products(p, bits);
    let signed_b = if p.r() % 2 == 0 { b } else { -b };
    Ok(Float::with_val(bits, three_over_pi_sq(bits) * Float::with_val(bits, &a - &signed_b)))
}

/// Intervals for `1/(p²−1)` and `1/(p+1)²`.
fn factor_intervals(p: u64, bits: u32) -> (Interval, Interval) {
    let mut a = Interval::point(bits, 1);
    a.div_u64(p - 1);
    a.div_u64(p + 1);
    let mut b = Interval::point(bits, 1);
    b.div_u64(p + 1);
    b.div_u64(p + 1);
    (a, b)
}

/// Bracket from all prime sets of size `r = i+1` with every prime at most
/// `limits[i]`, plus the empty set.
///
/// The sums over sets of a fixed size are elementary symmetric functions
/// of the per-prime factors and are accumulated with the usual
/// `e_k ← e_k + x·e_{k−1}` recurrence.
pub fn beta_bounds_by_r(limits: &[u64], bits: u32) -> Result<DensityBound, DensityError> {
    if limits.is_empty() {
        return Err(DensityError::Parameter("no per-r prime caps given".into()));
    }
    if let Some(&cap) = limits.iter().find(|&&c| c > MAX_PRIME_CAP) {
        return Err(DensityError::Budget(format!("prime cap {cap} exceeds {MAX_PRIME_CAP}")));
    }
    let bits = working_bits(bits);
    let mut sums = FamilySums::zero(bits);
    let mut tmp = Float::new(bits);
    for (i, &cap) in limits.iter().enumerate() {
        let r = i + 1;
        let primes = primes_up_to(cap);
        if primes.len() < r {
            continue;
        }
        let mut ea: Vec<Interval> = (0..=r).map(|k| Interval::point(bits, u32::from(k == 0))).collect();
        let mut eb = ea.clone();
        for &p in &primes {
            let (fa, fb) = factor_intervals(p, bits);
            for k in (1..=r).rev() {
                for (e, f) in [(&mut ea, &fa), (&mut eb, &fb)] {
                    let (head, tail) = e.split_at_mut(k);
                    let prev = &head[k - 1];
                    tmp.assign_round(&prev.lo * &f.lo, Round::Down);
                    tail[0].lo.add_assign_round(&tmp, Round::Down);
                    tmp.assign_round(&prev.hi * &f.hi, Round::Up);
                    tail[0].hi.add_assign_round(&tmp, Round::Up);
                }
            }
        }
        let count = binomial_saturating(primes.len() as u64, r as u64);
        let mut part = FamilySums::zero(bits);
        part.add_set(r, &ea[r], &eb[r]);
        part.sets = count;
        sums.add(&part);
    }
    let caps: Vec<String> = limits.iter().enumerate().map(|(i, c)| format!("r={}:p<={c}", i + 1)).collect();
    Ok(sums.bracket(bits, format!("by-r {}", caps.join(" "))))
}

fn binomial_saturating(n: u64, k: u64) -> u64 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Depth-first walk over squarefree `m ≤ bound` whose smallest prime is
/// `primes[first]`, accumulating every set it visits.
fn product_subtree(primes: &[u64], first: usize, bound: u64, bits: u32) -> FamilySums {
    let mut sums = FamilySums::zero(bits);
    let p = primes[first];
    let (a0, b0) = factor_intervals(p, bits);
    sums.add_set(1, &a0, &b0);
    // stack[d] holds the products for the set of size d+1
    let mut stack_a = vec![a0];
    let mut stack_b = vec![b0];
    // (next prime index to try, product so far) per depth
    let mut frames: Vec<(usize, u64)> = vec![(first + 1, p)];
    while let Some(&(i, m)) = frames.last() {
        let depth = frames.len();
        if i >= primes.len() || primes[i] > bound / m {
            frames.pop();
            continue;
        }
        frames[depth - 1].0 += 1;
        let q = primes[i];
        if stack_a.len() <= depth {
            stack_a.push(Interval::point(bits, 0));
            stack_b.push(Interval::point(bits, 0));
        }
        let (lower, upper) = stack_a.split_at_mut(depth);
        upper[0].assign(&lower[depth - 1]);
        upper[0].div_u64(q - 1);
        upper[0].div_u64(q + 1);
        let (lower, upper) = stack_b.split_at_mut(depth);
        upper[0].assign(&lower[depth - 1]);
        upper[0].div_u64(q + 1);
        upper[0].div_u64(q + 1);
        sums.add_set(depth + 1, &stack_a[depth], &stack_b[depth]);
        frames.push((i + 1, m * q));
    }
    sums
}

/// Bracket from all prime sets with `p_1⋯p_r ≤ bound`, i.e. every squarefree
/// `m ≤ bound`. Subtrees are split on the smallest prime and reduced in
/// prime order, so the result does not depend on `workers`.
pub fn beta_bounds_by_product(bound: u64, bits: u32, workers: usize) -> Result<DensityBound, DensityError> {
    if bound == 0 {
        return Err(DensityError::Parameter("product bound must be positive".into()));
    }
    if bound > MAX_PRODUCT_BOUND {
        return Err(DensityError::Budget(format!("product bound {bound} exceeds {MAX_PRODUCT_BOUND}")));
    }
    let bits = working_bits(bits);
    let primes = primes_up_to(bound);
    let parts: Vec<FamilySums> =
        with_workers(workers, || (0..primes.len()).into_par_iter().map(|i| product_subtree(&primes, i, bound, bits)).collect());
    let mut sums = FamilySums::zero(bits);
    for part in &parts {
        sums.add(part);
    }
    Ok(sums.bracket(bits, format!("by-product p1*...*pr<={bound}")))
}

/// `R(z)` truncated at `prime_bound` with a first-order tail correction.
#[derive(Debug, Clone, PartialEq)]
pub struct RenyiValue {
    pub value: Float,
    pub prime_bound: u64,
    /// `|z| Σ_{p>P} 1/((p+1)(p−|z|))`, the size of the omitted factors.
    pub tail_estimate: f64,
    /// Bound on `|value − R(z)|` after the correction.
    pub error_bound: f64,
}

/// `Σ_p p^{−2} = Σ_k μ(k)/k · ln ζ(2k)`, with `ζ(2k) = |B_{2k}|(2π)^{2k}/(2(2k)!)`.
fn prime_zeta_two(bits: u32) -> Float {
    let terms = (bits as usize + 16) / 2 + 1;
    let coeffs = em_coefficients(terms);
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    let mut total = Float::with_val(bits, 0);
    for k in 1..=terms {
        let mu = mobius(k as u64);
        if mu == 0 {
            continue;
        }
        let c = Float::with_val(bits, coeffs[k - 1].clone().abs());
        let pw = Float::with_val(bits, (&two_pi).pow(2 * k as u32));
        let zeta = Float::with_val(bits, c * pw) / 2u32;
        let term = zeta.ln() / k as u32;
        if mu > 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn mobius(mut n: u64) -> i8 {
    let mut sign = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// `R(z) = (1/ζ(2)) ∏_p (1 + z/((p+1)(p−z)))`, the generating function
/// `Σ d_k z^k` of the densities of `Ω(n) − ω(n) = k`.
///
/// The product runs over `p ≤ prime_bound`; the omitted factors are then
/// approximated by `exp(z Σ_{p>P} p^{−2})` with the tail sum taken from the
/// prime zeta value. The remaining error is `O(P^{−2})` and is reported.
pub fn renyi_r(z: &Float, prime_bound: u64) -> Result<RenyiValue, DensityError> {
    let zf = z.to_f64();
    if !(zf.abs() < 2.0) || z.clone().abs() >= 2u32 {
        return Err(DensityError::Domain { z: zf });
    }
    if prime_bound < 2 {
        return Err(DensityError::Parameter("prime_bound must be at least 2".into()));
    }
    let bits = working_bits(z.prec());
    let z = Float::with_val(bits, z);
    let mut product = Float::with_val(bits, 1u32);
    let mut inv_sq = Float::with_val(bits, 0);
    let mut den = Float::new(bits);
    for p in primes_up_to(prime_bound) {
        den.assign(p - &z);
        den *= p + 1;
        let u = Float::with_val(bits, &z / &den);
        product *= u + 1u32;
        let mut r = Float::with_val(bits, p);
        r.square_mut();
        inv_sq += r.recip();
    }
    let tail = prime_zeta_two(bits) - inv_sq;
    let correction = Float::with_val(bits, &z * &tail).exp();
    let value = three_over_pi_sq(bits) * 2u32 * product * correction;

    let big_p = prime_bound as f64;
    let az = zf.abs();
    let kappa = 1.0 / (1.0 - az / (big_p + 1.0));
    let tail_f = tail.to_f64();
    let tail_estimate = az * tail_f * kappa;
    let quad = kappa * kappa * az * az / (3.0 * big_p.powi(3)) / (2.0 * (1.0 - kappa * az / (big_p + 1.0).powi(2)));
    let resid = kappa * az * ((zf - 1.0).abs() / (2.0 * big_p * big_p) + az / (3.0 * big_p.powi(3))) + quad;
    let slop = 2f64.powi(-(bits as i32) + 24);
    let error_bound = value.to_f64().abs() * resid.exp_m1() + slop;
    Ok(RenyiValue { value, prime_bound, tail_estimate, error_bound })
}

/// `β(x) = #{n ≤ x : ω(n) ≡ Ω(n) (mod 2)}` and `β(x)/x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalBeta {
    pub x: u64,
    pub count: u64,
    pub fraction: f64,
}

/// Counts agreements of ξ and λ over `[1, x]` with the dual sieve.
pub fn empirical_beta(x: u64, config: &SieveConfig) -> Result<EmpiricalBeta, DensityError> {
    if x == 0 {
        return Err(DensityError::Parameter("x must be positive".into()));
    }
    let count = parity_agreement(x, config)?;
    Ok(EmpiricalBeta { x, count, fraction: count as f64 / x as f64 })
}

/// Compares brackets by width; narrower is greater.
pub fn tighter(a: &DensityBound, b: &DensityBound) -> Ordering {
    b.width().partial_cmp(&a.width()).unwrap_or(Ordering::Equal)
}
