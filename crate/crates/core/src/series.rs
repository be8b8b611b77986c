//! Exact integer power-series algebra for the factorisation of
//! `h(s) = Σ (-1)^ω(n) n^{-s}` into powers of `ζ(ks)`.
//!
//! Locally at a prime `p`, with `q = p^{-s}`, the Euler factor of `h` is
//! `1 - q - q² - ⋯`. The exponents `a_k` are the unique integers with
//! `∏_k (1 - q^k)^{a_k} = 1 - q - q² - ⋯`, and the tail factor `F_k` is what
//! remains after dividing out `∏_{j ≤ k} (1 - q^j)^{a_j}`.

use rug::Integer;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("tail index k={k} must satisfy 1 <= k < K={order}")]
    InvalidOrder { k: usize, order: usize },
    #[error("exponent a_{k} = {value} is not positive")]
    NonPositive { k: usize, value: String },
}

/// Power series with integer coefficients, truncated after `q^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coefficients: Vec<Integer>,
    truncation_order: usize,
}

impl PowerSeries {
    pub fn one(truncation_order: usize) -> Self {
        let mut coefficients = vec![Integer::new(); truncation_order + 1];
        coefficients[0] = Integer::from(1);
        PowerSeries { coefficients, truncation_order }
    }

    /// `1 - q - q² - ⋯ - q^order`, the local factor of `h`.
    pub fn parity_factor(truncation_order: usize) -> Self {
        let mut s = Self::one(truncation_order);
        for c in s.coefficients.iter_mut().skip(1) {
            *c = Integer::from(-1);
        }
        s
    }

    /// Pads with zeros or truncates to `truncation_order`.
    pub fn from_coefficients(mut coefficients: Vec<Integer>, truncation_order: usize) -> Self {
        coefficients.resize(truncation_order + 1, Integer::new());
        PowerSeries { coefficients, truncation_order }
    }

    pub fn coefficients(&self) -> &[Integer] {
        &self.coefficients
    }

    pub fn truncation_order(&self) -> usize {
        self.truncation_order
    }

    pub fn coefficient(&self, degree: usize) -> &Integer {
        &self.coefficients[degree]
    }

    /// Coefficients as `i64`, or `None` if any overflows.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coefficients.iter().map(|c| c.to_i64()).collect()
    }

    /// Truncated product; the result keeps the smaller truncation order.
    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let order = self.truncation_order.min(other.truncation_order);
        let mut out = vec![Integer::new(); order + 1];
        for (i, a) in self.coefficients.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        PowerSeries { coefficients: out, truncation_order: order }
    }

    /// Multiplies in place by `(1 - q^k)^exponent`; negative exponents are
    /// expanded as the generalised binomial series.
    pub fn mul_binomial_power(&mut self, k: usize, exponent: &Integer) {
        assert!(k >= 1);
        let order = self.truncation_order;
        // b_i = (-1)^i C(exponent, i) is the coefficient of q^{k i}
        let mut factor: Vec<(usize, Integer)> = vec![(0, Integer::from(1))];
        let mut b = Integer::from(1);
        let mut i = 1usize;
        while k * i <= order {
            b *= Integer::from(i - 1) - exponent;
            b /= i as u32;
            if b.is_zero() {
                break;
            }
            factor.push((k * i, b.clone()));
            i += 1;
        }
        let mut out = vec![Integer::new(); order + 1];
        for (d, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (shift, f) in &factor {
                if d + shift > order {
                    break;
                }
                out[d + shift] += c * f;
            }
        }
        self.coefficients = out;
    }
}

/// `a_1 … a_order` with `∏ (1 - q^k)^{a_k} ≡ 1 - q - q² - ⋯ (mod q^{order+1})`,
/// found by peeling one factor per degree.
pub fn compute_a_sequence(order: usize) -> Vec<Integer> {
    let mut running = PowerSeries::one(order);
    let mut a = Vec::with_capacity(order);
    for k in 1..=order {
        // (1 - q^k)^{a_k} only touches degree k by -a_k; the target has -1 there
        let a_k = Integer::from(running.coefficient(k) + 1);
        running.mul_binomial_power(k, &a_k);
        a.push(a_k);
    }
    a
}

/// Reports the first non-positive exponent, if any.
pub fn check_positive(a: &[Integer]) -> Result<(), SeriesError> {
    for (i, v) in a.iter().enumerate() {
        if *v <= 0 {
            return Err(SeriesError::NonPositive { k: i + 1, value: v.to_string() });
        }
    }
    Ok(())
}

/// q-expansion of the tail factor `F_k`, i.e.
/// `(1 - q - q² - ⋯) · ∏_{j=1}^{k} (1 - q^j)^{-a_j}` truncated at `order`.
pub fn fk_tail_coefficients(k: usize, order: usize) -> Result<PowerSeries, SeriesError> {
    if k == 0 || k >= order {
        return Err(SeriesError::InvalidOrder { k, order });
    }
    let a = compute_a_sequence(k);
    let mut s = PowerSeries::parity_factor(order);
    for (j, a_j) in a.iter().enumerate() {
        s.mul_binomial_power(j + 1, &Integer::from(-a_j));
    }
    Ok(s)
}

/// Same object as [`fk_tail_coefficients`], computed as
/// `∏_{j=k+1}^{order} (1 - q^j)^{a_j}`.
pub fn fk_tail_by_product(k: usize, order: usize) -> Result<PowerSeries, SeriesError> {
    if k == 0 || k >= order {
        return Err(SeriesError::InvalidOrder { k, order });
    }
    let a = compute_a_sequence(order);
    let mut s = PowerSeries::one(order);
    for (j, a_j) in a.iter().enumerate().skip(k) {
        s.mul_binomial_power(j + 1, a_j);
    }
    Ok(s)
}
