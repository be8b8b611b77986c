//! Choice of truncation point `N` and Bernoulli depth `K` for Euler–Maclaurin.
//!
//! With `K` correction terms the remainder obeys
//! `|R| ≤ |c_{K+1} · s(s+1)⋯(s+2K+1)| · N^{-σ-2K-1} / (σ+2K+1)`.
//! For every admissible `K` the smallest `N` meeting the error target is
//! solved for directly, and the cheapest `(N, K)` pair wins.

use super::bernoulli::ln_abs_em_coefficient;

/// Relative cost of one Bernoulli correction versus one Dirichlet term.
const BERNOULLI_TERM_COST: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plan {
    /// Truncation point: terms `1..N-1` are summed directly.
    pub n: usize,
    /// Number of Bernoulli corrections.
    pub k: usize,
    /// log2 of the largest term magnitude, for choosing guard bits.
    pub log2_peak: f64,
}

/// Plans an evaluation at `s = re + i·im` with absolute error `2^err_log2`.
/// Returns `None` when no `K <= kmax` reaches the target within `max_terms`.
pub fn plan(re: f64, im: f64, err_log2: f64, kmax: usize, max_terms: usize) -> Option<Plan> {
    let err_ln = err_log2 * std::f64::consts::LN_2;
    let ln_abs = |j: usize| ((re + j as f64).hypot(im)).ln();
    let mut best: Option<(f64, usize, usize)> = None;
    // running Σ_{j=0}^{2K+1} ln|s+j|
    let mut ln_poch = ln_abs(0) + ln_abs(1);
    for k in 1..=kmax {
        ln_poch += ln_abs(2 * k) + ln_abs(2 * k + 1);
        let decay = re + 2.0 * k as f64 + 1.0;
        if decay <= 0.0 {
            continue;
        }
        let a = ln_abs_em_coefficient(k + 1) + ln_poch - decay.ln();
        let n = if a == f64::NEG_INFINITY {
            // s is a non-positive integer: the series terminates exactly
            1.0
        } else {
            ((a - err_ln) / decay).exp().ceil().max(1.0)
        };
        if !n.is_finite() || n > max_terms as f64 {
            continue;
        }
        let cost = n + BERNOULLI_TERM_COST * k as f64;
        if best.map_or(true, |(c, _, _)| cost < c) {
            best = Some((cost, n as usize, k));
        }
    }
    let (_, n, k) = best?;
    Some(Plan { n, k, log2_peak: log2_peak(re, im, n, k) })
}

fn log2_peak(re: f64, im: f64, n: usize, k: usize) -> f64 {
    let ln_n = (n as f64).ln();
    // Dirichlet terms n^{-σ}
    let mut peak = if re >= 0.0 { 0.0 } else { -re * ln_n };
    // N^{1-s}/(s-1)
    let to_pole = (re - 1.0).hypot(im);
    if to_pole > 0.0 {
        peak = f64::max(peak, (1.0 - re) * ln_n - to_pole.ln());
    }
    let mut ln_poch = (re.hypot(im)).ln();
    for j in 1..=k {
        if j > 1 {
            ln_poch += ((re + (2 * j - 3) as f64).hypot(im)).ln() + ((re + (2 * j - 2) as f64).hypot(im)).ln();
        }
        let t = ln_abs_em_coefficient(j) + ln_poch - (re + 2.0 * j as f64 - 1.0) * ln_n;
        if t.is_finite() {
            peak = peak.max(t);
        }
    }
    peak / std::f64::consts::LN_2
}
