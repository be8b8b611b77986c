//! Weak independence of zero ordinates via lattice reduction.
//!
//! A set Γ′ of `n` ordinates is `N`-independent in `Γ ∩ [0, T]` when no
//! integer relation `Σ c_γ γ = 0` or `Σ c_γ γ = γ*` with `|c_γ| ≤ N` exists
//! beyond the trivial ones. Such a relation would give a short vector in
//! one of the lattices built by [`build_lattice`]; a lower bound on the
//! shortest vector comes from the Gram–Schmidt norms of an LLL-reduced
//! basis.

mod certify;
mod lattice;
mod lll;

use std::path::PathBuf;

use rug::{Integer, Rational};

pub use certify::{
    read_certificate, run_certification, write_certificate, CertificationParams, IndependenceCertificate, LatticeRecord,
};
pub use lattice::{build_lattice, scaled_round, LatticeBasis, LatticeKind};
pub use lll::{
    apply_transform, bareiss_determinant, gram_schmidt_min_norm_sq, gram_schmidt_norms_exact, gram_schmidt_norms_float,
    is_lll_reduced, lll_reduce, LllMode, LllOutcome,
};

use crate::oscillation::OscillationError;

#[derive(Debug, thiserror::Error)]
pub enum IndependenceError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("ordinates carry {have} correct bits, {need} are required")]
    Precision { have: u32, need: u32 },
    #[error("basis vectors are linearly dependent")]
    Dependent,
    #[error("zero table has {have} ordinates, {need} are required")]
    Coverage { have: usize, need: usize },
    #[error(transparent)]
    Oscillation(#[from] OscillationError),
    #[error("malformed record {path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// `4 × (bound on |v|²)` for a relation with coefficients at most `N`:
/// `(n² + 4n)N²` for Λ₀ and `(n² + 4n)N² + (2n + 8)N + 5` for Λ_i.
fn four_bound(n: u64, big_n: &Integer, kind: LatticeKind) -> Integer {
    let quad = Integer::from(n * n + 4 * n) * Integer::from(big_n.square_ref());
    match kind {
        LatticeKind::Lambda0 => quad,
        LatticeKind::LambdaI => quad + Integer::from(2 * n + 8) * big_n + 5u32,
    }
}

/// Largest `N` whose vector-norm bound stays strictly below
/// `min_norm_sq`; 0 if `N = 1` already fails.
pub fn certify_n(min_norm_sq: &Rational, n: u64, kind: LatticeKind) -> u64 {
    if *min_norm_sq <= 0 || n == 0 {
        return 0;
    }
    let four_m = Rational::from(min_norm_sq * 4u32);
    let ok = |big_n: u64| Rational::from(four_bound(n, &Integer::from(big_n), kind)) < four_m;
    if !ok(1) {
        return 0;
    }
    // N ≈ 2 sqrt(m) / n, refined exactly
    let guess = (2.0 * min_norm_sq.to_f64().sqrt() / n as f64).max(1.0);
    let mut lo = (guess * 0.9).floor().max(1.0) as u64;
    while lo > 1 && !ok(lo) {
        lo /= 2;
    }
    let mut hi = (guess * 1.1).ceil() as u64 + 2;
    while ok(hi) {
        hi *= 2;
    }
    // invariant: ok(lo), !ok(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
