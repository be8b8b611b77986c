//! Computational toolkit for the summatory functions
//! `H(x) = Σ (-1)^ω(n)`, `L(x) = Σ λ(n)` and `M(x) = Σ μ(n)`.
//!
//! The crate is organised by subsystem:
//!
//! * [`zeros`] ingests, persists, validates and (at desk scale) generates
//!   tables of ordinates of nontrivial zeros of ζ.
//! * [`zeta`] evaluates ζ, ζ′, the Euler factor `F₆` and the residues that
//!   drive the explicit formulas for `M`, `L` and `H`.
//! * [`series`] does the exact integer power-series algebra behind the
//!   factorisation of `h(s) = Σ ξ(n) n^{-s}`.
//! * [`sieve`] computes ξ, λ and μ over large intervals with the mod-30
//!   table-accelerated block sieve and produces checkpointed summatory series.
//! * [`density`] brackets the density of integers with `ω(n) ≡ Ω(n) (mod 2)`.
//! * [`oscillation`] evaluates kernel-weighted sums over zeros and assembles
//!   oscillation bounds.
//! * [`independence`] builds and reduces the relation lattices and certifies
//!   weak independence of sets of ordinates.

pub mod density;
pub mod hp;
pub mod independence;
pub mod oscillation;
pub mod parallel;
pub mod primes;
pub mod series;
pub mod sieve;
pub mod zeros;
pub mod zeta;

mod problem;

pub use problem::{Line, Problem};
