//! Kernel-weighted sums over zeros and the oscillation bounds built from them.
//!
//! For a problem with residues `r_γ` at `ρ = 1/2 + iγ`,
//!
//! ```text
//! B*_T(u) = r₀ + 2 Re Σ_{0<γ<T} k_T(γ) r_γ e^{iγu}
//! ```
//!
//! approximates `e^{−u/2} S(e^u)` for the summatory function `S`. With
//! `k_T ≡ 1` and a sharp cutoff this is the truncated explicit formula.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rug::float::Constant;
use rug::Float;

use crate::parallel::pairwise_sum;
use crate::zeros::ZeroTable;
use crate::zeta::{Residue, ResidueSet};
use crate::{Line, Problem};

/// `ζ(1/2)`.
pub const ZETA_HALF: f64 = -1.460_354_508_809_586_8;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum OscillationError {
    #[error("kernel length T = {0} must exceed 1")]
    KernelLength(f64),
    #[error("no residue for zero {index} (gamma = {gamma}) below T")]
    Coverage { index: usize, gamma: f64 },
    #[error("residue for zero {index} belongs to {found}/{line}, expected {expected}/{wanted}")]
    Mismatch { index: usize, found: Problem, line: Line, expected: Problem, wanted: Line },
    #[error("residue for zero {index} has gamma {residue} but the table has {table}")]
    GammaMismatch { index: usize, residue: f64, table: f64 },
    #[error("need {wanted} residues, only {available} available")]
    Insufficient { wanted: usize, available: usize },
    #[error("N must be at least 1")]
    ZeroMultiplier,
    #[error("quarter-line terms only exist for OMEGA, not {0}")]
    Quarter(Problem),
    #[error("index {0} is not in the weighted set")]
    UnknownIndex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `1 − |t|/T`.
    Fejer,
    /// `(1 − |t|/T) cos(πt/T) + sin(π|t|/T)/π`.
    JurkatPeyerimhoff,
}

impl KernelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelKind::Fejer => "FEJER",
            KernelKind::JurkatPeyerimhoff => "JURKAT_PEYERIMHOFF",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fejer" => Ok(KernelKind::Fejer),
            "jp" | "jurkat-peyerimhoff" | "jurkat_peyerimhoff" => Ok(KernelKind::JurkatPeyerimhoff),
            other => Err(format!("unknown kernel '{other}' (expected fejer or jp)")),
        }
    }
}

/// A kernel `k_T` supported on `[−T, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    t: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, t: f64) -> Result<Self, OscillationError> {
        if !(t > 1.0) || !t.is_finite() {
            return Err(OscillationError::KernelLength(t));
        }
        Ok(KernelSpec { kind, t })
    }

    pub fn fejer(t: f64) -> Result<Self, OscillationError> {
        Self::new(KernelKind::Fejer, t)
    }

    pub fn jurkat_peyerimhoff(t: f64) -> Result<Self, OscillationError> {
        Self::new(KernelKind::JurkatPeyerimhoff, t)
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// `k_T(t)`; zero outside `[−T, T]`.
pub fn kernel_eval(spec: &KernelSpec, t: f64) -> f64 {
    let x = t.abs() / spec.t;
    if x > 1.0 {
        return 0.0;
    }
    match spec.kind {
        KernelKind::Fejer => 1.0 - x,
        KernelKind::JurkatPeyerimhoff => {
            let a = std::f64::consts::PI * x;
            (1.0 - x) * a.cos() + a.sin() / std::f64::consts::PI
        }
    }
}

/// The constant term: `1/ζ(1/2)` for `L`, zero for `M` and `H`.
pub fn r0(problem: Problem) -> f64 {
    match problem {
        Problem::Polya => 1.0 / ZETA_HALF,
        Problem::Mertens | Problem::Omega => 0.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEntry {
    pub index: usize,
    pub gamma: Float,
    pub residue: Complex64,
    pub weight: f64,
}

impl WeightedEntry {
    /// `k_T(γ)|r_γ|`.
    pub fn magnitude(&self) -> f64 {
        self.weight * self.residue.norm()
    }
}

/// The summands of `B*_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedResidueSet {
    pub problem: Problem,
    pub kernel: KernelSpec,
    pub r0: f64,
    pub entries: Vec<WeightedEntry>,
}

/// Half-line residues for every zero with `γ < t` (or `γ ≤ t` when
/// `inclusive`), in index order.
fn collect_half_line<'a>(
    problem: Problem,
    t: f64,
    inclusive: bool,
    zeros: &ZeroTable,
    residues: &'a ResidueSet,
    line: Line,
) -> Result<Vec<(usize, &'a Residue)>, OscillationError> {
    let mut by_index: Vec<Option<&Residue>> = vec![None; zeros.count() + 1];
    for (index, r) in residues.iter() {
        if *index < by_index.len() {
            by_index[*index] = Some(r);
        }
    }
    let mut out = Vec::new();
    for rec in zeros.records() {
        let g = rec.gamma.to_f64();
        if g > t || (g == t && !inclusive) {
            break;
        }
        let r = by_index[rec.index].ok_or(OscillationError::Coverage { index: rec.index, gamma: g })?;
        if r.problem != problem || r.line != line {
            return Err(OscillationError::Mismatch { index: rec.index, found: r.problem, line: r.line, expected: problem, wanted: line });
        }
        let rg = r.gamma.to_f64();
        if (rg - g).abs() > 1e-9 * g {
            return Err(OscillationError::GammaMismatch { index: rec.index, residue: rg, table: g });
        }
        out.push((rec.index, r));
    }
    Ok(out)
}

/// `(cos θ, sin θ)` for `θ = γu`, with the product and the reduction mod 2π
/// carried at the ordinate's precision plus 64 bits.
fn phase(gamma: &Float, u: f64) -> (f64, f64) {
    let bits = gamma.prec().max(64) + 64;
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    let theta = Float::with_val(bits, gamma * u).remainder(&two_pi).to_f64();
    (theta.cos(), theta.sin())
}

/// `2 Re Σ w r e^{iγu}` summed pairwise in entry order.
fn trig_sum<'a>(entries: impl Iterator<Item = (&'a Float, Complex64, f64)>, u: f64) -> f64 {
    let terms: Vec<f64> = entries
        .map(|(g, r, w)| {
            let (c, s) = phase(g, u);
            2.0 * w * (r.re * c - r.im * s)
        })
        .collect();
    pairwise_sum(&terms)
}

impl WeightedResidueSet {
    /// Weights every half-line residue with `0 < γ < T`. Residues above `T`
    /// are ignored; a missing one below `T` is an error.
    pub fn build(problem: Problem, kernel: KernelSpec, zeros: &ZeroTable, residues: &ResidueSet) -> Result<Self, OscillationError> {
        let chosen = collect_half_line(problem, kernel.t, false, zeros, residues, Line::Half)?;
        let entries = chosen
            .into_iter()
            .map(|(index, r)| WeightedEntry {
                index,
                gamma: r.gamma.clone(),
                residue: r.to_c64(),
                weight: kernel_eval(&kernel, r.gamma.to_f64()),
            })
            .collect();
        Ok(WeightedResidueSet { problem, kernel, r0: r0(problem), entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `B*_T(u)`.
    pub fn b_star(&self, u: f64) -> f64 {
        self.r0 + trig_sum(self.entries.iter().map(|e| (&e.gamma, e.residue, e.weight)), u)
    }

    /// `Σ k_T(γ)|r_γ|`, summed pairwise.
    pub fn weighted_mass(&self) -> f64 {
        let m: Vec<f64> = self.entries.iter().map(WeightedEntry::magnitude).collect();
        pairwise_sum(&m)
    }

    /// The subset with the given zero indices, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self, OscillationError> {
        let entries = indices
            .iter()
            .map(|&i| {
                self.entries.iter().find(|e| e.index == i).cloned().ok_or(OscillationError::UnknownIndex(i))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WeightedResidueSet { entries, ..self.clone() })
    }
}

/// `B*_T(u)` from a zero table and residue set.
pub fn b_star(
    problem: Problem,
    kernel: KernelSpec,
    u: f64,
    zeros: &ZeroTable,
    residues: &ResidueSet,
) -> Result<f64, OscillationError> {
    Ok(WeightedResidueSet::build(problem, kernel, zeros, residues)?.b_star(u))
}

/// The truncated explicit formula with a sharp cutoff at `γ ≤ T`.
#[derive(Debug, Clone)]
pub struct ExplicitEstimate {
    pub problem: Problem,
    pub t: f64,
    pub r0: f64,
    half: Vec<(Float, Complex64)>,
    quarter: Vec<(Float, Complex64)>,
}

impl ExplicitEstimate {
    /// `quarter` adds the `ρ/2` poles for OMEGA, weighted by `e^{−u/4}`.
    pub fn new(
        problem: Problem,
        t: f64,
        zeros: &ZeroTable,
        residues: &ResidueSet,
        quarter: Option<&ResidueSet>,
    ) -> Result<Self, OscillationError> {
        if !(t > 0.0) {
            return Err(OscillationError::KernelLength(t));
        }
        let take = |set, line| -> Result<Vec<(Float, Complex64)>, OscillationError> {
            Ok(collect_half_line(problem, t, true, zeros, set, line)?
                .into_iter()
                .map(|(_, r)| (r.gamma.clone(), r.to_c64()))
                .collect())
        };
        let half = take(residues, Line::Half)?;
        let quarter = match quarter {
            None => Vec::new(),
            Some(_) if problem != Problem::Omega => return Err(OscillationError::Quarter(problem)),
            Some(q) => take(q, Line::Quarter)?,
        };
        Ok(ExplicitEstimate { problem, t, r0: r0(problem), half, quarter })
    }

    pub fn terms(&self) -> usize {
        self.half.len()
    }

    /// Estimate of `e^{−u/2} S(e^u)`.
    pub fn eval(&self, u: f64) -> f64 {
        let main = self.r0 + trig_sum(self.half.iter().map(|(g, r)| (g, *r, 1.0)), u);
        if self.quarter.is_empty() {
            return main;
        }
        let half_gammas: Vec<Float> = self.quarter.iter().map(|(g, _)| Float::with_val(g.prec(), g / 2u32)).collect();
        let q = trig_sum(half_gammas.iter().zip(&self.quarter).map(|(g, (_, r))| (g, *r, 1.0)), u);
        main + q * (-u / 4.0).exp()
    }

    /// `e^{−u/4} · 2Σ|r^{(1/4)}_γ|`, the most the quarter-line terms can move
    /// the estimate at `u`.
    pub fn quarter_envelope(&self, u: f64) -> f64 {
        let m: Vec<f64> = self.quarter.iter().map(|(_, r)| 2.0 * r.norm()).collect();
        pairwise_sum(&m) * (-u / 4.0).exp()
    }
}

/// One-shot [`ExplicitEstimate::eval`].
pub fn explicit_estimate(
    problem: Problem,
    u: f64,
    t: f64,
    zeros: &ZeroTable,
    residues: &ResidueSet,
    quarter: Option<&ResidueSet>,
) -> Result<f64, OscillationError> {
    Ok(ExplicitEstimate::new(problem, t, zeros, residues, quarter)?.eval(u))
}

/// `(r₀ + 2(N/(N+1))Σ k|r|, r₀ − 2(N/(N+1))Σ k|r|)`: a lower bound on
/// `limsup` and an upper bound on `liminf` of `e^{−u/2} S(e^u)` when the
/// ordinates are `N`-independent.
pub fn anderson_stark_bound(weighted: &WeightedResidueSet, n: u64) -> Result<(f64, f64), OscillationError> {
    if n == 0 {
        return Err(OscillationError::ZeroMultiplier);
    }
    if weighted.is_empty() {
        return Err(OscillationError::Insufficient { wanted: 1, available: 0 });
    }
    let factor = n as f64 / (n as f64 + 1.0);
    let swing = 2.0 * factor * weighted.weighted_mass();
    Ok((weighted.r0 + swing, weighted.r0 - swing))
}

/// Indices of the `n` largest `k_T(γ)|r_γ|`, largest first; ties go to the
/// smaller ordinate.
pub fn select_gamma_prime(weighted: &WeightedResidueSet, n: usize) -> Result<Vec<usize>, OscillationError> {
    if n > weighted.len() {
        return Err(OscillationError::Insufficient { wanted: n, available: weighted.len() });
    }
    let mut order: Vec<&WeightedEntry> = weighted.entries.iter().collect();
    order.sort_by(|a, b| b.magnitude().total_cmp(&a.magnitude()).then_with(|| a.gamma.total_cmp(&b.gamma)));
    Ok(order.into_iter().take(n).map(|e| e.index).collect())
}

/// Pearson correlation of two equal-length series.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "series lengths differ");
    let n = a.len() as f64;
    let ma = pairwise_sum(a) / n;
    let mb = pairwise_sum(b) / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::{ZeroRecord, ZeroTable};
    use crate::zeta::{ZetaConfig, ZetaKernel};

    const GAMMAS: [&str; 5] = [
        "14.134725141734693790457251983562",
        "21.022039638771554992628479593897",
        "25.010857580145688763213790992563",
        "30.424876125859513210311897530584",
        "32.935061587739189690662368964075",
    ];

    fn table() -> ZeroTable {
        let records = GAMMAS
            .iter()
            .enumerate()
            .map(|(i, g)| ZeroRecord {
                index: i + 1,
                gamma: Float::with_val(128, Float::parse(g).unwrap()),
                precision_bits: 100,
            })
            .collect();
        ZeroTable::new(records, "test").unwrap()
    }

    fn residues(problem: Problem) -> ResidueSet {
        let kernel = ZetaKernel::new(ZetaConfig::default());
        ResidueSet::compute(&kernel, table().records(), problem, Line::Half, 64, 1000, 1).unwrap()
    }

    #[test]
    fn kernel_values() {
        for kind in [KernelKind::Fejer, KernelKind::JurkatPeyerimhoff] {
            let k = KernelSpec::new(kind, 100.0).unwrap();
            assert_eq!(kernel_eval(&k, 0.0), 1.0);
            assert!(kernel_eval(&k, 100.0).abs() < 1e-16);
            assert_eq!(kernel_eval(&k, 150.0), 0.0);
            assert_eq!(kernel_eval(&k, -30.0), kernel_eval(&k, 30.0));
        }
        let jp = KernelSpec::jurkat_peyerimhoff(100.0).unwrap();
        assert!((kernel_eval(&jp, 50.0) - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        let fe = KernelSpec::fejer(100.0).unwrap();
        // the kernels cross near t = 0.258 T
        for i in 0..=250 {
            let t = i as f64 / 10.0;
            assert!(kernel_eval(&jp, t) >= kernel_eval(&fe, t), "{t}");
        }
        assert!(kernel_eval(&jp, 27.0) < kernel_eval(&fe, 27.0));
        assert!(KernelSpec::fejer(1.0).is_err());
        assert!(KernelSpec::fejer(f64::NAN).is_err());
    }

    #[test]
    fn zeta_half_constant() {
        let k = ZetaKernel::new(ZetaConfig::default());
        let z = k.zeta_c64(Complex64::new(0.5, 0.0)).unwrap();
        assert!((z.re - ZETA_HALF).abs() < 1e-14);
        assert!((r0(Problem::Polya) + 0.684_765_2).abs() < 1e-6);
    }

    #[test]
    fn empty_sum_below_first_zero() {
        let r = residues(Problem::Mertens);
        let k = KernelSpec::fejer(10.0).unwrap();
        for u in [0.0, 1.0, 123.4] {
            assert_eq!(b_star(Problem::Mertens, k, u, &table(), &r).unwrap(), 0.0);
        }
    }

    #[test]
    fn b_star_matches_direct_sum() {
        let r = residues(Problem::Polya);
        let k = KernelSpec::fejer(31.0).unwrap();
        let w = WeightedResidueSet::build(Problem::Polya, k, &table(), &r).unwrap();
        assert_eq!(w.len(), 4);
        for u in [0.5, 7.0, 40.0] {
            let direct: f64 = r.iter().take(4).map(|(_, res)| {
                let g = res.gamma.to_f64();
                let z = res.to_c64() * Complex64::new(0.0, g * u).exp();
                2.0 * (1.0 - g / 31.0) * z.re
            }).sum();
            assert!((w.b_star(u) - (r0(Problem::Polya) + direct)).abs() < 1e-12);
            assert!((w.b_star(u) - w.r0).abs() <= 2.0 * w.weighted_mass() + 1e-15);
        }
    }

    #[test]
    fn coverage_and_problem_checks() {
        let r = residues(Problem::Mertens);
        let partial = ResidueSet { entries: r.entries[..2].to_vec() };
        let k = KernelSpec::fejer(31.0).unwrap();
        assert!(matches!(
            WeightedResidueSet::build(Problem::Mertens, k, &table(), &partial),
            Err(OscillationError::Coverage { index: 3, .. })
        ));
        assert!(matches!(WeightedResidueSet::build(Problem::Polya, k, &table(), &r), Err(OscillationError::Mismatch { .. })));
        assert!(matches!(
            ExplicitEstimate::new(Problem::Mertens, 31.0, &table(), &r, Some(&r)),
            Err(OscillationError::Quarter(Problem::Mertens))
        ));
    }

    #[test]
    fn anderson_stark_factors() {
        let r = residues(Problem::Mertens);
        let k = KernelSpec::jurkat_peyerimhoff(40.0).unwrap();
        let w = WeightedResidueSet::build(Problem::Mertens, k, &table(), &r).unwrap();
        let mass = w.weighted_mass();
        let (hi, lo) = anderson_stark_bound(&w, 1).unwrap();
        assert!((hi - mass).abs() < 1e-15 && (lo + mass).abs() < 1e-15);
        let (hi, lo) = anderson_stark_bound(&w, 1_000_000_000).unwrap();
        assert!((hi - 2.0 * mass).abs() < 1e-8 && hi == -lo);
        assert_eq!(anderson_stark_bound(&w, 0), Err(OscillationError::ZeroMultiplier));

        let single = WeightedResidueSet {
            problem: Problem::Polya,
            kernel: k,
            r0: 0.25,
            entries: vec![WeightedEntry { index: 1, gamma: Float::with_val(64, 14), residue: Complex64::new(0.6, 0.8), weight: 1.0 }],
        };
        let (hi, lo) = anderson_stark_bound(&single, u64::MAX).unwrap();
        assert!((hi - 2.25).abs() < 1e-12 && (lo + 1.75).abs() < 1e-12);
        assert!(((hi - 0.25) - (0.25 - lo)).abs() < 1e-15);
    }

    #[test]
    fn selection_order() {
        let r = residues(Problem::Mertens);
        let k = KernelSpec::fejer(40.0).unwrap();
        let w = WeightedResidueSet::build(Problem::Mertens, k, &table(), &r).unwrap();
        let all = select_gamma_prime(&w, 5).unwrap();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 3, 4, 5]);
        let mags: Vec<f64> = all.iter().map(|i| w.entries[i - 1].magnitude()).collect();
        assert!(mags.windows(2).all(|p| p[0] >= p[1]));
        assert_eq!(select_gamma_prime(&w, 1).unwrap(), vec![all[0]]);
        assert!(select_gamma_prime(&w, 6).is_err());
        let sub = w.restrict(&all[..2]).unwrap();
        assert_eq!(sub.len(), 2);
        assert!(w.restrict(&[9]).is_err());
    }

    #[test]
    fn quarter_terms_bounded() {
        let kernel = ZetaKernel::new(ZetaConfig::default());
        let t = table();
        let half = ResidueSet::compute(&kernel, t.records(), Problem::Omega, Line::Half, 64, 1000, 1).unwrap();
        let quarter = ResidueSet::compute(&kernel, t.records(), Problem::Omega, Line::Quarter, 64, 1000, 1).unwrap();
        let plain = ExplicitEstimate::new(Problem::Omega, 40.0, &t, &half, None).unwrap();
        let full = ExplicitEstimate::new(Problem::Omega, 40.0, &t, &half, Some(&quarter)).unwrap();
        for u in [10.0, 27.0] {
            let d = (full.eval(u) - plain.eval(u)).abs();
            assert!(d <= full.quarter_envelope(u) + 1e-15);
        }
        assert!(full.quarter_envelope(27.0) > 0.0);
    }

    #[test]
    fn phase_is_reduced_accurately() {
        let g = Float::with_val(200, Float::parse(GAMMAS[0]).unwrap());
        let (c, s) = phase(&g, 1.0e6);
        // 14134725.141734693790457... mod 2π
        let theta = (14_134_725.141_734_694f64).rem_euclid(2.0 * std::f64::consts::PI);
        assert!((c - theta.cos()).abs() < 1e-8 && (s - theta.sin()).abs() < 1e-8);
        assert!((c * c + s * s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlation_basics() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((correlation(&a, &[2.0, 4.0, 6.0, 8.0]) - 1.0).abs() < 1e-15);
        assert!((correlation(&a, &[4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
    }
}
