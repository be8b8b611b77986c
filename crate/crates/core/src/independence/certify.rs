use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use rug::{Float, Rational};

use super::lattice::{build_lattice, LatticeKind};
use super::lll::{gram_schmidt_min_norm_sq, lll_reduce, LllMode};
use super::{certify_n, IndependenceError};
use crate::hp::{digits_for_bits, format_decimal, parse_decimal};
use crate::oscillation::{select_gamma_prime, KernelSpec, WeightedResidueSet};
use crate::parallel::with_workers;
use crate::zeros::ZeroTable;
use crate::zeta::ResidueSet;
use crate::Problem;

/// Inputs to [`run_certification`].
#[derive(Debug, Clone, PartialEq)]
pub struct CertificationParams {
    pub problem: Problem,
    pub n: usize,
    pub m: usize,
    pub b_bits: u32,
    pub delta: f64,
    /// `T = γ_{m+1} − ε`.
    pub epsilon: Float,
    pub mode: LllMode,
    pub workers: usize,
    /// Directory of per-lattice records; existing matching records are
    /// reused instead of recomputed.
    pub resume_dir: Option<PathBuf>,
}

impl CertificationParams {
    /// `ε = 10⁻¹⁰`, hybrid LLL, one worker, no resume directory.
    pub fn new(problem: Problem, n: usize, m: usize, b_bits: u32, delta: f64) -> Self {
        CertificationParams {
            problem,
            n,
            m,
            b_bits,
            delta,
            epsilon: Float::with_val(128, Float::parse("1e-10").expect("literal")),
            mode: LllMode::Hybrid,
            workers: 1,
            resume_dir: None,
        }
    }
}

/// Result for one lattice: Λ₀ has no star index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeRecord {
    pub star_index: Option<usize>,
    pub min_gs_norm_sq: Rational,
    pub n_i: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceCertificate {
    pub problem: Problem,
    pub n: usize,
    pub m: usize,
    pub b_bits: u32,
    pub delta: f64,
    pub epsilon: Float,
    pub t: Float,
    /// Indices of Γ′, ascending.
    pub selected_indices: Vec<usize>,
    /// Λ₀ first, then Λ_i by ascending star index.
    pub lattices: Vec<LatticeRecord>,
    pub certified_n: u64,
}

impl IndependenceCertificate {
    /// True when every lattice certified at least `N = 1`.
    pub fn certified(&self) -> bool {
        self.certified_n >= 1
    }
}

fn record_path(dir: &Path, star: Option<usize>) -> PathBuf {
    dir.join(format!("lattice-{:06}.rec", star.unwrap_or(0)))
}

fn params_key(p: &CertificationParams, selected: &[usize]) -> String {
    let sel: Vec<String> = selected.iter().map(usize::to_string).collect();
    format!("{} n={} m={} b={} delta={} selected={}", p.problem, p.n, p.m, p.b_bits, p.delta, sel.join(","))
}

fn write_record(path: &Path, key: &str, rec: &LatticeRecord) -> Result<(), IndependenceError> {
    let text = format!("params {key}\nstar {}\nmin_gs_norm_sq {}\nN {}\n", rec.star_index.unwrap_or(0), rec.min_gs_norm_sq, rec.n_i);
    // write then rename so an interrupted job never leaves a partial record
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text).map_err(|source| IndependenceError::Io { path: tmp.clone(), source })?;
    std::fs::rename(&tmp, path).map_err(|source| IndependenceError::Io { path: path.to_owned(), source })
}

/// A stored record, or `None` if absent or written for other parameters.
fn read_record(path: &Path, key: &str) -> Result<Option<LatticeRecord>, IndependenceError> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(source) => return Err(IndependenceError::Io { path: path.to_owned(), source }),
    };
    let bad = |message: &str| IndependenceError::Format { path: path.to_owned(), message: message.to_string() };
    let mut lines = text.lines();
    if lines.next().and_then(|l| l.strip_prefix("params ")) != Some(key) {
        return Ok(None);
    }
    let mut field = |name: &str| -> Result<String, IndependenceError> {
        lines
            .next()
            .and_then(|l| l.strip_prefix(name))
            .and_then(|l| l.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| bad(&format!("missing {name}")))
    };
    let star: usize = field("star")?.parse().map_err(|_| bad("star"))?;
    let min = Rational::from_str(&field("min_gs_norm_sq")?).map_err(|_| bad("min_gs_norm_sq"))?;
    let n_i: u64 = field("N")?.parse().map_err(|_| bad("N"))?;
    Ok(Some(LatticeRecord { star_index: (star > 0).then_some(star), min_gs_norm_sq: min, n_i }))
}

/// Selects Γ′ by `k_T(γ)|r_γ|` under the Jurkat–Peyerimhoff kernel with
/// `T = γ_{m+1} − ε`, then reduces Λ₀ and one Λ_i per remaining ordinate
/// below `T`. A lattice with `N_i = 0` yields an uncertified certificate,
/// not an error.
pub fn run_certification(
    params: &CertificationParams,
    zeros: &ZeroTable,
    residues: &ResidueSet,
) -> Result<IndependenceCertificate, IndependenceError> {
    let (n, m) = (params.n, params.m);
    if n == 0 || m < n {
        return Err(IndependenceError::Parameter(format!("need 1 <= n <= m, got n = {n}, m = {m}")));
    }
    if params.epsilon <= 0 {
        return Err(IndependenceError::Parameter("epsilon must be positive".into()));
    }
    if zeros.count() < m + 1 {
        return Err(IndependenceError::Coverage { have: zeros.count(), need: m + 1 });
    }
    let next = &zeros.records()[m].gamma;
    let t = Float::with_val(next.prec(), next - &params.epsilon);
    if zeros.records()[m - 1].gamma >= t {
        return Err(IndependenceError::Parameter("epsilon too large: gamma_m >= T".into()));
    }
    let kernel = KernelSpec::jurkat_peyerimhoff(t.to_f64())?;
    let weighted = WeightedResidueSet::build(params.problem, kernel, zeros, residues)?;
    if weighted.len() != m {
        return Err(IndependenceError::Coverage { have: weighted.len(), need: m });
    }
    let mut selected = select_gamma_prime(&weighted, n)?;
    selected.sort_unstable();

    let records = &zeros.records()[..m];
    let correct_bits = records.iter().map(|r| r.precision_bits).min().expect("m >= 1");
    let prime: Vec<Float> = selected.iter().map(|&i| records[i - 1].gamma.clone()).collect();
    let mut jobs: Vec<Option<usize>> = vec![None];
    jobs.extend((1..=m).filter(|i| selected.binary_search(i).is_err()).map(Some));

    let key = params_key(params, &selected);
    if let Some(dir) = &params.resume_dir {
        std::fs::create_dir_all(dir).map_err(|source| IndependenceError::Io { path: dir.clone(), source })?;
    }
    let run = |star: Option<usize>| -> Result<LatticeRecord, IndependenceError> {
        let path = params.resume_dir.as_deref().map(|d| record_path(d, star));
        if let Some(p) = &path {
            if let Some(rec) = read_record(p, &key)? {
                return Ok(rec);
            }
        }
        let star_gamma = star.map(|i| &records[i - 1].gamma);
        let mut basis = build_lattice(&prime, star_gamma, params.b_bits, Some(correct_bits))?;
        basis.star_index = star;
        let reduced = lll_reduce(&basis, params.delta, params.mode)?;
        let min = gram_schmidt_min_norm_sq(&reduced.basis)?;
        let kind = if star.is_some() { LatticeKind::LambdaI } else { LatticeKind::Lambda0 };
        let rec = LatticeRecord { star_index: star, n_i: certify_n(&min, n as u64, kind), min_gs_norm_sq: min };
        if let Some(p) = &path {
            write_record(p, &key, &rec)?;
        }
        Ok(rec)
    };
    let results: Vec<Result<LatticeRecord, IndependenceError>> =
        with_workers(params.workers, || jobs.par_iter().map(|&s| run(s)).collect());
    let lattices = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let certified_n = lattices.iter().map(|r| r.n_i).min().expect("at least one lattice");
    Ok(IndependenceCertificate {
        problem: params.problem,
        n,
        m,
        b_bits: params.b_bits,
        delta: params.delta,
        epsilon: params.epsilon.clone(),
        t,
        selected_indices: selected,
        lattices,
        certified_n,
    })
}

/// Text form: `key value` header lines, then one
/// `star_index min_gs_norm_sq N_i` line per lattice (star 0 for Λ₀).
pub fn write_certificate(cert: &IndependenceCertificate) -> String {
    let mut out = String::new();
    let sel: Vec<String> = cert.selected_indices.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "# independence certificate");
    let _ = writeln!(out, "problem {}", cert.problem);
    let _ = writeln!(out, "n {}", cert.n);
    let _ = writeln!(out, "m {}", cert.m);
    let _ = writeln!(out, "b {}", cert.b_bits);
    let _ = writeln!(out, "delta {}", cert.delta);
    let _ = writeln!(out, "epsilon {}", format_decimal(&cert.epsilon, 20));
    let _ = writeln!(out, "T {}", format_decimal(&cert.t, digits_for_bits(cert.t.prec())));
    let _ = writeln!(out, "selected {}", sel.join(","));
    let _ = writeln!(out, "certified_N {}", cert.certified_n);
    let _ = writeln!(out, "# star_index min_gs_norm_sq N_i");
    for r in &cert.lattices {
        let _ = writeln!(out, "{} {} {}", r.star_index.unwrap_or(0), r.min_gs_norm_sq, r.n_i);
    }
    out
}

pub fn read_certificate(text: &str) -> Result<IndependenceCertificate, IndependenceError> {
    let bad = |message: String| IndependenceError::Format { path: PathBuf::from("<certificate>"), message };
    let mut header = std::collections::HashMap::new();
    let mut lattices = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            [key, value] if key.chars().next().is_some_and(char::is_alphabetic) => {
                header.insert(key.to_string(), value.to_string());
            }
            [star, min, n_i] => {
                let star: usize = star.parse().map_err(|_| bad(format!("bad star index in '{line}'")))?;
                lattices.push(LatticeRecord {
                    star_index: (star > 0).then_some(star),
                    min_gs_norm_sq: Rational::from_str(min).map_err(|_| bad(format!("bad rational in '{line}'")))?,
                    n_i: n_i.parse().map_err(|_| bad(format!("bad N in '{line}'")))?,
                });
            }
            _ => return Err(bad(format!("unrecognised line '{line}'"))),
        }
    }
    let get = |k: &str| header.get(k).cloned().ok_or_else(|| bad(format!("missing {k}")));
    let num = |k: &str| -> Result<u64, IndependenceError> { get(k)?.parse().map_err(|_| bad(format!("bad {k}"))) };
    let t_text = get("T")?;
    let t_digits = t_text.chars().filter(char::is_ascii_digit).count();
    let parse = |s: &str, bits: u32| parse_decimal(s, bits).map(|d| d.value).map_err(|e| bad(e.to_string()));
    let selected = get("selected")?
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| bad(format!("bad index '{s}'"))))
        .collect::<Result<Vec<usize>, _>>()?;
    Ok(IndependenceCertificate {
        problem: get("problem")?.parse().map_err(bad)?,
        n: num("n")? as usize,
        m: num("m")? as usize,
        b_bits: num("b")? as u32,
        delta: get("delta")?.parse().map_err(|_| bad("bad delta".into()))?,
        epsilon: parse(&get("epsilon")?, 128)?,
        t: parse(&t_text, crate::hp::bits_for_digits(t_digits).max(64))?,
        selected_indices: selected,
        lattices,
        certified_n: num("certified_N")?,
    })
}
