//! LLL reduction with exact integer basis vectors.
//!
//! The exact path is the integral algorithm (Cohen, Alg. 2.6.7): all
//! Gram–Schmidt data is kept as the integers `d_i` (leading Gram minors) and
//! `λ_{ij} = d_j μ_{ij}`. The floating path runs Schnorr–Euchner style
//! reduction with MPFR Gram–Schmidt and hands its output to the exact path,
//! which then only has to confirm (or finish) the reduction.

use rug::float::Round;
use rug::{Float, Integer, Rational};

use super::lattice::LatticeBasis;
use super::IndependenceError;

/// How the Gram–Schmidt bookkeeping is carried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LllMode {
    /// Integral exact arithmetic throughout.
    Exact,
    /// MPFR pre-reduction followed by an exact pass.
    #[default]
    Hybrid,
}

/// Reduced basis plus the unimodular `U` with `reduced = U · original`.
#[derive(Debug, Clone, PartialEq)]
pub struct LllOutcome {
    pub basis: LatticeBasis,
    pub transform: Vec<Vec<Integer>>,
    pub swaps: u64,
}

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut acc = Integer::new();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

fn axpy(target: &mut [Integer], q: &Integer, source: &[Integer]) {
    for (t, s) in target.iter_mut().zip(source) {
        *t -= q * s;
    }
}

fn identity(n: usize) -> Vec<Vec<Integer>> {
    (0..n).map(|i| (0..n).map(|j| Integer::from(u32::from(i == j))).collect()).collect()
}

/// `δ = p/q` exactly.
fn delta_rational(delta: f64) -> Result<Rational, IndependenceError> {
    if !(delta > 0.25 && delta < 1.0) {
        return Err(IndependenceError::Parameter(format!("delta = {delta} must lie in (1/4, 1)")));
    }
    Ok(Rational::from_f64(delta).expect("finite delta"))
}

/// Integral LLL on `rows` (1-based bookkeeping with `d[0] = 1`), applying
/// the same row operations to `u`.
fn lll_integral(rows: &mut [Vec<Integer>], u: &mut [Vec<Integer>], delta: &Rational) -> Result<u64, IndependenceError> {
    let n = rows.len();
    if n <= 1 {
        if n == 1 && rows[0].iter().all(|x| *x == 0) {
            return Err(IndependenceError::Dependent);
        }
        return Ok(0);
    }
    let (p, q) = (delta.numer().clone(), delta.denom().clone());
    // d[i+1] is the Gram minor of rows 0..=i; lam[k][j] for j < k
    let mut d = vec![Integer::from(1); n + 1];
    let mut lam = vec![vec![Integer::new(); n]; n];
    let mut swaps = 0u64;

    let incorporate = |k: usize, rows: &[Vec<Integer>], d: &mut [Integer], lam: &mut [Vec<Integer>]| -> Result<(), IndependenceError> {
        for j in 0..=k {
            let mut t = dot(&rows[k], &rows[j]);
            for i in 0..j {
                t = (Integer::from(&d[i + 1] * &t) - Integer::from(&lam[k][i] * &lam[j][i])) / &d[i];
            }
            if j < k {
                lam[k][j] = t;
            } else {
                if t == 0 {
                    return Err(IndependenceError::Dependent);
                }
                d[k + 1] = t;
            }
        }
        Ok(())
    };

    fn reduce(k: usize, l: usize, rows: &mut [Vec<Integer>], u: &mut [Vec<Integer>], d: &[Integer], lam: &mut [Vec<Integer>]) {
        let two_lam = Integer::from(&lam[k][l] * 2u32);
        if two_lam.clone().abs() > d[l + 1] {
            // q = round(λ/d) = floor((2λ + d) / 2d)
            let num = two_lam + &d[l + 1];
            let den = Integer::from(&d[l + 1] * 2u32);
            let q = num.div_rem_floor(den).0;
            let (head, tail) = rows.split_at_mut(k);
            axpy(&mut tail[0], &q, &head[l]);
            let (head, tail) = u.split_at_mut(k);
            axpy(&mut tail[0], &q, &head[l]);
            lam[k][l] -= Integer::from(&q * &d[l + 1]);
            for i in 0..l {
                let t = Integer::from(&q * &lam[l][i]);
                lam[k][i] -= t;
            }
        }
    }

    incorporate(0, rows, &mut d, &mut lam)?;
    let mut k = 1;
    let mut kmax = 0;
    while k < n {
        if k > kmax {
            kmax = k;
            incorporate(k, rows, &mut d, &mut lam)?;
        }
        reduce(k, k - 1, rows, u, &d, &mut lam);
        // Lovász fails iff q d_k d_{k-2} < p d_{k-1}² − q λ²
        let lhs = Integer::from(&q * &d[k + 1]) * &d[k - 1];
        let lam2 = Integer::from(lam[k][k - 1].square_ref());
        let rhs = Integer::from(&p * Integer::from(d[k].square_ref())) - Integer::from(&q * &lam2);
        if lhs < rhs {
            swaps += 1;
            rows.swap(k, k - 1);
            u.swap(k, k - 1);
            for j in 0..k - 1 {
                let (a, b) = lam.split_at_mut(k);
                std::mem::swap(&mut a[k - 1][j], &mut b[0][j]);
            }
            let l = lam[k][k - 1].clone();
            let big_b = (Integer::from(&d[k - 1] * &d[k + 1]) + Integer::from(l.square_ref())) / &d[k];
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (Integer::from(&d[k + 1] * &lam[i][k - 1]) - Integer::from(&l * &t)) / &d[k];
                lam[i][k - 1] = (Integer::from(&big_b * &t) + Integer::from(&l * &lam[i][k])) / &d[k + 1];
            }
            d[k] = big_b;
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                reduce(k, l, rows, u, &d, &mut lam);
            }
            k += 1;
        }
    }
    Ok(swaps)
}

fn to_float_row(row: &[Integer], prec: u32) -> Vec<Float> {
    row.iter().map(|x| Float::with_val(prec, x)).collect()
}

fn fdot(a: &[Float], b: &[Float], prec: u32) -> Float {
    let mut acc = Float::new(prec);
    for (x, y) in a.iter().zip(b) {
        acc += Float::with_val(prec, x * y);
    }
    acc
}

/// Floating LLL pre-reduction. Row `k`'s Gram–Schmidt data is recomputed
/// from the exact integers after every size reduction.
fn lll_float(rows: &mut [Vec<Integer>], u: &mut [Vec<Integer>], delta: f64, prec: u32) -> u64 {
    let n = rows.len();
    if n <= 1 {
        return 0;
    }
    let mut bf: Vec<Vec<Float>> = rows.iter().map(|r| to_float_row(r, prec)).collect();
    let mut mu = vec![vec![Float::new(prec); n]; n];
    let mut bn = vec![Float::new(prec); n];
    let delta_f = Float::with_val(prec, delta);
    let half = Float::with_val(prec, 0.51);
    let mut swaps = 0u64;
    let budget = 200 * (n as u64).pow(3) + 10_000;

    let gs_row = |k: usize, bf: &[Vec<Float>], mu: &mut [Vec<Float>], bn: &mut [Float]| {
        for j in 0..k {
            let mut t = fdot(&bf[k], &bf[j], prec);
            for i in 0..j {
                t -= Float::with_val(prec, &mu[j][i] * &mu[k][i]) * &bn[i];
            }
            mu[k][j] = if bn[j] == 0 { Float::new(prec) } else { t / &bn[j] };
        }
        let mut b = fdot(&bf[k], &bf[k], prec);
        for j in 0..k {
            b -= Float::with_val(prec, mu[k][j].square_ref()) * &bn[j];
        }
        bn[k] = b;
    };

    gs_row(0, &bf, &mut mu, &mut bn);
    let mut k = 1;
    let mut steps = 0u64;
    while k < n && steps < budget {
        steps += 1;
        if k == 1 {
            gs_row(0, &bf, &mut mu, &mut bn);
        }
        gs_row(k, &bf, &mut mu, &mut bn);
        for _ in 0..64 {
            let mut changed = false;
            for j in (0..k).rev() {
                if Float::with_val(prec, mu[k][j].abs_ref()) > half {
                    let q = mu[k][j].to_integer_round(Round::Nearest).expect("finite").0;
                    let (head, tail) = rows.split_at_mut(k);
                    axpy(&mut tail[0], &q, &head[j]);
                    let (head, tail) = u.split_at_mut(k);
                    axpy(&mut tail[0], &q, &head[j]);
                    let qf = Float::with_val(prec, &q);
                    for i in 0..j {
                        let t = Float::with_val(prec, &qf * &mu[j][i]);
                        mu[k][i] -= t;
                    }
                    mu[k][j] -= &qf;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            bf[k] = to_float_row(&rows[k], prec);
            gs_row(k, &bf, &mut mu, &mut bn);
        }
        let bound = Float::with_val(prec, &delta_f - Float::with_val(prec, mu[k][k - 1].square_ref())) * &bn[k - 1];
        if bn[k] >= bound {
            k += 1;
        } else {
            swaps += 1;
            rows.swap(k, k - 1);
            u.swap(k, k - 1);
            bf.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    swaps
}

/// LLL-reduces `basis` with parameter `delta ∈ (1/4, 1)`. The output always
/// satisfies the exact size-reduction and Lovász conditions.
pub fn lll_reduce(basis: &LatticeBasis, delta: f64, mode: LllMode) -> Result<LllOutcome, IndependenceError> {
    let delta_q = delta_rational(delta)?;
    let mut rows = basis.rows.clone();
    let mut u = identity(rows.len());
    let mut swaps = 0;
    if mode == LllMode::Hybrid {
        let prec = (basis.max_entry_bits() + 2 * rows.len() as u32 + 64).max(64);
        swaps += lll_float(&mut rows, &mut u, delta, prec);
    }
    swaps += lll_integral(&mut rows, &mut u, &delta_q)?;
    Ok(LllOutcome { basis: LatticeBasis { rows, ..basis.clone() }, transform: u, swaps })
}

/// Leading Gram minors `d_1 … d_n` by fraction-free elimination.
fn gram_minors(rows: &[Vec<Integer>]) -> Result<Vec<Integer>, IndependenceError> {
    let n = rows.len();
    let mut g: Vec<Vec<Integer>> = (0..n).map(|i| (0..n).map(|j| dot(&rows[i], &rows[j])).collect()).collect();
    let mut minors = Vec::with_capacity(n);
    let mut prev = Integer::from(1);
    for k in 0..n {
        if g[k][k] == 0 {
            return Err(IndependenceError::Dependent);
        }
        minors.push(g[k][k].clone());
        for i in k + 1..n {
            for j in k + 1..n {
                let t = Integer::from(&g[k][k] * &g[i][j]) - Integer::from(&g[i][k] * &g[k][j]);
                g[i][j] = t / &prev;
            }
        }
        prev = g[k][k].clone();
    }
    Ok(minors)
}

/// Exact squared Gram–Schmidt norms `‖b*_i‖² = d_i / d_{i−1}`.
pub fn gram_schmidt_norms_exact(basis: &LatticeBasis) -> Result<Vec<Rational>, IndependenceError> {
    let minors = gram_minors(&basis.rows)?;
    let mut prev = Integer::from(1);
    let mut out = Vec::with_capacity(minors.len());
    for d in minors {
        out.push(Rational::from((d.clone(), prev)));
        prev = d;
    }
    Ok(out)
}

/// Squared Gram–Schmidt norms by classical Gram–Schmidt in MPFR.
pub fn gram_schmidt_norms_float(basis: &LatticeBasis, prec: u32) -> Vec<Float> {
    let mut star: Vec<Vec<Float>> = Vec::with_capacity(basis.dim());
    let mut norms: Vec<Float> = Vec::with_capacity(basis.dim());
    for row in &basis.rows {
        let b = to_float_row(row, prec);
        let mut v = b.clone();
        for (s, ns) in star.iter().zip(&norms) {
            let m = fdot(&b, s, prec) / ns;
            for (vi, si) in v.iter_mut().zip(s) {
                *vi -= Float::with_val(prec, &m * si);
            }
        }
        norms.push(fdot(&v, &v, prec));
        star.push(v);
    }
    norms
}

/// `min_i ‖b*_i‖²`, exactly.
pub fn gram_schmidt_min_norm_sq(basis: &LatticeBasis) -> Result<Rational, IndependenceError> {
    let norms = gram_schmidt_norms_exact(basis)?;
    Ok(norms.into_iter().min().expect("nonempty basis"))
}

/// Checks `|μ_ij| ≤ 1/2` and `B_k ≥ (δ − μ²_{k,k−1}) B_{k−1}` exactly.
pub fn is_lll_reduced(basis: &LatticeBasis, delta: f64) -> Result<bool, IndependenceError> {
    let delta = delta_rational(delta)?;
    let n = basis.dim();
    let rows = &basis.rows;
    let minors = gram_minors(rows)?;
    let b: Vec<Rational> = gram_schmidt_norms_exact(basis)?;
    // μ_kj = λ_kj / d_j with λ from the integral recurrence
    let mut lam = vec![vec![Integer::new(); n]; n];
    let d = |i: usize| if i == 0 { Integer::from(1) } else { minors[i - 1].clone() };
    for k in 0..n {
        for j in 0..k {
            let mut t = dot(&rows[k], &rows[j]);
            for i in 0..j {
                t = (Integer::from(&d(i + 1) * &t) - Integer::from(&lam[k][i] * &lam[j][i])) / d(i);
            }
            lam[k][j] = t;
        }
    }
    for k in 1..n {
        for j in 0..k {
            if Integer::from(lam[k][j].abs_ref()) * 2u32 > d(j + 1) {
                return Ok(false);
            }
        }
        let mu = Rational::from((lam[k][k - 1].clone(), d(k)));
        let rhs = (delta.clone() - Rational::from(mu.square_ref())) * &b[k - 1];
        if b[k] < rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Determinant of a square integer matrix by Bareiss elimination with row
/// pivoting.
pub fn bareiss_determinant(matrix: &[Vec<Integer>]) -> Integer {
    let n = matrix.len();
    if n == 0 {
        return Integer::from(1);
    }
    let mut a = matrix.to_vec();
    let mut sign = 1i32;
    let mut prev = Integer::from(1);
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return Integer::new(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = Integer::from(&a[k][k] * &a[i][j]) - Integer::from(&a[i][k] * &a[k][j]);
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// `U · rows`.
pub fn apply_transform(u: &[Vec<Integer>], rows: &[Vec<Integer>]) -> Vec<Vec<Integer>> {
    let width = rows.first().map_or(0, Vec::len);
    u.iter()
        .map(|urow| {
            (0..width)
                .map(|c| {
                    let mut acc = Integer::new();
                    for (x, r) in urow.iter().zip(rows) {
                        acc += x * &r[c];
                    }
                    acc
                })
                .collect()
        })
        .collect()
}
