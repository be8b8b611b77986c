use rug::{Integer, Rational};

/// Tangent numbers `T_1 … T_n` (`tan x = Σ T_k x^{2k-1}/(2k-1)!`), by the
/// integer recurrence of Brent and Harvey.
fn tangent_numbers(n: usize) -> Vec<Integer> {
    let mut t = vec![Integer::new(); n + 1];
    if n == 0 {
        return t;
    }
    t[1] = Integer::from(1);
    for k in 2..=n {
        t[k] = Integer::from(&t[k - 1] * (k as u64 - 1));
    }
    for k in 2..=n {
        for j in k..=n {
            let prev = Integer::from(&t[j - 1] * (j as u64 - k as u64));
            t[j] *= (j - k + 2) as u64;
            t[j] += prev;
        }
    }
    t
}

/// `B_2, B_4, …, B_{2n}` as exact rationals.
pub fn bernoulli_even(n: usize) -> Vec<Rational> {
    let t = tangent_numbers(n);
    (1..=n)
        .map(|k| {
            let four_k = Integer::from(1) << (2 * k as u32);
            let den = Integer::from(&four_k * Integer::from(&four_k - 1u32));
            let mut num = Integer::from(&t[k] * (2 * k as u64));
            if k % 2 == 0 {
                num = -num;
            }
            Rational::from((num, den))
        })
        .collect()
}

/// Euler–Maclaurin coefficients `c_k = B_{2k}/(2k)!` for `k = 1..=n`.
pub fn em_coefficients(n: usize) -> Vec<Rational> {
    let b = bernoulli_even(n);
    let mut fact = Integer::from(1);
    let mut out = Vec::with_capacity(n);
    for (i, bk) in b.into_iter().enumerate() {
        let k = i as u64 + 1;
        fact *= (2 * k - 1) * (2 * k);
        out.push(bk / Rational::from(&fact));
    }
    out
}

/// `ln |B_{2k}/(2k)!|` from `|B_{2k}|/(2k)! = 2 ζ(2k)/(2π)^{2k}`.
pub fn ln_abs_em_coefficient(k: usize) -> f64 {
    let two_k = 2.0 * k as f64;
    let zeta = if k == 1 {
        std::f64::consts::PI * std::f64::consts::PI / 6.0
    } else {
        // direct sum plus the Euler–Maclaurin tail from M = 30
        let m = 30.0f64;
        let head: f64 = (1..30).map(|n| (n as f64).powf(-two_k)).sum();
        head + m.powf(1.0 - two_k) / (two_k - 1.0) + 0.5 * m.powf(-two_k) + two_k / 12.0 * m.powf(-two_k - 1.0)
    };
    std::f64::consts::LN_2 + zeta.ln() - two_k * (2.0 * std::f64::consts::PI).ln()
}
