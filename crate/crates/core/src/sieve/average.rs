use crate::primes::for_each_prime;

use super::SieveError;

/// Exact `Σ_{n<=x} ω(n)` and `Σ_{n<=x} Ω(n)` with the implied constants
/// `A_est = (Σω − x log log x)/x` and `B_est = (ΣΩ − x log log x)/x`.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageOrderReport {
    pub x_max: u64,
    pub sum_omega: u128,
    pub sum_big_omega: u128,
    pub a_est: f64,
    pub b_est: f64,
}

/// Uses `Σ ω(n) = Σ_p ⌊x/p⌋` and `Σ Ω(n) = Σ_{p^k} ⌊x/p^k⌋` over a
/// segmented prime sieve.
pub fn average_order_report(x_max: u64) -> Result<AverageOrderReport, SieveError> {
    // log log x must be positive
    if x_max < 3 {
        return Err(SieveError::Parameter(format!("x_max = {x_max} must be at least 3")));
    }
    let mut sum_omega: u128 = 0;
    let mut sum_big: u128 = 0;
    for_each_prime(x_max, |p| {
        let q = x_max / p;
        sum_omega += q as u128;
        let mut pk = p;
        loop {
            sum_big += (x_max / pk) as u128;
            match pk.checked_mul(p) {
                Some(next) if next <= x_max => pk = next,
                _ => break,
            }
        }
    });
    let x = x_max as f64;
    let main = x * x.ln().ln();
    Ok(AverageOrderReport {
        x_max,
        sum_omega,
        sum_big_omega: sum_big,
        a_est: (sum_omega as f64 - main) / x,
        b_est: (sum_big as f64 - main) / x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::omega_pair_bruteforce;

    #[test]
    fn matches_bruteforce_sums() {
        let r = average_order_report(10).unwrap();
        assert_eq!((r.sum_omega, r.sum_big_omega), (11, 15));
        for x in [16u64, 100, 12_345] {
            let r = average_order_report(x).unwrap();
            let (w, big) = (1..=x).fold((0u128, 0u128), |(a, b), n| {
                let (w, big) = omega_pair_bruteforce(n);
                (a + w as u128, b + big as u128)
            });
            assert_eq!((r.sum_omega, r.sum_big_omega), (w, big));
        }
        assert!(average_order_report(2).is_err());
    }
}
