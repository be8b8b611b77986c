//! Small prime utilities shared by the sieves, the Euler products and the
//! density enumerations.

/// All primes `<= limit`, by an odd-only sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    // index i <-> odd number 2i+1
    let half = limit / 2 + 1;
    let mut composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(estimate_pi(limit as f64) as usize + 16);
    primes.push(2);
    for (i, &c) in composite.iter().enumerate().skip(1) {
        let n = 2 * i + 1;
        if n > limit {
            break;
        }
        if !c {
            primes.push(n as u64);
        }
    }
    primes
}

fn estimate_pi(x: f64) -> f64 {
    if x < 10.0 {
        4.0
    } else {
        1.26 * x / x.ln()
    }
}

/// Calls `f` with every prime `<= limit` in increasing order, sieving in
/// segments so memory stays `O(sqrt(limit))`.
pub fn for_each_prime(limit: u64, mut f: impl FnMut(u64)) {
    if limit < 2 {
        return;
    }
    let root = isqrt(limit);
    let base = primes_up_to(root);
    const SEGMENT: u64 = 1 << 18;
    let mut lo = 2u64;
    let mut seg = vec![true; SEGMENT as usize];
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        seg[..len].iter_mut().for_each(|x| *x = true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut start = ((lo + p - 1) / p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut m = start;
            while m <= hi {
                seg[(m - lo) as usize] = false;
                m += p;
            }
        }
        for (i, &is_p) in seg[..len].iter().enumerate() {
            if is_p {
                f(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
}

/// Smallest prime factor of every `n <= limit` (`spf[0] = spf[1] = 0`).
pub fn smallest_prime_factors(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = ((n as f64).sqrt() as u64).min(u32::MAX as u64);
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |sq| sq <= n) {
        r += 1;
    }
    r
}

/// Deterministic trial-division primality test for small inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_prime_lists() {
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
    }

    #[test]
    fn segmented_matches_plain() {
        let mut seg = Vec::new();
        for_each_prime(600_000, |p| seg.push(p));
        assert_eq!(seg, primes_up_to(600_000));
    }

    #[test]
    fn isqrt_edges() {
        for n in [0u64, 1, 2, 3, 4, 15, 16, 17, 99, 100, u32::MAX as u64, u64::MAX] {
            let r = isqrt(n);
            assert!(r.checked_mul(r).unwrap() <= n);
            assert!((r + 1).checked_mul(r + 1).map_or(true, |s| s > n));
        }
    }

    #[test]
    fn spf_table() {
        let spf = smallest_prime_factors(50);
        assert_eq!(spf[49], 7);
        assert_eq!(spf[47], 47);
        assert_eq!(spf[12], 2);
    }
}
