//! Block sieve on `[a, b)` with two bits of state per integer.
//!
//! Phase 1: primes `p` with `b/(N−1) <= p <= √b`. Every multiple `n` has
//! `n/p < N`, so the value follows from the table entry of `n/p` with its
//! factors 2, 3, 5 stripped.
//! Phase 2: primes from `⌈b/(N−1)⌉ − 1` down to 7. A still-unknown multiple
//! has no prime factor above `p` except possibly one beyond `√b`, so trial
//! division by `7..=p` either brings the cofactor under `N` or leaves that
//! single large prime.
//! Phase 3: what is left has the form `2^r 3^s 5^t q^e` with `q > √b`.

use super::table::XiTable;
use super::{SieveError, SieveFunc};
use crate::primes::{isqrt, primes_up_to};

pub(crate) const STATE_UNKNOWN: u8 = 0;
pub(crate) const STATE_PLUS: u8 = 1;
pub(crate) const STATE_MINUS: u8 = 2;
/// Only produced by the μ sieve.
pub(crate) const STATE_ZERO: u8 = 3;

/// Packed 2-bit states, 32 per word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockValues {
    len: usize,
    words: Vec<u64>,
}

impl BlockValues {
    pub fn new(len: usize) -> Self {
        BlockValues { len, words: vec![0; len.div_ceil(32)] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub(crate) fn state(&self, i: usize) -> u8 {
        ((self.words[i >> 5] >> ((i & 31) << 1)) & 3) as u8
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, state: u8) {
        let shift = (i & 31) << 1;
        let w = &mut self.words[i >> 5];
        *w = (*w & !(3 << shift)) | ((state as u64) << shift);
    }

    #[inline]
    fn set_sign(&mut self, i: usize, negative: bool) {
        self.set(i, if negative { STATE_MINUS } else { STATE_PLUS });
    }

    /// Value at offset `i`: ±1, 0, or `None` while unknown.
    #[inline]
    pub fn get(&self, i: usize) -> Option<i8> {
        match self.state(i) {
            STATE_PLUS => Some(1),
            STATE_MINUS => Some(-1),
            STATE_ZERO => Some(0),
            _ => None,
        }
    }

    pub fn unknown_count(&self) -> usize {
        (0..self.len).filter(|&i| self.state(i) == STATE_UNKNOWN).count()
    }

    /// `Σ` of the decoded values.
    pub fn sum(&self) -> i64 {
        let mut plus = 0i64;
        let mut minus = 0i64;
        for (wi, &w) in self.words.iter().enumerate() {
            let valid = (self.len - 32 * wi).min(32);
            let mask = if valid == 32 { u64::MAX } else { (1u64 << (2 * valid)) - 1 };
            let w = w & mask;
            let lo = w & 0x5555_5555_5555_5555;
            let hi = (w >> 1) & 0x5555_5555_5555_5555;
            plus += (lo & !hi).count_ones() as i64;
            minus += (hi & !lo).count_ones() as i64;
        }
        plus - minus
    }
}

/// A fully sieved block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockResult {
    pub a: u64,
    pub b: u64,
    pub values: BlockValues,
    pub partial_sum: i64,
}

impl BlockResult {
    /// Value at `n ∈ [a, b)`.
    pub fn value(&self, n: u64) -> i8 {
        self.values.get((n - self.a) as usize).expect("complete block")
    }

    pub fn decoded(&self) -> Vec<i8> {
        (0..self.values.len()).map(|i| self.values.get(i).expect("complete block")).collect()
    }
}

/// Removes 2, 3 and 5 from `c`; returns the cofactor and the parity
/// contribution (distinct primes for ξ, exponents for λ).
#[inline]
fn strip_small(mut c: u64, distinct: bool) -> (u64, u32) {
    let tz = c.trailing_zeros();
    c >>= tz;
    let mut parity = if distinct { (tz > 0) as u32 } else { tz };
    for q in [3u64, 5] {
        if c % q == 0 {
            let mut e = 0;
            while c % q == 0 {
                c /= q;
                e += 1;
            }
            parity += if distinct { 1 } else { e };
        }
    }
    (c, parity)
}

/// Sieves ξ or λ (the table's function) on `[a, b)`.
pub fn sieve_block(a: u64, b: u64, table: &XiTable) -> Result<BlockResult, SieveError> {
    let primes = primes_up_to(isqrt(b.saturating_sub(1)).max(7));
    sieve_block_with_primes(a, b, table, &primes, table.func())
}

pub(crate) fn sieve_block_with_primes(
    a: u64,
    b: u64,
    table: &XiTable,
    primes: &[u64],
    func: SieveFunc,
) -> Result<BlockResult, SieveError> {
    if a < 1 || a >= b {
        return Err(SieveError::Range { a, b });
    }
    let n_lim = table.limit();
    let guard = (n_lim - 1).checked_mul(n_lim - 1).unwrap_or(u64::MAX);
    if b > guard {
        return Err(SieveError::Guard { b, limit: n_lim });
    }
    let distinct = func == SieveFunc::Xi;
    let len = (b - a) as usize;
    let mut values = BlockValues::new(len);
    let root = isqrt(b);
    let root_last = isqrt(b - 1);
    // smallest p with p >= b/(N-1)
    let split = b.div_ceil(n_lim - 1).max(7);
    let hi_end = primes.partition_point(|&p| p <= root);
    let lo_end = primes.partition_point(|&p| p < split);
    let first7 = primes.partition_point(|&p| p < 7);

    // phase 1: table lookups on n/p
    let hi_start = lo_end.max(first7);
    for &p in &primes[hi_start..hi_end.max(hi_start)] {
        let mut k = a.div_ceil(p).max(1);
        let mut n = k * p;
        while n < b {
            let i = (n - a) as usize;
            if values.state(i) == STATE_UNKNOWN {
                let (c, parity) = strip_small(k, distinct);
                let mut neg = table.is_negative(c) ^ (parity & 1 == 1);
                if !distinct || c % p != 0 {
                    neg = !neg;
                }
                values.set_sign(i, neg);
            }
            n += p;
            k += 1;
        }
    }

    // phase 2: descending primes below the split, trial division as needed
    if lo_end > first7 {
        for pi in (first7..lo_end.min(hi_end)).rev() {
            let p = primes[pi];
            let mut n = a.div_ceil(p) * p;
            while n < b {
                let i = (n - a) as usize;
                if values.state(i) == STATE_UNKNOWN {
                    let (mut c, mut parity) = strip_small(n, distinct);
                    if c >= n_lim {
                        for &q in &primes[first7..=pi] {
                            if c % q == 0 {
                                let mut e = 0;
                                while c % q == 0 {
                                    c /= q;
                                    e += 1;
                                }
                                parity += if distinct { 1 } else { e };
                                if c < n_lim {
                                    break;
                                }
                            }
                        }
                    }
                    let neg = if c < n_lim {
                        table.is_negative(c) ^ (parity & 1 == 1)
                    } else {
                        // all prime factors up to p are gone: c is one prime beyond √b
                        if c <= root_last {
                            return Err(SieveError::Internal(format!(
                                "cofactor {c} of {n} is not a prime above √{b}"
                            )));
                        }
                        parity & 1 == 0
                    };
                    values.set_sign(i, neg);
                }
                n += p;
            }
        }
    }

    // phase 3: n = 2^r 3^s 5^t q^e
    for i in 0..len {
        if values.state(i) == STATE_UNKNOWN {
            let n = a + i as u64;
            let (c, parity) = strip_small(n, distinct);
            let extra = if c > 1 {
                if c <= root_last && c >= 7 {
                    return Err(SieveError::Internal(format!("{n} still has the factor {c} <= √{b}")));
                }
                1
            } else {
                0
            };
            values.set_sign(i, (parity + extra) & 1 == 1);
        }
    }

    if values.unknown_count() != 0 {
        return Err(SieveError::Internal(format!("unknown entries left in [{a}, {b})")));
    }
    let partial_sum = values.sum();
    Ok(BlockResult { a, b, values, partial_sum })
}

/// μ on `[a, b)` by the segmented squarefree sieve. `primes` must reach `√(b−1)`.
pub fn mu_block(a: u64, b: u64, primes: &[u64]) -> Result<BlockResult, SieveError> {
    if a < 1 || a >= b {
        return Err(SieveError::Range { a, b });
    }
    let root = isqrt(b - 1);
    if primes.last().map_or(root >= 2, |&p| p < root && !primes_cover(primes, root)) {
        return Err(SieveError::Parameter(format!("prime list does not reach √{b}")));
    }
    let len = (b - a) as usize;
    let mut rem: Vec<u64> = (a..b).collect();
    let mut neg = vec![false; len];
    let mut zero = vec![false; len];
    for &p in primes.iter().take_while(|&&p| p <= root) {
        let mut n = a.div_ceil(p) * p;
        while n < b {
            let i = (n - a) as usize;
            rem[i] /= p;
            neg[i] = !neg[i];
            n += p;
        }
        let p2 = p * p;
        let mut n = a.div_ceil(p2) * p2;
        while n < b {
            zero[(n - a) as usize] = true;
            n += p2;
        }
    }
    let mut values = BlockValues::new(len);
    for i in 0..len {
        let state = if zero[i] {
            STATE_ZERO
        } else if neg[i] ^ (rem[i] > 1) {
            STATE_MINUS
        } else {
            STATE_PLUS
        };
        values.set(i, state);
    }
    let partial_sum = values.sum();
    Ok(BlockResult { a, b, values, partial_sum })
}

fn primes_cover(primes: &[u64], root: u64) -> bool {
    // a list ending below root is still complete if no prime lies in between
    let last = *primes.last().expect("non-empty");
    (last + 1..=root).all(|m| !crate::primes::is_prime(m))
}

/// Sieve state shared by all blocks of one run: function, table and primes.
#[derive(Debug, Clone)]
pub struct Sieve {
    func: SieveFunc,
    table: Option<XiTable>,
    primes: Vec<u64>,
    x_limit: u64,
}

impl Sieve {
    /// Prepares to sieve `[1, x_limit]`. For ξ and λ the table is built with
    /// the given limit (a multiple of 30).
    pub fn new(func: SieveFunc, table_limit: u64, x_limit: u64, memory_cap: Option<u64>) -> Result<Self, SieveError> {
        let table = match func {
            SieveFunc::Mu => None,
            _ => Some(XiTable::build(table_limit, func, memory_cap)?),
        };
        Self::with_table(func, table, x_limit)
    }

    /// Uses an existing table (which must match `func`).
    pub fn with_table(func: SieveFunc, table: Option<XiTable>, x_limit: u64) -> Result<Self, SieveError> {
        if let Some(t) = &table {
            if t.func() != func {
                return Err(SieveError::Parameter(format!("table holds {} but {} was requested", t.func(), func)));
            }
            let b = x_limit.saturating_add(1);
            if b > (t.limit() - 1).saturating_mul(t.limit() - 1) {
                return Err(SieveError::Guard { b, limit: t.limit() });
            }
        } else if func != SieveFunc::Mu {
            return Err(SieveError::Parameter(format!("{func} needs a table")));
        }
        let primes = primes_up_to(isqrt(x_limit).max(7) + 1);
        Ok(Sieve { func, table, primes, x_limit })
    }

    pub fn func(&self) -> SieveFunc {
        self.func
    }

    pub fn table(&self) -> Option<&XiTable> {
        self.table.as_ref()
    }

    pub fn x_limit(&self) -> u64 {
        self.x_limit
    }

    /// Sieves `[a, b)` with `b <= x_limit + 1`.
    pub fn block(&self, a: u64, b: u64) -> Result<BlockResult, SieveError> {
        if b > self.x_limit + 1 {
            return Err(SieveError::Range { a, b });
        }
        match &self.table {
            Some(t) => sieve_block_with_primes(a, b, t, &self.primes, self.func),
            None => mu_block(a, b, &self.primes),
        }
    }
}
