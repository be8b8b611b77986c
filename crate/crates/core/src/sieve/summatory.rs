use std::io::{Read, Write};

use rayon::prelude::*;

use super::block::Sieve;
use super::{SieveError, SieveFunc};
use crate::parallel::with_workers;
use crate::primes::isqrt;

/// Resource settings for a sieve run.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveConfig {
    /// Largest table limit `N` to build (rounded down to a multiple of 30).
    pub table_size: u64,
    pub block_size: u64,
    pub workers: usize,
    /// Cap on table bytes.
    pub memory_cap: Option<u64>,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig { table_size: 300_000_000, block_size: 10_000_000, workers: 1, memory_cap: Some(1 << 30) }
    }
}

impl SieveConfig {
    /// The table limit actually used for sieving `[1, x_max]`: the
    /// configured size, trimmed when `x_max` is small enough that a
    /// smaller table is cheaper to build.
    pub fn effective_table(&self, x_max: u64) -> Result<u64, SieveError> {
        let cap = self.table_size / 30 * 30;
        let wanted = (x_max / 8 + 30).div_ceil(30) * 30;
        let n = cap.min(wanted).max(30);
        let needed = isqrt(x_max) + 2;
        if (n - 1).saturating_mul(n - 1) < x_max + 1 {
            let n = needed.div_ceil(30) * 30;
            if n > cap {
                return Err(SieveError::Guard { b: x_max + 1, limit: cap });
            }
            return Ok(n);
        }
        Ok(n)
    }
}

/// Where the summatory function is recorded.
#[derive(Debug, Clone, PartialEq)]
pub enum Checkpoints {
    /// Every multiple of the stride, plus `x_max`.
    Stride(u64),
    /// `⌊ratio^k⌋` for `k = 0, 1, …`, plus `x_max`.
    Geometric(f64),
    /// Exactly these points (values above `x_max` dropped), plus `x_max`.
    List(Vec<u64>),
}

impl Default for Checkpoints {
    fn default() -> Self {
        Checkpoints::Geometric(0.01f64.exp())
    }
}

/// Sorted, de-duplicated checkpoint positions in `[1, x_max]`.
pub fn checkpoint_positions(spec: &Checkpoints, x_max: u64) -> Result<Vec<u64>, SieveError> {
    let mut xs = match spec {
        Checkpoints::Stride(0) => return Err(SieveError::Parameter("checkpoint stride must be positive".into())),
        Checkpoints::Stride(s) => (1..=x_max / s).map(|k| k * s).collect::<Vec<_>>(),
        Checkpoints::Geometric(r) if !(*r > 1.0) => {
            return Err(SieveError::Parameter(format!("geometric ratio {r} must exceed 1")))
        }
        Checkpoints::Geometric(r) => {
            let mut v = Vec::new();
            let mut k = 0i32;
            loop {
                let x = r.powi(k).floor();
                if x > x_max as f64 {
                    break;
                }
                v.push(x as u64);
                k += 1;
            }
            v
        }
        Checkpoints::List(list) => list.iter().copied().filter(|&x| x >= 1 && x <= x_max).collect(),
    };
    xs.push(x_max);
    xs.sort_unstable();
    xs.dedup();
    Ok(xs)
}

/// Checkpointed `S(x) = Σ_{n<=x} f(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummatorySeries {
    pub func: SieveFunc,
    pub checkpoints: Vec<(u64, i64)>,
    pub x_max: u64,
}

impl SummatorySeries {
    /// `S(x)` at a checkpoint.
    pub fn at(&self, x: u64) -> Option<i64> {
        self.checkpoints.binary_search_by_key(&x, |c| c.0).ok().map(|i| self.checkpoints[i].1)
    }

    pub fn last(&self) -> Option<(u64, i64)> {
        self.checkpoints.last().copied()
    }
}

struct BlockSummary {
    sum: i64,
    /// `(x, Σ_{a <= n <= x})` for checkpoints inside the block.
    partials: Vec<(u64, i64)>,
}

fn block_ranges(x_max: u64, block_size: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut a = 1;
    while a <= x_max {
        let b = (a + block_size).min(x_max + 1);
        out.push((a, b));
        a = b;
    }
    out
}

/// Runs the block sieve over `[1, x_max]` and records checkpoints. Blocks
/// are sieved in parallel and merged in ascending order.
pub fn summatory(
    func: SieveFunc,
    x_max: u64,
    checkpoints: &Checkpoints,
    config: &SieveConfig,
) -> Result<SummatorySeries, SieveError> {
    if x_max < 1 {
        return Err(SieveError::Parameter("x_max must be positive".into()));
    }
    if config.block_size < 30 {
        return Err(SieveError::Parameter("block size must be at least 30".into()));
    }
    let sieve = Sieve::new(func, config.effective_table(x_max)?, x_max, config.memory_cap)?;
    summatory_with(&sieve, x_max, checkpoints, config)
}

/// [`summatory`] with a prepared [`Sieve`].
pub fn summatory_with(
    sieve: &Sieve,
    x_max: u64,
    checkpoints: &Checkpoints,
    config: &SieveConfig,
) -> Result<SummatorySeries, SieveError> {
    let xs = checkpoint_positions(checkpoints, x_max)?;
    let ranges = block_ranges(x_max, config.block_size.max(30));
    let summaries: Vec<Result<BlockSummary, SieveError>> = with_workers(config.workers, || {
        ranges
            .par_iter()
            .map(|&(a, b)| {
                let block = sieve.block(a, b)?;
                let lo = xs.partition_point(|&x| x < a);
                let hi = xs.partition_point(|&x| x < b);
                let mut partials = Vec::with_capacity(hi - lo);
                let mut running = 0i64;
                let mut n = a;
                for &x in &xs[lo..hi] {
                    while n <= x {
                        running += block.value(n) as i64;
                        n += 1;
                    }
                    partials.push((x, running));
                }
                Ok(BlockSummary { sum: block.partial_sum, partials })
            })
            .collect()
    });
    let mut total = 0i64;
    let mut out = Vec::with_capacity(xs.len());
    for s in summaries {
        let s = s?;
        out.extend(s.partials.iter().map(|&(x, p)| (x, total + p)));
        total += s.sum;
    }
    Ok(SummatorySeries { func: sieve.func(), checkpoints: out, x_max })
}

/// Number of `n <= x_max` with `ξ(n) = λ(n)`, i.e. `ω(n) ≡ Ω(n) (mod 2)`,
/// from two simultaneous sieves.
pub fn parity_agreement(x_max: u64, config: &SieveConfig) -> Result<u64, SieveError> {
    let n = config.effective_table(x_max)?;
    let xi = Sieve::new(SieveFunc::Xi, n, x_max, config.memory_cap)?;
    let la = Sieve::new(SieveFunc::Lambda, n, x_max, config.memory_cap)?;
    let ranges = block_ranges(x_max, config.block_size.max(30));
    let counts: Vec<Result<u64, SieveError>> = with_workers(config.workers, || {
        ranges
            .par_iter()
            .map(|&(a, b)| {
                let x = xi.block(a, b)?;
                let l = la.block(a, b)?;
                Ok((0..(b - a) as usize).filter(|&i| x.values.get(i) == l.values.get(i)).count() as u64)
            })
            .collect()
    });
    counts.into_iter().sum()
}

/// Rows `(u, S(x)/√x)` with `u = ln x`.
pub fn normalized_export(series: &SummatorySeries) -> Result<Vec<(f64, f64)>, SieveError> {
    if series.checkpoints.is_empty() {
        return Err(SieveError::Parameter("empty series".into()));
    }
    Ok(series
        .checkpoints
        .iter()
        .map(|&(x, s)| {
            let x = x as f64;
            (x.ln(), s as f64 / x.sqrt())
        })
        .collect())
}

pub fn write_checkpoints_csv<W: Write>(series: &SummatorySeries, w: W) -> Result<(), SieveError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["x", "S"]).map_err(csv_err)?;
    for (x, s) in &series.checkpoints {
        wtr.write_record([x.to_string(), s.to_string()]).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_checkpoints_csv<R: Read>(func: SieveFunc, r: R) -> Result<SummatorySeries, SieveError> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut checkpoints: Vec<(u64, i64)> = Vec::new();
    for rec in rdr.deserialize::<(u64, i64)>() {
        let (x, s) = rec.map_err(csv_err)?;
        if checkpoints.last().is_some_and(|&(p, _)| p >= x) {
            return Err(SieveError::Format(format!("checkpoint {x} out of order")));
        }
        checkpoints.push((x, s));
    }
    let x_max = checkpoints.last().map_or(0, |c| c.0);
    Ok(SummatorySeries { func, checkpoints, x_max })
}

/// Normalised rows as `u,S_over_sqrt` with shortest round-trip formatting.
pub fn write_normalized_csv<W: Write>(rows: &[(f64, f64)], w: W) -> Result<(), SieveError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["u", "S_over_sqrt"]).map_err(csv_err)?;
    for (u, v) in rows {
        wtr.write_record([u.to_string(), v.to_string()]).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> SieveError {
    SieveError::Format(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::value_bruteforce;

    fn config(block: u64, workers: usize) -> SieveConfig {
        SieveConfig { table_size: 3_000_000, block_size: block, workers, memory_cap: None }
    }

    #[test]
    fn small_identities() {
        let c = config(1000, 1);
        let l40 = summatory(SieveFunc::Lambda, 40, &Checkpoints::Stride(1), &c).unwrap();
        for x in [2, 4, 10, 16, 40] {
            assert_eq!(l40.at(x), Some(0), "L({x})");
        }
        let m = summatory(SieveFunc::Mu, 4, &Checkpoints::Stride(1), &c).unwrap();
        assert_eq!(m.last(), Some((4, -1)));
    }

    #[test]
    fn checkpoints_agree_with_bruteforce() {
        for func in [SieveFunc::Xi, SieveFunc::Lambda, SieveFunc::Mu] {
            let s = summatory(func, 5000, &Checkpoints::Stride(7), &config(300, 2)).unwrap();
            let mut acc = 0i64;
            let mut it = s.checkpoints.iter();
            let mut next = it.next();
            for n in 1..=5000u64 {
                acc += value_bruteforce(func, n) as i64;
                if let Some(&(x, v)) = next {
                    if x == n {
                        assert_eq!(v, acc, "{func} at {n}");
                        next = it.next();
                    }
                }
            }
            assert!(next.is_none());
        }
    }

    #[test]
    fn block_size_independence() {
        let a = summatory(SieveFunc::Xi, 200_000, &Checkpoints::default(), &config(1000, 1)).unwrap();
        let b = summatory(SieveFunc::Xi, 200_000, &Checkpoints::default(), &config(100_000, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn geometric_positions() {
        let xs = checkpoint_positions(&Checkpoints::Geometric(2.0), 100).unwrap();
        assert_eq!(xs, vec![1, 2, 4, 8, 16, 32, 64, 100]);
        assert!(checkpoint_positions(&Checkpoints::Stride(0), 10).is_err());
    }

    #[test]
    fn normalized_rows() {
        let s = SummatorySeries { func: SieveFunc::Xi, checkpoints: vec![(1, 1), (100, -5)], x_max: 100 };
        let rows = normalized_export(&s).unwrap();
        assert_eq!(rows[0], (0.0, 1.0));
        assert!((rows[1].1 + 0.5).abs() < 1e-15);
        let mut buf = Vec::new();
        write_checkpoints_csv(&s, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "x,S\n1,1\n100,-5\n");
        assert_eq!(read_checkpoints_csv(SieveFunc::Xi, &buf[..]).unwrap(), s);
    }

    #[test]
    fn agreement_count_small() {
        let count = parity_agreement(10_000, &config(999, 2)).unwrap();
        let brute = (1..=10_000u64)
            .filter(|&n| value_bruteforce(SieveFunc::Xi, n) == value_bruteforce(SieveFunc::Lambda, n))
            .count() as u64;
        assert_eq!(count, brute);
    }
}
