//! One bit per integer prime to 30: byte `q` holds `n = 30q + r` for
//! `r ∈ {1, 7, 11, 13, 17, 19, 23, 29}` at bits 0..8; a set bit means −1.

use std::io::{Read, Write};
use std::path::Path;

use super::block::{sieve_block_with_primes, STATE_MINUS};
use super::{SieveError, SieveFunc};
use crate::primes::{isqrt, primes_up_to};

pub(crate) const RESIDUES: [u64; 8] = [1, 7, 11, 13, 17, 19, 23, 29];

/// Bit position of each residue mod 30, or `u8::MAX` when not prime to 30.
pub(crate) const BIT_OF: [u8; 30] = {
    let mut t = [u8::MAX; 30];
    let mut i = 0;
    while i < 8 {
        t[RESIDUES[i] as usize] = i as u8;
        i += 1;
    }
    t
};

const MAGIC: &[u8; 8] = b"OMGXTBL\0";
const FORMAT_VERSION: u32 = 1;

/// Tabulated ξ or λ on `[1, limit)` restricted to integers prime to 30.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiTable {
    limit: u64,
    func: SieveFunc,
    bits: Vec<u8>,
}

impl XiTable {
    /// The one-byte table for `[1, 30)`: 1 is +1, the seven primes are −1.
    pub fn seed(func: SieveFunc) -> Result<Self, SieveError> {
        if func == SieveFunc::Mu {
            return Err(SieveError::TableFunc(func));
        }
        Ok(XiTable { limit: 30, func, bits: vec![0xFE] })
    }

    /// Builds the table up to `limit` by repeated doubling from the seed.
    /// `memory_cap` bounds `limit/30` bytes.
    pub fn build(limit: u64, func: SieveFunc, memory_cap: Option<u64>) -> Result<Self, SieveError> {
        if limit < 30 || limit % 30 != 0 {
            return Err(SieveError::TableLimit(limit));
        }
        if let Some(cap) = memory_cap {
            if limit / 30 > cap {
                return Err(SieveError::MemoryCap { bytes: limit / 30, cap });
            }
        }
        let mut table = Self::seed(func)?;
        let primes = primes_up_to(isqrt(limit) + 1);
        table.bits.reserve((limit / 30) as usize - 1);
        while table.limit < limit {
            let next = (2 * table.limit).min(limit);
            let block = sieve_block_with_primes(table.limit, next, &table, &primes, func)?;
            for q in table.limit / 30..next / 30 {
                let mut byte = 0u8;
                for (bit, r) in RESIDUES.iter().enumerate() {
                    let n = 30 * q + r;
                    if block.values.state((n - block.a) as usize) == STATE_MINUS {
                        byte |= 1 << bit;
                    }
                }
                table.bits.push(byte);
            }
            table.limit = next;
        }
        Ok(table)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn func(&self) -> SieveFunc {
        self.func
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bits
    }

    /// True when the stored value at `n` is −1. `n` must be prime to 30 and
    /// below the limit.
    #[inline]
    pub fn is_negative(&self, n: u64) -> bool {
        let bit = BIT_OF[(n % 30) as usize];
        debug_assert!(bit != u8::MAX && n < self.limit, "n = {n} not tabulated");
        (self.bits[(n / 30) as usize] >> bit) & 1 == 1
    }

    /// Stored value at `n` (prime to 30), or `None` if not tabulated.
    pub fn value(&self, n: u64) -> Option<i8> {
        if n == 0 || n >= self.limit || BIT_OF[(n % 30) as usize] == u8::MAX {
            return None;
        }
        Some(if self.is_negative(n) { -1 } else { 1 })
    }

    /// Header (magic, version, func, limit) followed by the raw bytes.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), SieveError> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        let tag: u32 = match self.func {
            SieveFunc::Xi => 0,
            _ => 1,
        };
        w.write_all(&tag.to_le_bytes())?;
        w.write_all(&self.limit.to_le_bytes())?;
        w.write_all(&self.bits)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, SieveError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(SieveError::Format("not a table file".into()));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let version = u32::from_le_bytes(word);
        if version != FORMAT_VERSION {
            return Err(SieveError::Format(format!("unsupported version {version}")));
        }
        r.read_exact(&mut word)?;
        let func = match u32::from_le_bytes(word) {
            0 => SieveFunc::Xi,
            1 => SieveFunc::Lambda,
            t => return Err(SieveError::Format(format!("unknown function tag {t}"))),
        };
        let mut long = [0u8; 8];
        r.read_exact(&mut long)?;
        let limit = u64::from_le_bytes(long);
        if limit < 30 || limit % 30 != 0 {
            return Err(SieveError::TableLimit(limit));
        }
        let mut bits = Vec::with_capacity((limit / 30) as usize);
        r.read_to_end(&mut bits)?;
        if bits.len() as u64 != limit / 30 {
            return Err(SieveError::Format(format!("{} bytes for limit {limit}", bits.len())));
        }
        if bits[0] & 1 != 0 {
            return Err(SieveError::Format("entry for n = 1 must be +1".into()));
        }
        Ok(XiTable { limit, func, bits })
    }

    pub fn save(&self, path: &Path) -> Result<(), SieveError> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(f)
    }

    pub fn load(path: &Path) -> Result<Self, SieveError> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
