//! Segmented factor tables.
//!
//! A table covers `[lo, hi)` and stores the full factorization of every
//! entry in compressed-row form: for index `i`, the primes of `lo + i` in
//! increasing order live in `primes[offsets[i]..offsets[i + 1]]` with the
//! matching exponents in `exps`. The smallest prime factor is the first
//! entry of that row. Rows for 0 and 1 are empty.

use rayon::prelude::*;

use super::primes::{isqrt, primes_up_to};
use crate::error::{LabError, Result};

pub const DEFAULT_SEGMENT_LEN: usize = 1 << 22;

/// Values must fit in u32 storage.
pub const SIEVE_CEILING: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SieveConfig {
    /// Maximum number of entries in one table.
    pub segment_len: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self { segment_len: DEFAULT_SEGMENT_LEN }
    }
}

#[derive(Clone, Debug)]
pub struct FactorTable {
    lo: u64,
    hi: u64,
    offsets: Vec<u32>,
    primes: Vec<u32>,
    exps: Vec<u8>,
}

/// Borrowed factorization of one entry.
#[derive(Clone, Copy, Debug)]
pub struct Factors<'a> {
    primes: &'a [u32],
    exps: &'a [u8],
}

impl<'a> Factors<'a> {
    #[inline]
    pub fn primes(&self) -> &'a [u32] {
        self.primes
    }

    #[inline]
    pub fn exponents(&self) -> &'a [u8] {
        self.exps
    }

    #[inline]
    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + 'a {
        self.primes.iter().zip(self.exps).map(|(&p, &a)| (p as u64, a as u32))
    }

    #[inline]
    pub fn omega(&self) -> usize {
        self.primes.len()
    }

    /// Largest prime factor with P(1) = 1.
    #[inline]
    pub fn largest_prime(&self) -> u64 {
        self.primes.last().map_or(1, |&p| p as u64)
    }

    #[inline]
    pub fn is_squarefree(&self) -> bool {
        self.exps.iter().all(|&a| a == 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct FactorProfile {
    pub is_squarefree: bool,
    pub omega: usize,
    pub largest_prime: u64,
}

pub fn build_factor_table(lo: u64, hi: u64) -> Result<FactorTable> {
    FactorTable::build_with(lo, hi, &SieveConfig::default())
}

pub fn factor_profile(n: u64, t: &FactorTable) -> Result<FactorProfile> {
    t.profile(n)
}

impl FactorTable {
    pub fn build_with(lo: u64, hi: u64, cfg: &SieveConfig) -> Result<Self> {
        if hi <= lo {
            return Err(LabError::InvalidRange(format!("factor table [{lo}, {hi})")));
        }
        if hi > SIEVE_CEILING {
            return Err(LabError::Resource(format!(
                "factor table limit {hi} exceeds the sieve ceiling {SIEVE_CEILING}"
            )));
        }
        let len = (hi - lo) as usize;
        if len > cfg.segment_len {
            return Err(LabError::Resource(format!(
                "segment of {len} entries exceeds the cap of {} entries",
                cfg.segment_len
            )));
        }
        let base = primes_up_to(isqrt(hi - 1));

        // Pass 1: count distinct primes and strip the small part of each entry.
        // Multiples start at p, so 0 keeps an empty row.
        let mut rem: Vec<u32> = (lo..hi).map(|n| n as u32).collect();
        let mut counts = vec![0u8; len];
        for &p in &base {
            let p32 = p as u32;
            let mut m = lo.div_ceil(p).max(1) * p;
            while m < hi {
                let i = (m - lo) as usize;
                counts[i] += 1;
                let mut r = rem[i] / p32;
                while r % p32 == 0 {
                    r /= p32;
                }
                rem[i] = r;
                m += p;
            }
        }
        let mut offsets = Vec::with_capacity(len + 1);
        let mut total = 0u32;
        offsets.push(0);
        for i in 0..len {
            if rem[i] > 1 {
                counts[i] += 1;
            }
            total += counts[i] as u32;
            offsets.push(total);
        }

        // Pass 2: fill the rows in increasing prime order.
        let mut primes = vec![0u32; total as usize];
        let mut exps = vec![0u8; total as usize];
        let mut cursor: Vec<u32> = offsets[..len].to_vec();
        for &p in &base {
            let p32 = p as u32;
            let mut m = lo.div_ceil(p).max(1) * p;
            while m < hi {
                let i = (m - lo) as usize;
                let c = cursor[i] as usize;
                let mut r = (m as u32) / p32;
                let mut a = 1u8;
                while r % p32 == 0 {
                    r /= p32;
                    a += 1;
                }
                primes[c] = p32;
                exps[c] = a;
                cursor[i] += 1;
                m += p;
            }
        }
        for i in 0..len {
            if rem[i] > 1 {
                let c = cursor[i] as usize;
                primes[c] = rem[i];
                exps[c] = 1;
            }
        }
        Ok(Self { lo, hi, offsets, primes, exps })
    }

    #[inline]
    pub fn lo(&self) -> u64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> u64 {
        self.hi
    }

    #[inline]
    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        n >= self.lo && n < self.hi
    }

    /// Factorization of the entry at index `i` (that is, of `lo + i`).
    #[inline]
    pub fn factors_at(&self, i: usize) -> Factors<'_> {
        let a = self.offsets[i] as usize;
        let b = self.offsets[i + 1] as usize;
        Factors { primes: &self.primes[a..b], exps: &self.exps[a..b] }
    }

    pub fn factors(&self, n: u64) -> Option<Factors<'_>> {
        self.contains(n).then(|| self.factors_at((n - self.lo) as usize))
    }

    /// Smallest prime factor; sentinels spf(0) = 0 and spf(1) = 1.
    pub fn spf(&self, n: u64) -> Option<u64> {
        let f = self.factors(n)?;
        Some(match f.primes().first() {
            Some(&p) => p as u64,
            None => n,
        })
    }

    pub fn profile(&self, n: u64) -> Result<FactorProfile> {
        if n == 0 {
            return Err(LabError::Domain("factor profile of 0".into()));
        }
        let f = self.factors(n).ok_or_else(|| {
            LabError::InvalidArgument(format!("{n} not covered by [{}, {})", self.lo, self.hi))
        })?;
        Ok(FactorProfile {
            is_squarefree: f.is_squarefree(),
            omega: f.omega(),
            largest_prime: f.largest_prime(),
        })
    }
}

/// Consecutive tables covering `[lo, hi)`, built lazily in order.
pub struct FactorSegments {
    next: u64,
    hi: u64,
    cfg: SieveConfig,
}

impl FactorSegments {
    pub fn new(lo: u64, hi: u64, cfg: SieveConfig) -> Result<Self> {
        if hi <= lo {
            return Err(LabError::InvalidRange(format!("segments [{lo}, {hi})")));
        }
        if hi > SIEVE_CEILING {
            return Err(LabError::Resource(format!(
                "limit {hi} exceeds the sieve ceiling {SIEVE_CEILING}"
            )));
        }
        Ok(Self { next: lo, hi, cfg })
    }

    /// Bounds of every segment, in order.
    pub fn bounds(&self) -> Vec<(u64, u64)> {
        let step = self.cfg.segment_len as u64;
        let mut out = Vec::new();
        let mut a = self.next;
        while a < self.hi {
            let b = (a + step).min(self.hi);
            out.push((a, b));
            a = b;
        }
        out
    }
}

impl Iterator for FactorSegments {
    type Item = Result<FactorTable>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.hi {
            return None;
        }
        let b = (self.next + self.cfg.segment_len as u64).min(self.hi);
        let t = FactorTable::build_with(self.next, b, &self.cfg);
        self.next = b;
        Some(t)
    }
}

/// Build all segments of `[lo, hi)` at once, in parallel.
pub fn build_segments_par(lo: u64, hi: u64, cfg: SieveConfig) -> Result<Vec<FactorTable>> {
    let bounds = FactorSegments::new(lo, hi, cfg)?.bounds();
    bounds.into_par_iter().map(|(a, b)| FactorTable::build_with(a, b, &cfg)).collect()
}
