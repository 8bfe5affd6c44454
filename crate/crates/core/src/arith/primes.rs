use crate::error::{LabError, Result};

/// Half-open prime window (lo, hi].
///
/// `lo == hi` is accepted and denotes the empty window.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PrimeRange {
    pub lo: f64,
    pub hi: f64,
}

impl PrimeRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(LabError::InvalidRange(format!("prime window ({lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Integer bounds (a, b) with the window's primes being exactly the primes in (a, b].
    pub fn int_bounds(&self) -> (u64, u64) {
        let a = if self.lo < 0.0 { 0 } else { self.lo.floor() as u64 };
        let b = if self.hi < 0.0 { 0 } else { self.hi.floor() as u64 };
        (a, b.max(a))
    }

    pub fn primes(&self) -> Vec<u64> {
        let (a, b) = self.int_bounds();
        primes_between(a, b)
    }

    pub fn for_each_prime<F: FnMut(u64)>(&self, f: F) {
        let (a, b) = self.int_bounds();
        for_each_prime_between(a, b, f);
    }
}

/// Primes p ≤ n by a plain sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::with_capacity(estimate_pi(n as f64));
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    for (k, &c) in composite.iter().enumerate().skip(2) {
        if !c {
            out.push(k as u64);
        }
    }
    out
}

fn estimate_pi(x: f64) -> usize {
    if x < 10.0 {
        4
    } else {
        (1.3 * x / x.ln()) as usize
    }
}

const SEGMENT: u64 = 1 << 18;

/// Visit every prime p with a < p ≤ b in increasing order.
pub fn for_each_prime_between<F: FnMut(u64)>(a: u64, b: u64, mut f: F) {
    if b <= a || b < 2 {
        return;
    }
    let start = (a + 1).max(2);
    let base = primes_up_to(isqrt(b));
    let mut buf = vec![false; SEGMENT as usize];
    let mut lo = start;
    while lo <= b {
        let hi = (lo + SEGMENT - 1).min(b);
        let len = (hi - lo + 1) as usize;
        buf[..len].fill(false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let first = (lo.div_ceil(p) * p).max(p * p);
            let mut m = first;
            while m <= hi {
                buf[(m - lo) as usize] = true;
                m += p;
            }
        }
        for (k, &c) in buf[..len].iter().enumerate() {
            if !c {
                f(lo + k as u64);
            }
        }
        if hi == u64::MAX {
            break;
        }
        lo = hi + 1;
    }
}

pub fn primes_between(a: u64, b: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime_between(a, b, |p| out.push(p));
    out
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than p.
pub fn next_prime(p: u64) -> u64 {
    let mut q = p + 1;
    while !is_prime(q) {
        q += 1;
    }
    q
}
