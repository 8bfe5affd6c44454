use crate::error::{LabError, Result};

/// Factor n by trial division. Intended for the small arguments of the
/// divisor-function helpers; sieve-backed callers use `tau_k_from_exponents`.
pub fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut a = 0;
            while n % d == 0 {
                n /= d;
                a += 1;
            }
            out.push((d, a));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn binomial(n: u64, r: u64) -> Option<u64> {
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// τ_k from the exponent list of n: ∏ C(a + k − 1, k − 1).
pub fn tau_k_from_exponents<I: IntoIterator<Item = u32>>(exps: I, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(LabError::Domain("tau_k needs k >= 1".into()));
    }
    let mut acc = 1u64;
    for a in exps {
        let c = binomial(a as u64 + k as u64 - 1, k as u64 - 1)
            .ok_or_else(|| LabError::Resource("tau_k overflows u64".into()))?;
        acc = acc.checked_mul(c).ok_or_else(|| LabError::Resource("tau_k overflows u64".into()))?;
    }
    Ok(acc)
}

/// Number of ordered k-tuples of positive integers with product n.
pub fn tau_k(n: u64, k: u32) -> Result<u64> {
    if n == 0 {
        return Err(LabError::Domain("tau_k(0) is undefined".into()));
    }
    tau_k_from_exponents(trial_factor(n).into_iter().map(|(_, a)| a), k)
}
