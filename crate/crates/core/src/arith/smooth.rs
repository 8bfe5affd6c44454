use super::primes::primes_up_to;
use crate::error::{LabError, Result};
use crate::stats::Neumaier;

pub const DEFAULT_SMOOTH_BUDGET: usize = 10_000_000;

/// All n ≤ limit with every prime factor ≤ y, ascending.
pub fn enumerate_smooth(y: f64, limit: f64) -> Result<Vec<u64>> {
    enumerate_smooth_with_budget(y, limit, DEFAULT_SMOOTH_BUDGET)
}

pub fn enumerate_smooth_with_budget(y: f64, limit: f64, budget: usize) -> Result<Vec<u64>> {
    if !(y >= 2.0) || !(limit >= 1.0) || !limit.is_finite() {
        return Err(LabError::InvalidArgument(format!("smooth enumeration needs y >= 2, limit >= 1 (got {y}, {limit})")));
    }
    let lim = limit.floor() as u64;
    let top = if y >= lim as f64 { lim } else { y.floor() as u64 };
    let mut out = vec![1u64];
    for p in primes_up_to(top) {
        let existing = out.len();
        for i in 0..existing {
            let mut m = out[i];
            while let Some(next) = m.checked_mul(p).filter(|&v| v <= lim) {
                out.push(next);
                if out.len() > budget {
                    return Err(LabError::Resource(format!(
                        "more than {budget} {y}-smooth integers below {limit}"
                    )));
                }
                m = next;
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// x^{-δ} ∏_{p≤y} (1 − p^{-(1−δ)})^{-1} with δ = 1/log y.
///
/// For y ≤ e the exponent 1 − δ is not positive, the product diverges and
/// the bound is +∞.
pub fn rankin_tail_bound(x: f64, y: f64) -> Result<f64> {
    if !(x > 1.0) || !(y >= 2.0) {
        return Err(LabError::Domain(format!("rankin bound needs x > 1, y >= 2 (got {x}, {y})")));
    }
    let delta = 1.0 / y.ln();
    let expo = 1.0 - delta;
    if expo <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let mut log_bound = Neumaier::new();
    log_bound.add(-delta * x.ln());
    for p in primes_up_to(y.floor() as u64) {
        let q = (-expo * (p as f64).ln()).exp();
        log_bound.add(-(-q).ln_1p());
    }
    Ok(log_bound.value().exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve::build_factor_table;

    #[test]
    fn hand_lists() {
        assert_eq!(enumerate_smooth(3.0, 20.0).unwrap(), vec![1, 2, 3, 4, 6, 8, 9, 12, 16, 18]);
        assert_eq!(enumerate_smooth(2.0, 10.0).unwrap(), vec![1, 2, 4, 8]);
        assert_eq!(enumerate_smooth(2.5, 1.0).unwrap(), vec![1]);
    }

    #[test]
    fn count_matches_table_scan() {
        let got = enumerate_smooth(100.0, 1e6).unwrap();
        let t = build_factor_table(1, 1_000_001).unwrap();
        let scan: Vec<u64> = (1..=1_000_000u64).filter(|&n| t.factors(n).unwrap().largest_prime() <= 100).collect();
        assert_eq!(got, scan);
    }

    #[test]
    fn budget_overflow_is_a_resource_error() {
        assert!(matches!(enumerate_smooth_with_budget(100.0, 1e6, 100), Err(LabError::Resource(_))));
    }

    fn exact_tail(x: f64, y: f64) -> f64 {
        // Σ_{P(n)≤y} 1/n = ∏ (1 − 1/p)^{-1}; subtract the head.
        let total: f64 = primes_up_to(y as u64).iter().map(|&p| 1.0 / (1.0 - 1.0 / p as f64)).product();
        let head: f64 = enumerate_smooth(y, x).unwrap().iter().map(|&n| 1.0 / n as f64).sum();
        total - head
    }

    #[test]
    fn bound_dominates_exact_tail() {
        let b = rankin_tail_bound(1e3, 20.0).unwrap();
        let t = exact_tail(1e3, 20.0);
        assert!(b >= t, "{b} < {t}");
        assert!(t > 0.0);
    }

    #[test]
    fn bound_decays_in_x() {
        let a = rankin_tail_bound(1e6, 20.0).unwrap();
        let b = rankin_tail_bound(1e30, 20.0).unwrap();
        let c = rankin_tail_bound(1e200, 20.0).unwrap();
        assert!(a > b && b > c && c < 1e-50);
    }

    #[test]
    fn powers_of_two_tail() {
        let t = exact_tail(10.0, 2.0);
        assert!((t - 0.125).abs() < 1e-15);
        // y = 2 lies below e, where the Rankin product diverges.
        assert_eq!(rankin_tail_bound(10.0, 2.0).unwrap(), f64::INFINITY);
    }
}
