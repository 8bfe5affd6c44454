use super::primes::PrimeRange;
use crate::error::{LabError, Result};
use crate::quad::GaussLegendre;
use crate::stats::Neumaier;

/// Above this bound exact prime sums hand over to the analytic form.
pub const DEFAULT_ENUMERATION_CUTOFF: f64 = 1e9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumPath {
    Exact,
    /// Exact up to the cutoff, analytic beyond it.
    Hybrid,
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PrimeSum {
    pub value: f64,
    pub path: SumPath,
}

#[inline]
pub(crate) fn prime_weight(p: u64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        1.0 / p as f64
    } else {
        (-(1.0 + 2.0 * sigma) * (p as f64).ln()).exp()
    }
}

/// Σ_{p ∈ w} p^{-(1+2σ)} by direct enumeration.
pub fn prime_power_sum(w: &PrimeRange, sigma: f64) -> Result<f64> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(LabError::Domain(format!("sigma = {sigma} must be >= 0")));
    }
    if w.hi > DEFAULT_ENUMERATION_CUTOFF {
        return Err(LabError::Resource(format!(
            "window top {} exceeds the enumeration cutoff {DEFAULT_ENUMERATION_CUTOFF}",
            w.hi
        )));
    }
    let mut acc = Neumaier::new();
    w.for_each_prime(|p| acc.add(prime_weight(p, sigma)));
    Ok(acc.value())
}

/// Exact below `cutoff`, analytic above; records which path ran.
pub fn prime_power_sum_auto(w: &PrimeRange, sigma: f64, cutoff: f64) -> Result<PrimeSum> {
    if w.hi <= cutoff {
        let mut acc = Neumaier::new();
        w.for_each_prime(|p| acc.add(prime_weight(p, sigma)));
        return Ok(PrimeSum { value: acc.value(), path: SumPath::Exact });
    }
    if w.lo >= cutoff {
        let value = analytic_prime_power_sum(w.lo.max(2.0).ln(), w.hi.ln(), sigma)?;
        return Ok(PrimeSum { value, path: SumPath::Analytic });
    }
    let mut acc = Neumaier::new();
    PrimeRange::new(w.lo, cutoff)?.for_each_prime(|p| acc.add(prime_weight(p, sigma)));
    acc.add(analytic_prime_power_sum(cutoff.ln(), w.hi.ln(), sigma)?);
    Ok(PrimeSum { value: acc.value(), path: SumPath::Hybrid })
}

/// ∫_{log_lo}^{log_hi} e^{-2σv}/v dv.
///
/// Evaluated as ∫ exp(-2σe^u) du over u = ln v with adaptive Gauss–Legendre;
/// absolute error at most 1e-13·ln(log_hi/log_lo). σ = 0 is the closed form.
pub fn analytic_prime_power_sum(log_lo: f64, log_hi: f64, sigma: f64) -> Result<f64> {
    check_log_bounds(log_lo, log_hi)?;
    let (u0, u1) = (log_lo.ln(), log_hi.ln());
    if u1 <= u0 {
        return Ok(0.0);
    }
    if sigma == 0.0 {
        return Ok(u1 - u0);
    }
    let g = GaussLegendre::new(10);
    let two_sigma = 2.0 * sigma;
    g.adaptive(u0, u1, 1e-13 * (u1 - u0), 50, |u| (-two_sigma * u.exp()).exp())
}

/// The same integral with the bounds given as log2 of log (and σ as log2 σ),
/// for windows whose logarithms overflow f64.
pub fn analytic_prime_power_sum_llog(llog_lo: f64, llog_hi: f64, log2_sigma: f64) -> Result<f64> {
    if llog_hi < llog_lo {
        return Err(LabError::InvalidRange(format!("llog window [{llog_lo}, {llog_hi}]")));
    }
    let ln2 = std::f64::consts::LN_2;
    let g = GaussLegendre::new(10);
    let width = (llog_hi - llog_lo) * ln2;
    let v = g.adaptive(llog_lo, llog_hi, 1e-13 * width.max(f64::MIN_POSITIVE), 50, |l| {
        (-(1.0 + log2_sigma + l).exp2()).exp()
    })?;
    Ok(ln2 * v)
}

/// ln(log_hi/log_lo) minus the analytic prime sum, i.e. ∫ (1 − e^{-2σv})/v dv,
/// computed without cancellation (llog inputs). Always ≥ 0.
pub fn analytic_prime_sum_deficit_llog(llog_lo: f64, llog_hi: f64, log2_sigma: f64) -> Result<f64> {
    if llog_hi < llog_lo {
        return Err(LabError::InvalidRange(format!("llog window [{llog_lo}, {llog_hi}]")));
    }
    if llog_hi == llog_lo {
        return Ok(0.0);
    }
    let ln2 = std::f64::consts::LN_2;
    let g = GaussLegendre::new(10);
    let f = |l: f64| -(-(1.0 + log2_sigma + l).exp2()).exp_m1();
    // The integrand is monotone, so a coarse rule fixes the scale for a relative tolerance.
    let rough = g.composite(llog_lo, llog_hi, 4, f);
    let tol = (1e-13 * rough).max(f64::MIN_POSITIVE);
    Ok(ln2 * g.adaptive(llog_lo, llog_hi, tol, 60, f)?)
}

fn check_log_bounds(log_lo: f64, log_hi: f64) -> Result<()> {
    if !(log_lo > 0.0) {
        return Err(LabError::Domain(format!("log_lo = {log_lo} must be > 0")));
    }
    if log_hi < log_lo {
        return Err(LabError::InvalidRange(format!("({log_lo}, {log_hi})")));
    }
    Ok(())
}
