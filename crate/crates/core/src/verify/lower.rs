use serde::Serialize;

use super::{Verdict, VerdictClass};
use crate::arith::{is_prime, prime_power_sum_auto, PrimeRange, PrimeSum, DEFAULT_ENUMERATION_CUTOFF};
use crate::error::{LabError, Result};
use crate::quad::GaussLegendre;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrigIntegrals {
    /// ∫_{1/(2L)}^{3/(2L)} cos(t log p) dt
    pub single: f64,
    /// ∫_{1/(2L)}^{3/(2L)} cos(2t log p) dt
    pub double: f64,
}

impl TrigIntegrals {
    pub fn closed_form(p: u64, l: f64) -> Self {
        let lp = (p as f64).ln();
        Self {
            single: 2.0 / lp * (lp / l).cos() * (lp / (2.0 * l)).sin(),
            double: 1.0 / lp * (2.0 * lp / l).cos() * (lp / l).sin(),
        }
    }

    pub fn quadrature(p: u64, l: f64) -> Result<Self> {
        let gl = GaussLegendre::new(16);
        let lp = (p as f64).ln();
        let (a, b) = (0.5 / l, 1.5 / l);
        let tol = 1e-15 / l;
        Ok(Self {
            single: gl.adaptive(a, b, tol, 40, |t| (t * lp).cos())?,
            double: gl.adaptive(a, b, tol, 40, |t| (2.0 * t * lp).cos())?,
        })
    }
}

/// Closed forms of the two window integrals of Re p^{-it}, Re p^{-2it} against
/// adaptive quadrature. The gap is measured relative to max(|closed form|, 1/L),
/// 1/L being the window length.
pub fn lower_bound_trig_check(p: u64, l: f64) -> Result<Verdict> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(LabError::InvalidArgument(format!("L = {l} must be positive")));
    }
    if !is_prime(p) {
        return Err(LabError::Domain(format!("{p} is not prime")));
    }
    let c = TrigIntegrals::closed_form(p, l);
    let q = TrigIntegrals::quadrature(p, l)?;
    let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(1.0 / l);
    let gap = rel(c.single, q.single).max(rel(c.double, q.double));
    let tol = 1e-10;
    Ok(Verdict::new(format!("trig-window-p{p}"), VerdictClass::IdentityExact, gap, 0.0, tol, gap <= tol).with_diagnostics(
        format!("L={l} closed=({:.15e}, {:.15e}) quad=({:.15e}, {:.15e})", c.single, c.double, q.single, q.double),
    ))
}

/// max over the grid of |2cos²x − cos 2x − 1|.
pub fn trig_identity_check(grid: &[f64]) -> Verdict {
    let worst = grid.iter().map(|&x| (2.0 * x.cos().powi(2) - (2.0 * x).cos() - 1.0).abs()).fold(0.0, f64::max);
    let tol = 1e-14;
    Verdict::new("trig-identity", VerdictClass::IdentityExact, worst, 0.0, tol, worst <= tol)
        .with_diagnostics(format!("{} grid points", grid.len()))
}

/// Σ_{p≤T} p^{-1-2σ}, exact below the enumeration cutoff and analytic above.
pub fn deterministic_term(t_log: f64, sigma: f64) -> Result<PrimeSum> {
    if !(t_log > 1.0) || !t_log.is_finite() {
        return Err(LabError::InvalidArgument(format!("log T = {t_log} must exceed 1")));
    }
    prime_power_sum_auto(&PrimeRange::new(1.0, t_log.exp())?, sigma, DEFAULT_ENUMERATION_CUTOFF)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MERTENS: f64 = 0.261_497_212_847_642_8;

    #[test]
    fn trig_p2() {
        let v = lower_bound_trig_check(2, 10.0).unwrap();
        assert!(v.pass, "{}", v.summary());
        for p in [3u64, 101, 7919, 1_000_003] {
            for l in [0.5, 3.0, 1e3] {
                assert!(lower_bound_trig_check(p, l).unwrap().pass);
            }
        }
    }

    #[test]
    fn small_angle() {
        let l = 1e6;
        let c = TrigIntegrals::closed_form(2, l);
        assert!((c.single * l - 1.0).abs() < 1e-10);
        assert!((c.double * l - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_grid() {
        let grid: Vec<f64> = (-500..=500).map(|i| i as f64 * 0.0137).collect();
        assert!(trig_identity_check(&grid).pass);
    }

    #[test]
    fn mertens_gap() {
        let v = deterministic_term(1e6f64.ln(), 0.0).unwrap();
        assert!((v.value - (1e6f64.ln().ln() + MERTENS)).abs() <= 0.02);
    }

    #[test]
    fn damping_and_monotonicity() {
        let big = deterministic_term(1e4f64.ln(), 20.0).unwrap().value;
        assert!(big <= 2f64.powf(-41.0) * 1229.0);
        let mut prev = 0.0;
        for x in [10.0, 100.0, 1e3, 1e4, 1e5] {
            let v = deterministic_term(f64::ln(x), 0.1).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
    }
}
