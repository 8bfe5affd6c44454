use super::{Verdict, VerdictClass};
use crate::arith::{is_prime, next_prime};
use crate::error::{LabError, Result};
use crate::sampler::{exhaustive_assignments, Model, RandomModel};
use crate::schedules::{supermartingale_a, toy_bucket_primes, ScheduleParams, ToySchedule};
use crate::stats::Neumaier;
use crate::sums::y_process;

const STEP_SLACK: f64 = 1e-12;

/// One step of the |Y| submartingale: flipping f(p) between the two branches
/// Y ± Y'/√p with Y = Y_{q0,q}(z), Y' = Y_{q0,q}(z/p), p the prime after q.
pub fn submartingale_step_y<M: RandomModel>(o: &M, z: f64, q0: u64, q: u64, p: u64) -> Result<Verdict> {
    if !is_prime(q) || !is_prime(p) || next_prime(q) != p {
        return Err(LabError::InvalidArgument(format!("q = {q} and p = {p} must be consecutive primes")));
    }
    if q0 < 2 || q0 > q {
        return Err(LabError::InvalidArgument(format!("need 2 <= q0 <= q (q0 = {q0}, q = {q})")));
    }
    let y = y_process(o, z, q0, q)?;
    let y1 = y_process(o, z / p as f64, q0, q)?;
    let d = y1 / (p as f64).sqrt();
    let lhs = 0.5 * ((y + d).abs() + (y - d).abs());
    let rhs = y.abs();
    Ok(Verdict::new("submartingale-step-y", VerdictClass::IdentityExact, lhs, rhs, STEP_SLACK, lhs >= rhs - STEP_SLACK)
        .with_diagnostics(format!("{} z={z} q0={q0} q={q} p={p} Y={y:.15e} Y'={y1:.15e}", o.label())))
}

/// a(j) ≤ 1 on the llog schedule.
pub fn supermartingale_factor(params: &ScheduleParams, ell: u64, j: u64) -> Result<Verdict> {
    let a = supermartingale_a(params, ell, j)?;
    Ok(Verdict::new("supermartingale-factor", VerdictClass::BoundKnownConstant, a.a, 1.0, 0.0, a.a <= 1.0)
        .with_diagnostics(format!("K={} ell={ell} j={j} log a={:.6e}", params.k, a.log_a)))
}

/// Exact toy-bucket a(j) against brute-force enumeration of all sign patterns.
pub fn supermartingale_factor_toy(s: &ToySchedule, j: u32) -> Result<Verdict> {
    let exact = s.exact_a(j)?;
    let ps = toy_bucket_primes(s, j)?;
    let weights: Vec<f64> = ps.iter().map(|&p| (-(0.5 + s.sigma) * (p as f64).ln()).exp()).collect();
    let all = exhaustive_assignments(&ps, Model::Rademacher)?;
    let mut acc = Neumaier::new();
    for asg in &all {
        let mut g = 1.0;
        for (&p, &w) in ps.iter().zip(&weights) {
            g *= (1.0 + asg.sign(p) as f64 * w).powi(2);
        }
        acc.add(g);
    }
    let enumerated = acc.value() / all.len() as f64 / s.ratio;
    let tol = 1e-9;
    Ok(Verdict::new("supermartingale-factor-toy", VerdictClass::IdentityExact, exact, enumerated, tol, (exact - enumerated).abs() <= tol)
        .with_diagnostics(format!("bucket {j}: {} primes, a(j) = {exact:.12} (a <= 1: {})", ps.len(), exact <= 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{SignAssignment, SignOracle};

    #[test]
    fn hand_checked_instance() {
        let plus = SignAssignment::all_plus(&[2, 3, 5], Model::Rademacher).unwrap();
        let v = submartingale_step_y(&plus, 30.0, 2, 3, 5).unwrap();
        // Y_{2,3}(30) = f(2)/√2 = Y_{2,3}(6): branches 1/√2 ± 1/√10.
        let y = 0.5f64.sqrt();
        assert!((v.rhs - y).abs() < 1e-15);
        assert!((v.lhs - y).abs() < 1e-15);
        assert!(v.pass);
    }

    #[test]
    fn zero_branch_is_equality() {
        let o = SignOracle::new(3, Model::Rademacher);
        // z/p < 2 so Y' = 0
        let v = submartingale_step_y(&o, 10.0, 2, 5, 7).unwrap();
        assert_eq!(v.lhs, v.rhs);
    }

    #[test]
    fn consecutive_required() {
        let o = SignOracle::new(3, Model::Rademacher);
        assert!(matches!(submartingale_step_y(&o, 100.0, 2, 3, 7), Err(LabError::InvalidArgument(_))));
    }

    #[test]
    fn factor_and_toy() {
        assert!(supermartingale_factor(&ScheduleParams::toy(), 30, 1).unwrap().pass);
        let s = ToySchedule::new(100f64.ln(), 1.1, 2, 0.0).unwrap();
        let v = supermartingale_factor_toy(&s, 2).unwrap();
        assert!(v.pass, "{}", v.summary());
    }
}
