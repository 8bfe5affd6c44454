use super::{Verdict, VerdictClass};
use crate::arith::{tau_k, trial_factor};
use crate::error::{LabError, Result};
use crate::sampler::{exhaustive_assignments, Model, RandomModel};
use crate::stats::Neumaier;

/// E|Σ a_n f(n)|^{2k} over every sign pattern of the primes in the support,
/// against (Σ |a_n|² τ_{2k−1}(n))^k.
pub fn hypercontractive_check(weights: &[(u64, f64)], k: u32) -> Result<Verdict> {
    if !(1..=3).contains(&k) {
        return Err(LabError::InvalidArgument(format!("k = {k} must be 1, 2 or 3")));
    }
    let mut primes = Vec::new();
    let mut rows = Vec::with_capacity(weights.len());
    for &(n, a) in weights {
        if n == 0 {
            return Err(LabError::InvalidArgument("support starts at n = 1".into()));
        }
        let f = trial_factor(n);
        if f.iter().any(|&(_, e)| e > 1) {
            return Err(LabError::InvalidArgument(format!("{n} is not squarefree")));
        }
        let ps: Vec<u64> = f.iter().map(|&(p, _)| p).collect();
        primes.extend_from_slice(&ps);
        rows.push((n, a, ps));
    }
    primes.sort_unstable();
    primes.dedup();
    let all = exhaustive_assignments(&primes, Model::Rademacher)?;
    let mut moment = Neumaier::new();
    for asg in &all {
        let mut x = Neumaier::new();
        for (_, a, ps) in &rows {
            let s: i8 = ps.iter().map(|&p| asg.sign(p)).product();
            x.add(a * s as f64);
        }
        moment.add(x.value().abs().powi(2 * k as i32));
    }
    let lhs = moment.value() / all.len() as f64;
    let mut base = Neumaier::new();
    for &(n, a, _) in &rows {
        base.add(a * a * tau_k(n, 2 * k - 1)? as f64);
    }
    let rhs = base.value().powi(k as i32);
    let tol = 1e-12;
    let pass = lhs <= rhs * (1.0 + tol);
    Ok(Verdict::new(format!("hypercontractive-k{k}"), VerdictClass::BoundKnownConstant, lhs, rhs, tol, pass)
        .with_diagnostics(format!(
            "{} primes, {} terms, slack rhs/lhs = {:.6}",
            primes.len(),
            rows.len(),
            if lhs > 0.0 { rhs / lhs } else { f64::INFINITY }
        )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv_sqrt() -> Vec<(u64, f64)> {
        [1u64, 2, 3, 5, 6, 7, 10].iter().map(|&n| (n, 1.0 / (n as f64).sqrt())).collect()
    }

    #[test]
    fn k1_is_orthogonality() {
        let v = hypercontractive_check(&inv_sqrt(), 1).unwrap();
        assert!((v.lhs - v.rhs).abs() <= 1e-12 * v.rhs);
        let expect: f64 = [1.0, 0.5, 1.0 / 3.0, 0.2, 1.0 / 6.0, 1.0 / 7.0, 0.1].iter().sum();
        assert!((v.lhs - expect).abs() < 1e-14);
    }

    #[test]
    fn k2_k3_hold() {
        for k in [2, 3] {
            let v = hypercontractive_check(&inv_sqrt(), k).unwrap();
            assert!(v.pass, "{}", v.summary());
            assert!(v.lhs < v.rhs);
        }
    }

    #[test]
    fn single_term() {
        let v = hypercontractive_check(&[(2, 1.0)], 1).unwrap();
        assert_eq!((v.lhs, v.rhs), (1.0, 1.0));
        // τ_5(2) = 5
        let v = hypercontractive_check(&[(2, 1.0)], 3).unwrap();
        assert_eq!((v.lhs, v.rhs), (1.0, 125.0));
    }

    #[test]
    fn rejects_square() {
        assert!(matches!(hypercontractive_check(&[(4, 1.0)], 2), Err(LabError::InvalidArgument(_))));
        assert!(hypercontractive_check(&[(2, 1.0)], 4).is_err());
    }
}
