use rayon::prelude::*;

use super::{Verdict, VerdictClass};
use crate::arith::primes_up_to;
use crate::error::{LabError, Result};
use crate::sampler::{Model, RandomModel, SignOracle};
use crate::stats::{binomial_se, Neumaier};

/// Largest prime a tail probe will enumerate.
pub const TAIL_PRIME_BUDGET: f64 = 1e8;

fn weights(prime_limit: f64, sigma: f64) -> Result<(Vec<u64>, Vec<f64>)> {
    if !(prime_limit >= 2.0) || prime_limit > TAIL_PRIME_BUDGET {
        return Err(LabError::Resource(format!("prime limit {prime_limit} outside [2, {TAIL_PRIME_BUDGET}]")));
    }
    if !(sigma >= 0.0) {
        return Err(LabError::Domain(format!("sigma = {sigma} must be >= 0")));
    }
    let ps = primes_up_to(prime_limit as u64);
    let w = ps.iter().map(|&p| (-(0.5 + sigma) * (p as f64).ln()).exp()).collect();
    Ok((ps, w))
}

/// Per-seed statistic g(f) computed in parallel; the output order is the seed order.
fn per_seed<F>(seed_base: u64, samples: usize, g: F) -> Vec<f64>
where
    F: Fn(&SignOracle) -> f64 + Sync,
{
    (0..samples as u64)
        .into_par_iter()
        .map(|i| g(&SignOracle::new(seed_base.wrapping_add(i), Model::Rademacher)))
        .collect()
}

/// 1/c_N for the Rademacher prime sum up to `prime_limit`.
pub fn chernoff_admissible_max(prime_limit: f64, sigma: f64) -> Result<f64> {
    let (_, w) = weights(prime_limit, sigma)?;
    let s = Neumaier::from_iter(w.iter().map(|a| a * a)).value().sqrt();
    Ok(s / w[0])
}

/// P(Σ_{p≤N} f(p)p^{-1/2-σ} > x·s_N) against exp(−x²/2·(1 − x·c_N/2)).
pub fn chernoff_tail_probe(prime_limit: f64, sigma: f64, x: f64, samples: usize, seed_base: u64) -> Result<Verdict> {
    let (ps, w) = weights(prime_limit, sigma)?;
    let s_n = Neumaier::from_iter(w.iter().map(|a| a * a)).value().sqrt();
    // the largest summand is the one at p = 2
    let c_n = w[0] / s_n;
    if !(x > 0.0 && x < 1.0 / c_n) {
        return Err(LabError::Domain(format!("x = {x} outside (0, 1/c_N) = (0, {:.6})", 1.0 / c_n)));
    }
    if samples == 0 {
        return Err(LabError::Underpowered("no samples".into()));
    }
    let sums = per_seed(seed_base, samples, |o| {
        let mut acc = Neumaier::new();
        for (&p, &a) in ps.iter().zip(&w) {
            acc.add(o.sign(p) as f64 * a);
        }
        acc.value() / s_n
    });
    let hits = sums.iter().filter(|&&z| z > x).count();
    let freq = hits as f64 / samples as f64;
    let se = binomial_se(hits, samples);
    let bound = (-0.5 * x * x * (1.0 - 0.5 * x * c_n)).exp();
    let curve: Vec<String> = [0.5, 1.0, 1.5, 2.0, 2.5]
        .iter()
        .map(|&u| format!("{u}:{:.4}", sums.iter().filter(|&&z| z > u).count() as f64 / samples as f64))
        .collect();
    Ok(Verdict::new("chernoff-tail", VerdictClass::BoundKnownConstant, freq, bound, 3.0 * se, freq <= bound + 3.0 * se)
        .with_diagnostics(format!(
            "N={prime_limit} sigma={sigma} x={x} s_N={s_n:.6} c_N={c_n:.6} samples={samples} seeds={seed_base}.. se={se:.2e} curve[{}]",
            curve.join(" ")
        )))
}

/// Frequency of |F_{e^{1/|T|}}(1/2+σ)| > A|T|^{1/10} against |T|^{0.128},
/// the stated bound with its implied constant taken as 1.
pub fn euler_barrier_probe(seed_base: u64, seeds: usize, t_abs: f64, sigma: f64, a_const: f64) -> Result<Verdict> {
    if !(t_abs > 0.0 && t_abs < 1.0) {
        return Err(LabError::InvalidArgument(format!("|T| = {t_abs} must lie in (0, 1)")));
    }
    if !(a_const > 0.0) {
        return Err(LabError::InvalidArgument(format!("A = {a_const} must be positive")));
    }
    if seeds == 0 {
        return Err(LabError::Underpowered("no seeds".into()));
    }
    let limit = (1.0 / t_abs).exp();
    let (ps, w) = weights(limit, sigma)?;
    let logs = per_seed(seed_base, seeds, |o| {
        let mut acc = Neumaier::new();
        for (&p, &a) in ps.iter().zip(&w) {
            acc.add((o.sign(p) as f64 * a).ln_1p());
        }
        acc.value()
    });
    let threshold = a_const.ln() + 0.1 * t_abs.ln();
    let hit_seeds: Vec<u64> =
        logs.iter().enumerate().filter(|(_, &l)| l > threshold).map(|(i, _)| seed_base.wrapping_add(i as u64)).collect();
    let freq = hit_seeds.len() as f64 / seeds as f64;
    let se = binomial_se(hit_seeds.len(), seeds);
    let bound = (-0.128 * (1.0 / t_abs).ln()).exp();
    let shown: Vec<String> = hit_seeds.iter().take(8).map(|s| s.to_string()).collect();
    Ok(Verdict::new("euler-barrier", VerdictClass::Band, freq, bound, 3.0 * se, freq <= bound + 3.0 * se)
        .with_diagnostics(format!(
            "|T|={t_abs:.6} primes<={limit:.1} sigma={sigma} A={a_const} seeds={seeds} hits={} first-hit-seeds=[{}]",
            hit_seeds.len(),
            shown.join(",")
        )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_x_trivial() {
        let v = chernoff_tail_probe(1e3, 0.0, 1e-3, 2000, 1).unwrap();
        assert!(v.rhs > 0.999 && v.pass);
    }

    #[test]
    fn admissible_interval() {
        let m = chernoff_admissible_max(1e4, 0.0).unwrap();
        assert!(m > 2.0);
        assert!(matches!(chernoff_tail_probe(1e4, 0.0, m + 0.1, 100, 1), Err(LabError::Domain(_))));
        assert!(matches!(chernoff_tail_probe(1e4, 0.0, -1.0, 100, 1), Err(LabError::Domain(_))));
    }

    #[test]
    fn chernoff_moderate() {
        let v = chernoff_tail_probe(1e4, 0.0, 2.0, 20_000, 10).unwrap();
        assert!(v.pass, "{}", v.summary());
    }

    #[test]
    fn barrier_monotone_in_a() {
        let t = 1.0 / 1e4f64.ln();
        let mut prev = 1.0;
        for a in [0.5, 1.0, 2.0, 4.0] {
            let v = euler_barrier_probe(100, 2000, t, 0.0, a).unwrap();
            assert!(v.lhs <= prev);
            prev = v.lhs;
        }
        assert_eq!(euler_barrier_probe(100, 500, t, 0.0, 1e12).unwrap().lhs, 0.0);
    }
}
