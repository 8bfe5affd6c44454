use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{Verdict, VerdictClass};
use crate::error::{LabError, Result};
use crate::stats::binomial_se;

/// Accepted range for estimate / min{a/√n, 1}.
pub const BALLOT_BAND: (f64, f64) = (0.2, 5.0);

pub const MIN_WALKS: usize = 1000;

/// Barrier perturbation h(j).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HTag {
    Zero,
    /// 2 ln j
    TwoLog,
    /// −2 ln j
    NegTwoLog,
}

impl HTag {
    pub fn eval(&self, j: usize) -> f64 {
        match self {
            HTag::Zero => 0.0,
            HTag::TwoLog => 2.0 * (j as f64).ln(),
            HTag::NegTwoLog => -2.0 * (j as f64).ln(),
        }
    }
}

impl std::str::FromStr for HTag {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" | "0" => Ok(HTag::Zero),
            "two-log" => Ok(HTag::TwoLog),
            "neg-two-log" => Ok(HTag::NegTwoLog),
            _ => Err(LabError::Config(format!("unknown h tag {s:?} (zero, two-log, neg-two-log)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceProfile {
    Unit,
    /// Step variances cycle through 1/20, 1, 20.
    Cycling,
}

impl VarianceProfile {
    fn sd(&self, m: usize) -> f64 {
        match self {
            VarianceProfile::Unit => 1.0,
            VarianceProfile::Cycling => [0.05f64.sqrt(), 1.0, 20f64.sqrt()][m % 3],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BallotConfig {
    pub n: usize,
    pub a: f64,
    pub h: HTag,
    pub variance: VarianceProfile,
    pub walks: usize,
    pub seed: u64,
    pub band: (f64, f64),
}

impl BallotConfig {
    pub fn new(n: usize, a: f64, walks: usize, seed: u64) -> Self {
        Self { n, a, h: HTag::Zero, variance: VarianceProfile::Unit, walks, seed, band: BALLOT_BAND }
    }
}

/// Whether walk `w` stays at or below a + h(j) for all j ≤ n. Walk w draws
/// from ChaCha8 stream w of the configured seed.
fn survives(c: &BallotConfig, w: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    rng.set_stream(w);
    let mut s = 0.0;
    for j in 1..=c.n {
        let g: f64 = rng.sample(StandardNormal);
        s += c.variance.sd(j) * g;
        if s > c.a + c.h.eval(j) {
            return false;
        }
    }
    true
}

/// Monte Carlo estimate of P(Σ_{m≤j} G_m ≤ a + h(j) for all j ≤ n), judged
/// against min{a/√n, 1} through the configured band.
pub fn ballot_probe(c: &BallotConfig) -> Result<Verdict> {
    if c.walks < MIN_WALKS {
        return Err(LabError::Underpowered(format!("{} walks; at least {MIN_WALKS} needed", c.walks)));
    }
    if c.n == 0 || !(c.a >= 1.0) {
        return Err(LabError::InvalidArgument(format!("need n >= 1 and a >= 1 (n = {}, a = {})", c.n, c.a)));
    }
    if !(c.band.0 > 0.0 && c.band.0 < c.band.1) {
        return Err(LabError::Config(format!("bad band {:?}", c.band)));
    }
    let hits = (0..c.walks as u64).into_par_iter().filter(|&w| survives(c, w)).count();
    let est = hits as f64 / c.walks as f64;
    let scale = (c.a / (c.n as f64).sqrt()).min(1.0);
    let ratio = est / scale;
    let pass = ratio >= c.band.0 && ratio <= c.band.1;
    Ok(Verdict::new(format!("ballot-n{}-a{}", c.n, c.a), VerdictClass::Band, ratio, 1.0, c.band.1, pass).with_diagnostics(
        format!(
            "estimate={est:.5} se={:.2e} min(a/sqrt n,1)={scale:.5} band=[{}, {}] h={:?} variance={:?} walks={} seed={}",
            binomial_se(hits, c.walks),
            c.band.0,
            c.band.1,
            c.h,
            c.variance,
            c.walks,
            c.seed
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_step() {
        // Φ(10) = 1 − 7.6e-24, so no walk of one step crosses.
        let v = ballot_probe(&BallotConfig::new(1, 10.0, 5000, 1)).unwrap();
        assert_eq!(v.lhs, 1.0);
    }

    #[test]
    fn wide_barrier() {
        let n = 100;
        let v = ballot_probe(&BallotConfig::new(n, 10.0 * (n as f64).sqrt(), 5000, 2)).unwrap();
        assert!(v.lhs >= 0.9);
    }

    #[test]
    fn band_at_small_n() {
        let v = ballot_probe(&BallotConfig::new(100, 1.0, 20_000, 3)).unwrap();
        assert!(v.pass, "{}", v.summary());
    }

    #[test]
    fn deterministic() {
        let c = BallotConfig::new(50, 2.0, 2000, 9);
        assert_eq!(ballot_probe(&c).unwrap(), ballot_probe(&c).unwrap());
    }

    #[test]
    fn underpowered() {
        assert!(matches!(ballot_probe(&BallotConfig::new(10, 1.0, 999, 1)), Err(LabError::Underpowered(_))));
    }
}
