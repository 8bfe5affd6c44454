//! Bands recorded by a pilot run on seeds disjoint from every default seed
//! range. Regenerate with `cargo run --release -p rmf-lab --example pilot_bands`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::commands::{ladder_windows, lower_probe_statistics, simulate_checkpoints, simulate_traces};
use crate::arith::SieveConfig;
use crate::error::Result;
use crate::euler::chaos_moment_probe;
use crate::sampler::{Model, SignOracle};
use crate::stats::quantile_sorted;

/// Pilot seeds are PILOT_SEED_BASE + i.
pub const PILOT_SEED_BASE: u64 = 0x9e37_79b9_0000_0000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChaosPilot {
    pub q: f64,
    pub sigma: f64,
    pub y_ladder: Vec<f64>,
    pub samples: usize,
    pub ratios: Vec<f64>,
    pub widen: f64,
    /// [min ratio / widen, max ratio · widen].
    pub band: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerProbePilot {
    pub lambda: f64,
    pub x_max: f64,
    pub seeds: usize,
    pub quantile: f64,
    /// The `quantile` level of the statistic over all (seed, window) pairs.
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatePilot {
    pub x_max: f64,
    pub test_gamma: f64,
    pub seeds: usize,
    pub max_mf: f64,
    pub max_restricted: f64,
    pub widen: f64,
    pub envelope_mf: f64,
    pub envelope_restricted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PilotBands {
    pub seed_base: u64,
    pub chaos: ChaosPilot,
    pub lower_probe: LowerProbePilot,
    pub simulate: SimulatePilot,
}

static SHIPPED: OnceLock<PilotBands> = OnceLock::new();

pub fn shipped() -> &'static PilotBands {
    SHIPPED.get_or_init(|| {
        serde_json::from_str(include_str!("../../data/pilot_bands.json")).expect("shipped pilot_bands.json parses")
    })
}

fn pilot_models(n: usize) -> Vec<SignOracle> {
    (0..n as u64).map(|i| SignOracle::new(PILOT_SEED_BASE + i, Model::Rademacher)).collect()
}

pub fn generate_pilot() -> Result<PilotBands> {
    let sieve = SieveConfig::default();

    let (q, sigma, y_ladder, samples, widen) = (2.0 / 3.0, 0.0, vec![1e2, 1e3, 1e4], 2000, 1.25);
    let rows = chaos_moment_probe(&y_ladder, q, sigma, samples, PILOT_SEED_BASE)?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let chaos = ChaosPilot { q, sigma, y_ladder, samples, ratios, widen, band: (lo / widen, hi * widen) };

    let (lambda, x_max, seeds, quantile) = (1.2, 1e6, 200, 0.01);
    let (_, wins, _) = ladder_windows(lambda, None, x_max, x_max)?;
    let stats = lower_probe_statistics(&pilot_models(seeds), &wins, &sieve)?;
    let mut all: Vec<f64> = stats.iter().flatten().map(|&(_, s)| s).collect();
    all.sort_by(f64::total_cmp);
    let lower_probe = LowerProbePilot { lambda, x_max, seeds, quantile, threshold: quantile_sorted(&all, quantile) };

    let (x_max, test_gamma, seeds, widen) = (1e6, 0.5, 100, 1.5);
    let cps = simulate_checkpoints(test_gamma, x_max)?;
    let traces = simulate_traces(&pilot_models(seeds), x_max, &cps, &sieve)?;
    let max_mf = traces.iter().flat_map(|t| t.stat_mf.iter().copied()).fold(0.0, f64::max);
    let max_restricted = traces.iter().flat_map(|t| t.stat_restricted.iter().copied()).fold(0.0, f64::max);
    let simulate = SimulatePilot {
        x_max,
        test_gamma,
        seeds,
        max_mf,
        max_restricted,
        widen,
        envelope_mf: max_mf * widen,
        envelope_restricted: max_restricted * widen,
    };

    Ok(PilotBands { seed_base: PILOT_SEED_BASE, chaos, lower_probe, simulate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_bands_are_sane() {
        let p = shipped();
        assert_eq!(p.seed_base, PILOT_SEED_BASE);
        assert_eq!(p.chaos.ratios.len(), p.chaos.y_ladder.len());
        assert!(p.chaos.band.0 > 0.0 && p.chaos.band.0 < p.chaos.band.1);
        assert!(p.lower_probe.threshold > 0.0);
        assert!(p.simulate.envelope_mf > p.simulate.max_mf);
    }
}
