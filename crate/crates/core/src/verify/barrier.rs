use rayon::prelude::*;
use serde::Serialize;

use super::{Verdict, VerdictClass};
use crate::error::{LabError, Result};
use crate::euler::{increment_window, ComplexShift, EulerWindow};
use crate::sampler::{Model, RandomModel, SignOracle};
use crate::stats::Neumaier;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BarrierConfig {
    pub log_y0: f64,
    pub t: f64,
    pub sigma: f64,
    /// The integer B in D = ⌈log(1/|t|)⌉ + B + 1.
    pub b: u32,
    pub c: f64,
    pub q: f64,
}

impl BarrierConfig {
    /// log y0 = e^4, so log log y0 = 4 and exactly one increment constraint exists.
    pub fn toy() -> Self {
        Self { log_y0: 4f64.exp(), t: 0.5, sigma: 0.0, b: 0, c: 1.0, q: 2.0 / 3.0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.log_y0 > 1.0) || !self.log_y0.is_finite() {
            return Err(LabError::InvalidArgument(format!("log y0 = {} must exceed 1", self.log_y0)));
        }
        if !(self.t != 0.0 && self.t.is_finite()) {
            return Err(LabError::InvalidArgument("t must be nonzero and finite".into()));
        }
        if !(self.q >= 0.0 && self.q < 1.0) {
            return Err(LabError::InvalidArgument(format!("q = {} must lie in [0, 1)", self.q)));
        }
        if !(self.c >= 0.0) {
            return Err(LabError::InvalidArgument(format!("C = {} must be >= 0", self.c)));
        }
        Ok(())
    }

    /// log log y0.
    pub fn ll(&self) -> f64 {
        self.log_y0.ln()
    }

    pub fn d(&self) -> i64 {
        (1.0 / self.t.abs()).ln().ceil() as i64 + self.b as i64 + 1
    }

    /// The top index ⌊log log y0⌋ − D − 1.
    pub fn m_top(&self) -> i64 {
        self.ll().floor() as i64 - self.d() - 1
    }

    /// C·min{√(log log y0), 1/(1−q)}.
    pub fn corridor(&self) -> f64 {
        self.c * self.ll().sqrt().min(1.0 / (1.0 - self.q))
    }

    /// exp(−2C·min{√(log log y0), 1/(1−q)}).
    pub fn failure_bound(&self) -> f64 {
        (-2.0 * self.corridor()).exp()
    }

    /// t(j) for j = 0..=m_top, rounding down onto the grid n/(e^{-(j+1)} log y0 · (log log y0 − j − 1)).
    pub fn shifted_points(&self) -> Vec<f64> {
        let l = self.ll();
        let mut prev = self.t;
        (0..=self.m_top().max(0))
            .map(|j| {
                let j1 = j as f64 + 1.0;
                let d = (-j1).exp() * self.log_y0 * (l - j1);
                prev = (prev * d).floor() / d;
                prev
            })
            .collect()
    }

    /// log of (log y0/e^{j+1})·e^{g(j, y0)}.
    pub fn bound(&self, j: i64) -> f64 {
        let r = self.ll() - (j as f64 + 1.0);
        r + self.corridor() + 2.0 * r.ln()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarrierEvent {
    pub holds: bool,
    /// min_j (bound_j − |S_j|); nonnegative iff the event holds.
    pub margin: f64,
    /// S_j = Σ_{m=j}^{top} log|I_m(1/2+σ+it(m))| for j = 1..=top.
    pub sums: Vec<f64>,
}

struct Prepared {
    windows: Vec<EulerWindow>,
    shifts: Vec<ComplexShift>,
    bounds: Vec<f64>,
}

fn prepare(cfg: &BarrierConfig) -> Result<Prepared> {
    cfg.validate()?;
    let top = cfg.m_top();
    if top < 1 {
        return Err(LabError::Degenerate(format!(
            "floor(log log y0) - D - 1 = {top} < 1 (log log y0 = {:.4}, D = {}); no constraint to evaluate",
            cfg.ll(),
            cfg.d()
        )));
    }
    let ts = cfg.shifted_points();
    let mut windows = Vec::new();
    let mut shifts = Vec::new();
    let mut bounds = Vec::new();
    for m in 1..=top {
        windows.push(EulerWindow::new(&increment_window(cfg.log_y0, m as u32)?));
        shifts.push(ComplexShift::new(cfg.sigma, ts[m as usize])?);
        bounds.push(cfg.bound(m));
    }
    Ok(Prepared { windows, shifts, bounds })
}

fn evaluate<M: RandomModel + ?Sized>(p: &Prepared, o: &M) -> BarrierEvent {
    let logs: Vec<f64> = p.windows.iter().zip(&p.shifts).map(|(w, &s)| w.log_product(o, s).re).collect();
    let mut sums = vec![0.0; logs.len()];
    let mut acc = Neumaier::new();
    for i in (0..logs.len()).rev() {
        acc.add(logs[i]);
        sums[i] = acc.value();
    }
    let margin = sums.iter().zip(&p.bounds).map(|(s, b)| b - s.abs()).fold(f64::INFINITY, f64::min);
    BarrierEvent { holds: margin >= 0.0, margin, sums }
}

/// Every j-constraint of the two-sided corridor on the increment products.
pub fn barrier_event_eval<M: RandomModel + ?Sized>(o: &M, cfg: &BarrierConfig) -> Result<BarrierEvent> {
    Ok(evaluate(&prepare(cfg)?, o))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarrierRow {
    pub seed: u64,
    pub margin: f64,
    pub tilt_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarrierProbe {
    pub config: BarrierConfig,
    pub seeds: usize,
    pub plain_failure: f64,
    /// Failure frequency under the tilted measure (self-normalized weights).
    pub tilted_failure: f64,
    pub tilted_se: f64,
    pub bound: f64,
    pub slack: f64,
    pub rows: Vec<BarrierRow>,
}

impl BarrierProbe {
    pub fn verdict(&self) -> Verdict {
        let rhs = self.bound * self.slack;
        let failing: Vec<String> =
            self.rows.iter().filter(|r| r.margin < 0.0).take(8).map(|r| r.seed.to_string()).collect();
        Verdict::new("barrier-failure", VerdictClass::Band, self.tilted_failure, rhs, 3.0 * self.tilted_se, self.tilted_failure <= rhs + 3.0 * self.tilted_se)
            .with_diagnostics(format!(
                "log y0={:.4} t={} B={} C={} q={:.4} seeds={} plain={:.5} tilted={:.5}±{:.1e} bound={:.5e} slack={} failing=[{}]",
                self.config.log_y0,
                self.config.t,
                self.config.b,
                self.config.c,
                self.config.q,
                self.seeds,
                self.plain_failure,
                self.tilted_failure,
                self.tilted_se,
                self.bound,
                self.slack,
                failing.join(",")
            ))
    }
}

/// Failure frequency of the corridor event across seeds, plain and under the
/// tilt ∏|1 + f(p)p^{-1/2-σ-it}|² / E(·).
///
/// The tilt runs over primes in (e^{1/|T|}, y0^{1/e}], T the largest 2^n/log y0
/// below |t|. Primes outside the event's windows are independent of the event
/// and cancel between numerator and normalizer, so only the overlap is weighted.
pub fn barrier_failure_probe(cfg: &BarrierConfig, seed_base: u64, seeds: usize, slack: f64) -> Result<BarrierProbe> {
    if seeds == 0 {
        return Err(LabError::Underpowered("no seeds".into()));
    }
    let prep = prepare(cfg)?;
    let n = ((cfg.t.abs() * cfg.log_y0).log2().ceil() - 1.0) as i32;
    let t_dyadic = 2f64.powi(n) / cfg.log_y0;
    let (lo, hi) = (1.0 / t_dyadic, cfg.log_y0 / std::f64::consts::E);
    let tilt: Vec<(u64, f64)> = prep
        .windows
        .iter()
        .flat_map(|w| w.primes.iter().copied())
        .filter(|&p| {
            let lp = (p as f64).ln();
            lp > lo && lp <= hi
        })
        .map(|p| (p, (-(0.5 + cfg.sigma) * (p as f64).ln()).exp()))
        .collect();
    let rows: Vec<BarrierRow> = (0..seeds as u64)
        .into_par_iter()
        .map(|i| {
            let o = SignOracle::new(seed_base.wrapping_add(i), Model::Rademacher);
            let ev = evaluate(&prep, &o);
            let mut lw = Neumaier::new();
            for &(p, a) in &tilt {
                let th = cfg.t * (p as f64).ln();
                let e = o.sign(p) as f64;
                lw.add((2.0 * e * a * th.cos() + a * a).ln_1p() - (a * a).ln_1p());
            }
            BarrierRow { seed: seed_base.wrapping_add(i), margin: ev.margin, tilt_weight: lw.value().exp() }
        })
        .collect();
    let fails = rows.iter().filter(|r| r.margin < 0.0).count();
    let wsum = Neumaier::from_iter(rows.iter().map(|r| r.tilt_weight)).value();
    let wfail = Neumaier::from_iter(rows.iter().filter(|r| r.margin < 0.0).map(|r| r.tilt_weight)).value();
    let p_t = wfail / wsum;
    let var = Neumaier::from_iter(
        rows.iter().map(|r| (r.tilt_weight * ((r.margin < 0.0) as u8 as f64 - p_t)).powi(2)),
    )
    .value();
    Ok(BarrierProbe {
        config: *cfg,
        seeds,
        plain_failure: fails as f64 / seeds as f64,
        tilted_failure: p_t,
        tilted_se: var.sqrt() / wsum,
        bound: cfg.failure_bound(),
        slack,
        rows,
    })
}
