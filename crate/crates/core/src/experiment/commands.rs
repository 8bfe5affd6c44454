//! The six commands. Each builds an `ExperimentReport`; `run` wraps them in a
//! worker pool of the configured size and handles output.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{Command, ExperimentConfig};
use super::pilot;
use super::report::{fmt, ExperimentReport, QuantileRow, Table};
use super::suites;
use crate::arith::SieveConfig;
use crate::error::{LabError, Result};
use crate::euler::chaos_moment_probe;
use crate::sampler::{Model, RandomModel, SignOracle};
use crate::schedules::{big_point, j_for, j_star, lower_bound_ladder, schedule_table, Ladder, ScheduleParams};
use crate::stats::report_quantiles;
use crate::sums::{identity_checks, prefix_sums_many, sign_changes_per_decade, window_maxima, Restriction, SumSpec, Weight};
use crate::verify::{Verdict, VerdictClass};

/// Seeds per streaming pass; a partial report is written between chunks.
pub const SEED_CHUNK: usize = 32;

pub const MF_EXPONENT: f64 = 61.0 / 80.0;
pub const RESTRICTED_EXPONENT: f64 = 21.0 / 80.0;

/// Start of the sign-change window, as a power of ten.
pub const SIGN_CHANGE_FROM_DECADE: u32 = 3;

/// Distinct ⌊e^{i^γ}⌋ in [16, x_max]; 16 keeps log log x positive.
pub fn simulate_checkpoints(test_gamma: f64, x_max: f64) -> Result<Vec<f64>> {
    if !(test_gamma > 0.0 && test_gamma <= 1.0) {
        return Err(LabError::InvalidArgument(format!("test gamma {test_gamma} must lie in (0, 1]")));
    }
    let mut out: Vec<f64> = Vec::new();
    let mut i = 1u64;
    loop {
        let x = (i as f64).powf(test_gamma).exp().floor();
        if x > x_max {
            break;
        }
        if x >= 16.0 && out.last() != Some(&x) {
            out.push(x);
        }
        i += 1;
    }
    if out.is_empty() {
        return Err(LabError::InvalidArgument(format!("x_max = {x_max} leaves no checkpoint >= 16")));
    }
    Ok(out)
}

/// Per-seed output of `simulate`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedTrace {
    pub label: String,
    pub mf: Vec<Complex64>,
    pub restricted: Vec<Complex64>,
    pub stat_mf: Vec<f64>,
    pub stat_restricted: Vec<f64>,
    /// `None` for complex models.
    pub sign_changes: Option<Vec<u64>>,
}

pub fn simulate_traces(models: &[SignOracle], x_max: f64, checkpoints: &[f64], sieve: &SieveConfig) -> Result<Vec<SeedTrace>> {
    let mf = prefix_sums_many(models, x_max, checkpoints, SumSpec::m_f(), sieve)?;
    let rough = SumSpec::new(Weight::InverseSqrt, Restriction::Rough)?;
    let restricted = prefix_sums_many(models, x_max, checkpoints, rough, sieve)?;
    let real = models.iter().all(|o| o.model().is_real());
    let changes = if real { Some(sign_changes_per_decade(models, x_max, sieve)?) } else { None };
    let ll: Vec<f64> = checkpoints.iter().map(|x| x.ln().ln()).collect();
    Ok(mf
        .into_iter()
        .zip(restricted)
        .enumerate()
        .map(|(k, (m, r))| SeedTrace {
            label: m.label.clone(),
            stat_mf: m.values.iter().zip(&ll).map(|(v, l)| v.norm() / l.powf(MF_EXPONENT)).collect(),
            stat_restricted: r.values.iter().zip(&ll).map(|(v, l)| v.norm() / l.powf(RESTRICTED_EXPONENT)).collect(),
            mf: m.values,
            restricted: r.values,
            sign_changes: changes.as_ref().map(|c| c[k].clone()),
        })
        .collect())
}

fn oracles(cfg: &ExperimentConfig, range: std::ops::Range<usize>) -> Vec<SignOracle> {
    cfg.seeds.values[range].iter().map(|&s| SignOracle::new(s, cfg.model)).collect()
}

fn sieve(_cfg: &ExperimentConfig) -> SieveConfig {
    SieveConfig::default()
}

/// Runs `step` over seed chunks. Between chunks a partial report is written
/// when an output path is set; the abort hook and mid-run errors also leave a
/// partial report behind.
fn chunked<T, F, B>(cfg: &ExperimentConfig, mut step: F, build: B) -> Result<ExperimentReport>
where
    F: FnMut(std::ops::Range<usize>) -> Result<Vec<T>>,
    B: Fn(&[T], bool) -> Result<ExperimentReport>,
{
    let total = cfg.seeds.values.len();
    let mut done: Vec<T> = Vec::with_capacity(total);
    let mut lo = 0;
    while lo < total {
        let hi = (lo + SEED_CHUNK).min(total).min(cfg.abort_after.filter(|&a| a > lo).unwrap_or(total));
        match step(lo..hi) {
            Ok(v) => done.extend(v),
            Err(e) => {
                let mut r = build(&done, false)?;
                r.warnings.push(format!("stopped after {} of {total} seeds: {e}", done.len()));
                r.write(cfg)?;
                return Err(e);
            }
        }
        lo = hi;
        if lo < total {
            if cfg.abort_after.is_some_and(|a| lo >= a) {
                let mut r = build(&done, false)?;
                r.warnings.push(format!("interrupted after {lo} of {total} seeds"));
                r.write(cfg)?;
                return Err(LabError::Interrupted { completed: lo, total });
            }
            if cfg.out.is_some() {
                build(&done, false)?.write(cfg)?;
            }
        }
    }
    build(&done, true)
}

pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let cps = simulate_checkpoints(cfg.test_gamma, cfg.x_max)?;
    let sv = sieve(cfg);
    chunked(
        cfg,
        |r| simulate_traces(&oracles(cfg, r), cfg.x_max, &cps, &sv),
        |traces, complete| simulate_report(cfg, &cps, traces, complete),
    )
}

fn simulate_report(cfg: &ExperimentConfig, cps: &[f64], traces: &[SeedTrace], complete: bool) -> Result<ExperimentReport> {
    let mut t = Table::new(&[
        "seed", "model", "checkpoint", "m_f_re", "m_f_im", "restricted_re", "restricted_im", "stat_mf", "stat_restricted",
    ]);
    for tr in traces {
        for (k, &x) in cps.iter().enumerate() {
            t.push(vec![
                tr.label.clone(),
                cfg.model.name().into(),
                fmt(x),
                fmt(tr.mf[k].re),
                fmt(tr.mf[k].im),
                fmt(tr.restricted[k].re),
                fmt(tr.restricted[k].im),
                fmt(tr.stat_mf[k]),
                fmt(tr.stat_restricted[k]),
            ]);
        }
    }
    let mut r = ExperimentReport::new(cfg, t);
    r.complete = complete;
    if traces.is_empty() {
        return Ok(r);
    }
    for (k, &x) in cps.iter().enumerate() {
        let a: Vec<f64> = traces.iter().map(|tr| tr.stat_mf[k]).collect();
        let b: Vec<f64> = traces.iter().map(|tr| tr.stat_restricted[k]).collect();
        r.quantiles.push(QuantileRow { statistic: "stat_mf".into(), at: x, values: report_quantiles(&a) });
        r.quantiles.push(QuantileRow { statistic: "stat_restricted".into(), at: x, values: report_quantiles(&b) });
    }

    let all = || traces.iter().flat_map(|tr| tr.stat_mf.iter().chain(&tr.stat_restricted));
    let bad = all().filter(|v| !v.is_finite()).count();
    r.verdicts.push(Verdict::new("simulate-statistics-finite", VerdictClass::IdentityExact, bad as f64, 0.0, 0.0, bad == 0));

    let max_mf = traces.iter().flat_map(|tr| tr.stat_mf.iter().copied()).fold(0.0, f64::max);
    let max_rs = traces.iter().flat_map(|tr| tr.stat_restricted.iter().copied()).fold(0.0, f64::max);
    let env = &pilot::shipped().simulate;
    if cfg.model == Model::Rademacher {
        if cfg.x_max > env.x_max {
            r.warnings.push(format!("envelope was recorded up to x = {}; this run goes to {}", env.x_max, cfg.x_max));
        }
        for (name, v, e) in [("simulate-envelope-mf", max_mf, env.envelope_mf), ("simulate-envelope-restricted", max_rs, env.envelope_restricted)] {
            r.verdicts.push(
                Verdict::new(name, VerdictClass::Band, v, e, 0.0, v <= e)
                    .with_diagnostics(format!("max over {} seeds x {} checkpoints; pilot envelope", traces.len(), cps.len())),
            );
        }
    } else {
        r.warnings.push(format!("no pilot envelope for the {} model", cfg.model));
    }

    if let Some(first) = traces[0].sign_changes.as_ref() {
        let mut sc = Table::new(&["seed", "decade_lo", "decade_hi", "sign_changes"]);
        for tr in traces {
            for (k, c) in tr.sign_changes.as_ref().expect("real model").iter().enumerate() {
                sc.push(vec![tr.label.clone(), fmt(10f64.powi(k as i32)), fmt(10f64.powi(k as i32 + 1)), c.to_string()]);
            }
        }
        r.aux.insert("sign_changes".into(), sc);
        // only decades lying wholly below x_max count
        let full = ((cfg.x_max + 1.0).log10().floor() as usize).min(first.len());
        let lo = SIGN_CHANGE_FROM_DECADE as usize;
        if full > lo {
            let means: Vec<f64> = (lo..full)
                .map(|k| traces.iter().map(|tr| tr.sign_changes.as_ref().expect("real model")[k] as f64).sum::<f64>() / traces.len() as f64)
                .collect();
            let min = means.iter().copied().fold(f64::INFINITY, f64::min);
            r.verdicts.push(
                Verdict::new(format!("sign-changes-per-decade [1e{lo}, 1e{full}]"), VerdictClass::Qualitative, min, 1.0, 0.0, min >= 1.0)
                    .with_diagnostics(format!("mean count per decade over {} seeds: {means:?}", traces.len())),
            );
        } else {
            r.warnings.push(format!("x_max below 1e{} : no whole decade for the sign-change probe", lo + 1));
        }
    } else {
        r.warnings.push("sign changes are counted for real models only".into());
    }
    Ok(r)
}

/// A nonempty ladder window (T_{k-1}, T_k].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderWindow {
    pub k: u32,
    pub lo: f64,
    pub hi: f64,
}

/// Windows of the T_k ladder, explicit rungs or all rungs with T_k ≤ x_max.
/// Windows holding no integer are returned separately for diagnostics.
pub fn ladder_windows(lambda: f64, ladder_k: Option<(u32, u32)>, x_max: f64, ceiling: f64) -> Result<(Ladder, Vec<LadderWindow>, Vec<u32>)> {
    let (k_lo, k_hi) = match ladder_k {
        Some((lo, hi)) => (lo.max(1), hi),
        None => {
            let mut k = 0u32;
            // T_k ≤ x_max ⟺ λ^k ≤ ln ln x_max
            let target = x_max.ln().ln();
            while lambda.powi(k as i32 + 1) <= target {
                k += 1;
            }
            if k == 0 {
                return Err(LabError::InvalidArgument(format!("x_max = {x_max} is below T_1; no ladder window")));
            }
            (1, k)
        }
    };
    let ladder = lower_bound_ladder(lambda, k_lo.saturating_sub(1), k_hi)?;
    let t = |i: usize| ladder.rungs[i].log_t.log_value.map_or(f64::INFINITY, f64::exp);
    let top = t(ladder.rungs.len() - 1);
    if top > ceiling {
        return Err(LabError::Resource(format!("T_{k_hi} = {top:e} exceeds the sieve ceiling {ceiling:e}")));
    }
    let mut wins = Vec::new();
    let mut empty = Vec::new();
    for i in 1..ladder.rungs.len() {
        let (lo, hi) = (t(i - 1), t(i));
        if hi.floor() > lo.floor() {
            wins.push(LadderWindow { k: ladder.rungs[i].k, lo, hi });
        } else {
            empty.push(ladder.rungs[i].k);
        }
    }
    Ok((ladder, wins, empty))
}

/// max |M_f|·√(log log T_k) per seed and window.
pub fn lower_probe_statistics(models: &[SignOracle], wins: &[LadderWindow], sieve: &SieveConfig) -> Result<Vec<Vec<(f64, f64)>>> {
    let spans: Vec<(f64, f64)> = wins.iter().map(|w| (w.lo, w.hi)).collect();
    let maxima = window_maxima(models, &spans, sieve)?;
    Ok(maxima
        .into_iter()
        .map(|row| {
            row.into_iter()
                .zip(wins)
                .map(|(m, w)| {
                    let m = m.expect("nonempty windows only");
                    (m, m * w.hi.ln().ln().sqrt())
                })
                .collect()
        })
        .collect())
}

pub fn cmd_lower_probe(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if !cfg.model.is_real() {
        return Err(LabError::InvalidArgument("lower-probe needs a real-valued model".into()));
    }
    let (ladder, wins, empty) = ladder_windows(cfg.lambda, cfg.ladder_k, cfg.x_max, cfg.sieve_ceiling)?;
    let sv = sieve(cfg);
    let p = &pilot::shipped().lower_probe;
    let c = cfg.threshold.unwrap_or(p.threshold);
    chunked(
        cfg,
        |r| {
            let models = oracles(cfg, r.clone());
            let stats = lower_probe_statistics(&models, &wins, &sv)?;
            Ok(models.iter().map(|o| o.label()).zip(stats).collect::<Vec<_>>())
        },
        |rows, complete| {
            let mut t = Table::new(&["seed", "k", "t_lo", "t_hi", "window_max", "statistic", "exceeds"]);
            let mut above = 0usize;
            let mut total = 0usize;
            for (label, st) in rows {
                for (w, &(m, s)) in wins.iter().zip(st) {
                    let ex = s > c;
                    above += ex as usize;
                    total += 1;
                    t.push(vec![label.clone(), w.k.to_string(), fmt(w.lo), fmt(w.hi), fmt(m), fmt(s), (ex as u8).to_string()]);
                }
            }
            let mut r = ExperimentReport::new(cfg, t);
            r.complete = complete;
            if ladder.lambda_warning {
                r.warnings.push(format!("lambda = {} <= 2: outside the range of the ladder's summability step", cfg.lambda));
            }
            for k in &empty {
                r.warnings.push(format!("window k={k} holds no integer; skipped"));
            }
            if cfg.threshold.is_none() && (cfg.lambda != p.lambda || cfg.x_max != p.x_max || cfg.ladder_k.is_some()) {
                r.warnings.push(format!("pilot threshold was calibrated at lambda = {}, x_max = {}", p.lambda, p.x_max));
            }
            for (i, w) in wins.iter().enumerate() {
                let s: Vec<f64> = rows.iter().map(|(_, st)| st[i].1).collect();
                if !s.is_empty() {
                    r.quantiles.push(QuantileRow { statistic: format!("statistic k={}", w.k), at: w.hi, values: report_quantiles(&s) });
                }
            }
            if total > 0 {
                let frac = above as f64 / total as f64;
                r.verdicts.push(
                    Verdict::new("lower-probe-fraction", VerdictClass::Qualitative, frac, 0.95, 0.0, frac >= 0.95)
                        .with_diagnostics(format!(
                            "{above} of {total} (seed, window) pairs above c = {c}{}",
                            if cfg.threshold.is_none() { " (pilot)" } else { "" }
                        )),
                );
            }
            Ok(r)
        },
    )
}

pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let names = suites::resolve(&cfg.suites)?;
    let base = cfg.seeds.values[0];
    let mut verdicts = Vec::new();
    for n in names {
        for mut v in suites::run_suite(n, cfg.scale, base)? {
            v.name = format!("{n}/{}", v.name);
            verdicts.push(v);
        }
    }
    let mut t = Table::new(&["name", "class", "lhs", "rhs", "tolerance", "pass", "diagnostics"]);
    for v in &verdicts {
        t.push(vec![
            v.name.clone(),
            serde_json::to_value(v.class)?.as_str().unwrap_or_default().to_string(),
            fmt(v.lhs),
            fmt(v.rhs),
            fmt(v.tolerance),
            (v.pass as u8).to_string(),
            v.diagnostics.clone(),
        ]);
    }
    let mut r = ExperimentReport::new(cfg, t);
    r.verdicts = verdicts;
    Ok(r)
}

pub fn schedule_params(cfg: &ExperimentConfig) -> Result<ScheduleParams> {
    ScheduleParams::toy().with_k(cfg.k)?.with_gamma(cfg.gamma)
}

pub fn cmd_schedule(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let params = schedule_params(cfg)?;
    let ells: Vec<u64> = (cfg.ell.0..=cfg.ell.1).collect();
    for &l in &ells {
        params.check_ell(l)?;
    }
    let rows = schedule_table(&params, &ells)?;
    let mut t = Table::new(&["ell", "j", "llog_y", "j_star_flag"]);
    for row in &rows {
        t.push(vec![row.ell.to_string(), row.j.to_string(), fmt(row.llog_y), (row.j_star_flag as u8).to_string()]);
    }
    let mut b = Table::new(&["ell", "j_star", "J"]);
    for &l in &ells {
        b.push(vec![l.to_string(), j_star(&params, l)?.to_string(), j_for(&params, l, big_point(&params, l))?.to_string()]);
    }
    let mut r = ExperimentReport::new(cfg, t);
    r.aux.insert("bounds".into(), b);
    Ok(r)
}

pub fn cmd_chaos_probe(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let rows = chaos_moment_probe(&cfg.y_ladder, cfg.q, cfg.sigma, cfg.samples, cfg.seeds.values[0])?;
    let mut t = Table::new(&["y", "q", "estimate", "stderr", "reference", "ratio"]);
    for r in &rows {
        t.push([r.y, r.q, r.estimate, r.stderr, r.reference, r.ratio].iter().map(|&x| fmt(x)).collect());
    }
    let mut rep = ExperimentReport::new(cfg, t);
    let p = &pilot::shipped().chaos;
    if cfg.q == p.q && cfg.sigma == p.sigma {
        for r in &rows {
            let ok = r.ratio >= p.band.0 && r.ratio <= p.band.1;
            rep.verdicts.push(Verdict::new(format!("chaos-band y={}", r.y), VerdictClass::Band, r.ratio, p.band.0, p.band.1, ok));
        }
    } else {
        rep.warnings.push(format!("no pilot band for q = {}, sigma = {}", cfg.q, cfg.sigma));
    }
    Ok(rep)
}

pub fn cmd_identity_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let x = cfg.x_max;
    let res: Vec<_> = cfg
        .seeds
        .values
        .par_iter()
        .map(|&s| identity_checks(&SignOracle::new(s, Model::CompletelyMult), x))
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["seed", "x", "heur_lhs", "heur_rhs", "heur_rel_gap", "heur2_lhs", "heur2_rhs", "heur2_rel_gap"]);
    for (raw, p) in cfg.seeds.raw.iter().zip(&res) {
        t.push(vec![
            raw.clone(),
            fmt(x),
            fmt(p.heur.lhs),
            fmt(p.heur.rhs),
            fmt(p.heur.relative_gap()),
            fmt(p.heur2.lhs),
            fmt(p.heur2.rhs),
            fmt(p.heur2.relative_gap()),
        ]);
    }
    let worst = res.iter().map(|p| p.heur.relative_gap().max(p.heur2.relative_gap())).fold(0.0, f64::max);
    let mut r = ExperimentReport::new(cfg, t);
    r.verdicts.push(Verdict::new(
        format!("identities x={x}"),
        VerdictClass::IdentityExact,
        worst,
        0.0,
        suites::IDENTITY_TOL,
        worst <= suites::IDENTITY_TOL,
    ));
    Ok(r)
}

/// Builds the report for `cfg.command` inside a pool of `cfg.workers` threads.
pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| LabError::Resource(format!("worker pool: {e}")))?;
    let start = Instant::now();
    let mut r = pool.install(|| match cfg.command {
        Command::Simulate => cmd_simulate(cfg),
        Command::LowerProbe => cmd_lower_probe(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Schedule => cmd_schedule(cfg),
        Command::ChaosProbe => cmd_chaos_probe(cfg),
        Command::IdentityCheck => cmd_identity_check(cfg),
    })?;
    r.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(r)
}

/// `execute`, then write the report; returns it with its exit code.
pub fn run(cfg: &ExperimentConfig) -> Result<(ExperimentReport, i32)> {
    let r = execute(cfg)?;
    r.write(cfg)?;
    let code = r.exit_code();
    Ok((r, code))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sums::prefix_sums;

    fn cfg(cmd: Command, pairs: &[(&str, &str)]) -> ExperimentConfig {
        let p: Vec<(String, String)> = pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        ExperimentConfig::from_pairs(cmd, &p).unwrap()
    }

    #[test]
    fn checkpoints_distinct_and_bounded() {
        let c = simulate_checkpoints(0.5, 1e4).unwrap();
        assert!(c.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(c[0], 16.0);
        assert!(*c.last().unwrap() <= 1e4);
        assert!(simulate_checkpoints(0.5, 15.0).is_err());
    }

    #[test]
    fn simulate_shape() {
        let c = cfg(Command::Simulate, &[("seeds", "3"), ("x-max", "2e4")]);
        let r = cmd_simulate(&c).unwrap();
        let n = simulate_checkpoints(0.5, 2e4).unwrap().len();
        assert_eq!(r.table.rows.len(), 3 * n);
        assert_eq!(r.quantiles.len(), 2 * n);
        assert!(r.complete);
        assert!(r.verdicts.iter().any(|v| v.class == VerdictClass::Qualitative));
    }

    #[test]
    fn abort_leaves_partial_report() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("s.json");
        let c = cfg(
            Command::Simulate,
            &[("seeds", "40"), ("x-max", "1e3"), ("abort-after", "5"), ("format", "json"), ("out", out.to_str().unwrap())],
        );
        let e = cmd_simulate(&c).unwrap_err();
        assert_eq!(e, LabError::Interrupted { completed: 5, total: 40 });
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(v["complete"], false);
        let n = simulate_checkpoints(0.5, 1e3).unwrap().len();
        assert_eq!(v["table"]["rows"].as_array().unwrap().len(), 5 * n);
    }

    #[test]
    fn window_max_dominates_interior_values() {
        let (_, wins, _) = ladder_windows(1.2, None, 1e4, 1e9).unwrap();
        let o = SignOracle::new(7, Model::Rademacher);
        let st = lower_probe_statistics(std::slice::from_ref(&o), &wins, &SieveConfig::default()).unwrap();
        for (w, &(m, _)) in wins.iter().zip(&st[0]) {
            let lo = w.lo.floor() + 1.0;
            let pts: Vec<f64> = (0..5).map(|i| lo + (w.hi.floor() - lo) * i as f64 / 4.0).map(f64::floor).collect();
            let mut pts = pts;
            pts.dedup();
            let s = prefix_sums(&o, w.hi, &pts, SumSpec::m_f()).unwrap();
            for v in s.values {
                assert!(m >= v.re.abs() - 1e-12);
            }
        }
    }

    #[test]
    fn empty_windows_are_skipped() {
        // λ = 1.01 gives rungs closer than one integer near the bottom
        let (_, wins, empty) = ladder_windows(1.01, Some((1, 30)), 1e6, 1e9).unwrap();
        assert!(!empty.is_empty());
        assert!(wins.iter().all(|w| w.hi.floor() > w.lo.floor()));
        let c = cfg(Command::LowerProbe, &[("seeds", "2"), ("lambda", "1.01"), ("ladder-k", "1..30")]);
        let r = cmd_lower_probe(&c).unwrap();
        assert!(r.warnings.iter().any(|w| w.contains("holds no integer")));
    }

    #[test]
    fn ladder_beyond_ceiling() {
        let e = ladder_windows(1.2, Some((1, 8)), 1e6, 1e9).unwrap_err();
        assert!(matches!(e, LabError::Resource(_)));
    }

    #[test]
    fn schedule_matches_scan() {
        let c = cfg(Command::Schedule, &[("K", "2"), ("ell", "5")]);
        let r = cmd_schedule(&c).unwrap();
        assert_eq!(r.table.columns, ["ell", "j", "llog_y", "j_star_flag"]);
        let params = schedule_params(&c).unwrap();
        let x = big_point(&params, 5);
        // J by scanning: the last j whose y_j does not pass X_ℓ
        let mut jj = 0i64;
        while crate::schedules::y_point(&params, 5, jj + 1).unwrap().llog < x.llog {
            jj += 1;
        }
        let last: u64 = r.table.rows.last().unwrap()[1].parse().unwrap();
        assert!((last as i64 - jj).abs() <= 1, "J = {last}, scan {jj}");
        let b = &r.aux["bounds"].rows[0];
        assert_eq!(b[2], last.to_string());
    }

    #[test]
    fn schedule_refuses_small_ell() {
        let c = cfg(Command::Schedule, &[("K", "2"), ("ell", "2")]);
        assert!(matches!(cmd_schedule(&c).unwrap_err(), LabError::Degenerate(_)));
    }

    #[test]
    fn workers_do_not_change_payload() {
        let run = |w: &str| {
            let c = cfg(Command::Simulate, &[("seeds", "6"), ("x-max", "3e3"), ("workers", w), ("format", "json")]);
            execute(&c).unwrap().payload_json().unwrap()
        };
        assert_eq!(run("1"), run("8"));
    }

    #[test]
    fn verify_unknown_suite() {
        let c = cfg(Command::Verify, &[("suites", "nope")]);
        assert!(matches!(cmd_verify(&c).unwrap_err(), LabError::Config(_)));
    }

    #[test]
    fn identity_command() {
        let c = cfg(Command::IdentityCheck, &[("seed", "0x10,3"), ("x-max", "500")]);
        let r = cmd_identity_check(&c).unwrap();
        assert_eq!(r.table.rows[0][0], "0x10");
        assert!(r.verdicts[0].pass);
    }
}
