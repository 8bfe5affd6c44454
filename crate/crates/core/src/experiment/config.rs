//! Flat `key = value` configuration.
//!
//! Grammar: one `key = value` per line; `#` starts a comment; blank lines are
//! ignored; keys are case-sensitive and `_` is read as `-`. Later pairs
//! override earlier ones, so flags applied after a file win.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::arith::SIEVE_CEILING;
use crate::error::{LabError, Result};
use crate::sampler::Model;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    LowerProbe,
    Verify,
    Schedule,
    ChaosProbe,
    IdentityCheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::LowerProbe => "lower-probe",
            Command::Verify => "verify",
            Command::Schedule => "schedule",
            Command::ChaosProbe => "chaos-probe",
            Command::IdentityCheck => "identity-check",
        }
    }
}

impl FromStr for Command {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "simulate" => Command::Simulate,
            "lower-probe" => Command::LowerProbe,
            "verify" => Command::Verify,
            "schedule" => Command::Schedule,
            "chaos-probe" => Command::ChaosProbe,
            "identity-check" => Command::IdentityCheck,
            _ => return Err(LabError::Config(format!("unknown command {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Full runs use the documented default grids; quick runs shrink sample
/// counts for smoke tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Full,
    Quick,
}

/// Decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> Result<u64> {
    let t = s.trim();
    let r = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(&h.replace('_', ""), 16),
        None => t.replace('_', "").parse::<u64>(),
    };
    r.map_err(|_| LabError::Config(format!("bad seed {s:?}")))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedSpec {
    /// As written by the user (or generated as decimal for a count).
    pub raw: Vec<String>,
    pub values: Vec<u64>,
}

impl SeedSpec {
    pub fn list(s: &str) -> Result<Self> {
        let raw: Vec<String> = s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
        let values = raw.iter().map(|x| parse_seed(x)).collect::<Result<Vec<_>>>()?;
        Ok(Self { raw, values })
    }

    pub fn count(base: u64, n: usize) -> Self {
        let values: Vec<u64> = (0..n as u64).map(|i| base.wrapping_add(i)).collect();
        Self { raw: values.iter().map(|v| v.to_string()).collect(), values }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seeds: SeedSpec,
    pub x_max: f64,
    pub model: Model,
    pub gamma: f64,
    /// Exponent for the desk-scale checkpoints ⌊e^{i^γ'}⌋ of `simulate`.
    pub test_gamma: f64,
    pub k: u32,
    pub ell: (u64, u64),
    pub lambda: f64,
    /// Explicit ladder rungs k_lo..k_hi for `lower-probe`; by default every
    /// rung with T_k ≤ x_max.
    pub ladder_k: Option<(u32, u32)>,
    /// Lower-probe threshold c; `None` uses the shipped pilot value.
    pub threshold: Option<f64>,
    pub q: f64,
    pub sigma: f64,
    pub y_ladder: Vec<f64>,
    pub samples: usize,
    pub suites: Vec<String>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub workers: usize,
    pub sieve_ceiling: f64,
    pub scale: Scale,
    /// Stop after this many seeds and write a partial report (testing hook).
    pub abort_after: Option<usize>,
    /// Every key = value pair that was applied, verbatim.
    pub echo: BTreeMap<String, String>,
}

pub const DEFAULT_SIEVE_CEILING: f64 = 1e9;

/// Keys accepted in files and as long flags.
pub const KEYS: &[&str] = &[
    "command", "seed", "seeds", "base-seed", "x-max", "model", "gamma", "test-gamma", "K", "ell", "lambda", "ladder-k", "threshold",
    "q", "sigma", "y-ladder", "samples", "suites", "out", "format", "workers", "sieve-ceiling", "scale", "abort-after",
];

fn num(key: &str, v: &str) -> Result<f64> {
    v.trim().parse::<f64>().map_err(|_| LabError::Config(format!("{key}: {v:?} is not a number")))
}

fn int(key: &str, v: &str) -> Result<u64> {
    let x = num(key, v)?;
    if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
        return Err(LabError::Config(format!("{key}: {v:?} is not a nonnegative integer")));
    }
    Ok(x as u64)
}

/// `a..b` (inclusive) or a single integer.
fn parse_range(key: &str, v: &str) -> Result<(u64, u64)> {
    let (a, b) = match v.split_once("..") {
        Some((a, b)) => (int(key, a)?, int(key, b.trim_start_matches('='))?),
        None => {
            let a = int(key, v)?;
            (a, a)
        }
    };
    if b < a {
        return Err(LabError::Config(format!("{key} range {v:?} is empty")));
    }
    Ok((a, b))
}

/// Parses the file grammar into ordered pairs.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| LabError::Config(format!("line {}: expected key = value", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn normalize(key: &str) -> String {
    if key.eq_ignore_ascii_case("k") {
        "K".into()
    } else {
        key.replace('_', "-")
    }
}

impl ExperimentConfig {
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            seeds: SeedSpec::count(0, 10),
            x_max: 1e6,
            model: Model::Rademacher,
            gamma: 1e-3,
            test_gamma: 0.5,
            k: 2,
            ell: (5, 5),
            lambda: 1.2,
            ladder_k: None,
            threshold: None,
            q: 2.0 / 3.0,
            sigma: 0.0,
            y_ladder: vec![1e2, 1e3, 1e4],
            samples: 1000,
            suites: vec!["all".into()],
            out: None,
            format: Format::Csv,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            sieve_ceiling: DEFAULT_SIEVE_CEILING,
            scale: Scale::Full,
            abort_after: None,
            echo: BTreeMap::new(),
        }
    }

    /// Defaults for `command`, then `pairs` in order.
    pub fn from_pairs(command: Command, pairs: &[(String, String)]) -> Result<Self> {
        let mut c = Self::defaults(command);
        let mut seed_list: Option<String> = None;
        let mut seed_count: Option<String> = None;
        let mut base = 0u64;
        for (k, v) in pairs {
            let key = normalize(k);
            if !KEYS.contains(&key.as_str()) {
                return Err(LabError::Config(format!("unknown key {k:?}")));
            }
            let v = v.trim();
            match key.as_str() {
                "command" => c.command = v.parse()?,
                "seed" => seed_list = Some(v.to_string()),
                "seeds" => seed_count = Some(v.to_string()),
                "base-seed" => base = parse_seed(v)?,
                "x-max" => c.x_max = num(&key, v)?,
                "model" => c.model = v.parse()?,
                "gamma" => c.gamma = num(&key, v)?,
                "test-gamma" => c.test_gamma = num(&key, v)?,
                "K" => c.k = int(&key, v)? as u32,
                "ell" => c.ell = parse_range(&key, v)?,
                "lambda" => c.lambda = num(&key, v)?,
                "ladder-k" => {
                    let (a, b) = parse_range(&key, v)?;
                    c.ladder_k = Some((a as u32, b as u32));
                }
                "threshold" => c.threshold = Some(num(&key, v)?),
                "q" => c.q = num(&key, v)?,
                "sigma" => c.sigma = num(&key, v)?,
                "y-ladder" => c.y_ladder = v.split(',').map(|y| num(&key, y)).collect::<Result<_>>()?,
                "samples" => c.samples = int(&key, v)? as usize,
                "suites" => c.suites = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
                "out" => c.out = Some(PathBuf::from(v)),
                "format" => {
                    c.format = match v {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        _ => return Err(LabError::Config(format!("format {v:?} is not csv or json"))),
                    }
                }
                "workers" => c.workers = int(&key, v)? as usize,
                "sieve-ceiling" => c.sieve_ceiling = num(&key, v)?,
                "scale" => {
                    c.scale = match v {
                        "full" => Scale::Full,
                        "quick" => Scale::Quick,
                        _ => return Err(LabError::Config(format!("scale {v:?} is not full or quick"))),
                    }
                }
                "abort-after" => c.abort_after = Some(int(&key, v)? as usize),
                _ => unreachable!("key list and match agree"),
            }
            c.echo.insert(key, v.to_string());
        }
        match (seed_list, seed_count) {
            (Some(_), Some(_)) => return Err(LabError::Config("give either seed (a list) or seeds (a count)".into())),
            (Some(l), None) => c.seeds = SeedSpec::list(&l)?,
            (None, Some(n)) if n.contains(',') => c.seeds = SeedSpec::list(&n)?,
            (None, Some(n)) => c.seeds = SeedSpec::count(base, int("seeds", &n)? as usize),
            (None, None) => c.seeds = SeedSpec::count(base, 10),
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.values.is_empty() {
            return Err(LabError::Config("the seed list is empty".into()));
        }
        if !(self.sieve_ceiling >= 1.0 && self.sieve_ceiling <= SIEVE_CEILING as f64) {
            return Err(LabError::Config(format!("sieve-ceiling must lie in [1, {SIEVE_CEILING}]")));
        }
        if !(self.x_max >= 1.0) || !self.x_max.is_finite() {
            return Err(LabError::Config(format!("x-max = {} must be >= 1", self.x_max)));
        }
        if self.x_max > self.sieve_ceiling {
            return Err(LabError::Resource(format!("x-max = {} exceeds the sieve ceiling {}", self.x_max, self.sieve_ceiling)));
        }
        if self.workers == 0 {
            return Err(LabError::Config("workers must be >= 1".into()));
        }
        if !(self.test_gamma > 0.0 && self.test_gamma <= 1.0) {
            return Err(LabError::Config(format!("test-gamma = {} must lie in (0, 1]", self.test_gamma)));
        }
        if self.y_ladder.is_empty() {
            return Err(LabError::Config("y-ladder is empty".into()));
        }
        Ok(())
    }
}
