//! Seeded sampling of the three random multiplicative models.
//!
//! Prime values come from a keyed, stateless mixing function of (seed, p),
//! so any evaluation order (and any number of workers) sees the same path.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, FactorTable, Factors};
use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// ±1 on primes, multiplicative on squarefree n, 0 elsewhere.
    Rademacher,
    /// ±1 on primes, completely multiplicative.
    CompletelyMult,
    /// Uniform on the unit circle at primes, completely multiplicative.
    Steinhaus,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Rademacher => "rademacher",
            Model::CompletelyMult => "completely-mult",
            Model::Steinhaus => "steinhaus",
        }
    }

    pub fn is_real(&self) -> bool {
        !matches!(self, Model::Steinhaus)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rademacher" | "rad" => Ok(Model::Rademacher),
            "completely-mult" | "completely-multiplicative" | "cm" | "rademacher-cm" => Ok(Model::CompletelyMult),
            "steinhaus" | "st" => Ok(Model::Steinhaus),
            other => Err(LabError::Config(format!("unknown model `{other}`"))),
        }
    }
}

/// One value of a model: real signs (including 0) or a unit phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Sign(i8),
    Phase(Complex64),
}

impl Value {
    pub fn to_complex(self) -> Complex64 {
        match self {
            Value::Sign(s) => Complex64::new(s as f64, 0.0),
            Value::Phase(z) => z,
        }
    }

    pub fn re(self) -> f64 {
        match self {
            Value::Sign(s) => s as f64,
            Value::Phase(z) => z.re,
        }
    }
}

/// Source of prime values. Implemented by seeded oracles and by the
/// explicit assignments used for exhaustive expectations.
pub trait RandomModel: Sync {
    fn model(&self) -> Model;

    /// The ±1 value at prime p used by the two Rademacher models.
    fn sign(&self, p: u64) -> i8;

    /// The Steinhaus angle at p, in turns (so the value is e^{2πi·turns}).
    fn turns(&self, p: u64) -> f64;

    /// How the path is identified in reports.
    fn label(&self) -> String;

    fn phase(&self, p: u64) -> Complex64 {
        let (s, c) = (std::f64::consts::TAU * self.turns(p)).sin_cos();
        Complex64::new(c, s)
    }
}

impl<T: RandomModel + ?Sized> RandomModel for &T {
    fn model(&self) -> Model {
        (**self).model()
    }
    fn sign(&self, p: u64) -> i8 {
        (**self).sign(p)
    }
    fn turns(&self, p: u64) -> f64 {
        (**self).turns(p)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const SIGN_DOMAIN: u64 = 0x5241_4445_4d41_4348;
const PHASE_DOMAIN: u64 = 0x5354_4549_4e48_4155;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignOracle {
    seed: u64,
    model: Model,
    #[serde(skip)]
    sign_key: u64,
    #[serde(skip)]
    phase_key: u64,
}

impl SignOracle {
    pub fn new(seed: u64, model: Model) -> Self {
        Self {
            seed,
            model,
            sign_key: mix64(seed ^ SIGN_DOMAIN),
            phase_key: mix64(seed.rotate_left(17) ^ PHASE_DOMAIN),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_model(&self, model: Model) -> Self {
        Self::new(self.seed, model)
    }
}

impl RandomModel for SignOracle {
    fn model(&self) -> Model {
        self.model
    }

    #[inline]
    fn sign(&self, p: u64) -> i8 {
        let h = mix64(self.sign_key.wrapping_add(p.wrapping_mul(GOLDEN)));
        1 - 2 * (h >> 63) as i8
    }

    #[inline]
    fn turns(&self, p: u64) -> f64 {
        let h = mix64(self.phase_key.wrapping_add(p.wrapping_mul(GOLDEN)));
        (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn label(&self) -> String {
        self.seed.to_string()
    }
}

/// Explicit signs on a listed set of primes: bit i of `mask` set means the
/// i-th listed prime gets −1. Unlisted primes read as +1; callers that need
/// exact expectations check coverage first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAssignment {
    primes: Vec<u64>,
    mask: u32,
    model: Model,
}

pub const MAX_EXHAUSTIVE_PRIMES: usize = 24;

impl SignAssignment {
    pub fn new(primes: &[u64], mask: u32, model: Model) -> Result<Self> {
        if model == Model::Steinhaus {
            return Err(LabError::InvalidArgument("sign assignments are Rademacher-type only".into()));
        }
        if primes.len() > MAX_EXHAUSTIVE_PRIMES {
            return Err(LabError::Resource(format!(
                "{} primes exceed the exhaustive limit of {MAX_EXHAUSTIVE_PRIMES}",
                primes.len()
            )));
        }
        let mut ps = primes.to_vec();
        ps.sort_unstable();
        ps.dedup();
        if ps.len() != primes.len() {
            return Err(LabError::InvalidArgument("repeated prime in assignment".into()));
        }
        if let Some(&c) = ps.iter().find(|&&p| !is_prime(p)) {
            return Err(LabError::Domain(format!("{c} is not prime")));
        }
        // Bits refer to the caller's order.
        Ok(Self { primes: primes.to_vec(), mask, model })
    }

    pub fn all_plus(primes: &[u64], model: Model) -> Result<Self> {
        Self::new(primes, 0, model)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn covers(&self, p: u64) -> bool {
        self.primes.contains(&p)
    }
}

impl RandomModel for SignAssignment {
    fn model(&self) -> Model {
        self.model
    }

    fn sign(&self, p: u64) -> i8 {
        match self.primes.iter().position(|&q| q == p) {
            Some(i) if self.mask >> i & 1 == 1 => -1,
            _ => 1,
        }
    }

    fn turns(&self, p: u64) -> f64 {
        if self.sign(p) < 0 {
            0.5
        } else {
            0.0
        }
    }

    fn label(&self) -> String {
        format!("mask:{:#x}", self.mask)
    }
}

/// Every one of the 2^m sign assignments of the listed primes.
pub fn exhaustive_assignments(primes: &[u64], model: Model) -> Result<Vec<SignAssignment>> {
    let base = SignAssignment::new(primes, 0, model)?;
    let m = primes.len() as u32;
    Ok((0..1u32 << m).map(|mask| SignAssignment { mask, ..base.clone() }).collect())
}

/// Model value at a prime, with the primality contract checked.
pub fn prime_value<M: RandomModel + ?Sized>(o: &M, p: u64) -> Result<Value> {
    if !is_prime(p) {
        return Err(LabError::Domain(format!("{p} is not prime")));
    }
    Ok(match o.model() {
        Model::Steinhaus => Value::Phase(o.phase(p)),
        _ => Value::Sign(o.sign(p)),
    })
}

/// Value at the integer whose factorization is `f`.
#[inline]
pub(crate) fn value_from_factors<M: RandomModel + ?Sized>(o: &M, f: &Factors<'_>) -> Value {
    match o.model() {
        Model::Rademacher => {
            let mut s = 1i8;
            for (&p, &a) in f.primes().iter().zip(f.exponents()) {
                if a > 1 {
                    return Value::Sign(0);
                }
                s *= o.sign(p as u64);
            }
            Value::Sign(s)
        }
        Model::CompletelyMult => {
            let mut s = 1i8;
            for (&p, &a) in f.primes().iter().zip(f.exponents()) {
                if a & 1 == 1 {
                    s *= o.sign(p as u64);
                }
            }
            Value::Sign(s)
        }
        Model::Steinhaus => {
            let mut turns = 0.0f64;
            for (&p, &a) in f.primes().iter().zip(f.exponents()) {
                turns += a as f64 * o.turns(p as u64);
            }
            let (s, c) = (std::f64::consts::TAU * turns.fract()).sin_cos();
            Value::Phase(Complex64::new(c, s))
        }
    }
}

/// Real value for the Rademacher-type models (f64 for accumulation).
#[inline]
pub(crate) fn sign_from_factors<M: RandomModel + ?Sized>(o: &M, f: &Factors<'_>, squarefree_only: bool) -> i8 {
    let mut s = 1i8;
    for (&p, &a) in f.primes().iter().zip(f.exponents()) {
        if a > 1 && squarefree_only {
            return 0;
        }
        if a & 1 == 1 {
            s *= o.sign(p as u64);
        }
    }
    s
}

pub fn value_at<M: RandomModel + ?Sized>(o: &M, n: u64, t: &FactorTable) -> Result<Value> {
    if n == 0 {
        return Err(LabError::Domain("model values start at n = 1".into()));
    }
    let f = t
        .factors(n)
        .ok_or_else(|| LabError::InvalidArgument(format!("{n} not covered by [{}, {})", t.lo(), t.hi())))?;
    Ok(value_from_factors(o, &f))
}

#[derive(Clone, Debug, PartialEq)]
pub enum ValueBlock {
    Signs(Vec<i8>),
    Phases(Vec<Complex64>),
}

impl ValueBlock {
    pub fn len(&self) -> usize {
        match self {
            ValueBlock::Signs(v) => v.len(),
            ValueBlock::Phases(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> Option<Value> {
        match self {
            ValueBlock::Signs(v) => v.get(i).map(|&s| Value::Sign(s)),
            ValueBlock::Phases(v) => v.get(i).map(|&z| Value::Phase(z)),
        }
    }
}

/// Values on [lo, hi) in one pass over the table rows.
pub fn batch_values<M: RandomModel + ?Sized>(o: &M, lo: u64, hi: u64, t: &FactorTable) -> Result<ValueBlock> {
    if hi < lo {
        return Err(LabError::InvalidRange(format!("[{lo}, {hi})")));
    }
    if lo == hi {
        return Ok(match o.model() {
            Model::Steinhaus => ValueBlock::Phases(Vec::new()),
            _ => ValueBlock::Signs(Vec::new()),
        });
    }
    if lo == 0 {
        return Err(LabError::Domain("model values start at n = 1".into()));
    }
    if lo < t.lo() || hi > t.hi() {
        return Err(LabError::InvalidArgument(format!(
            "[{lo}, {hi}) not covered by [{}, {})",
            t.lo(),
            t.hi()
        )));
    }
    let base = (lo - t.lo()) as usize;
    let len = (hi - lo) as usize;
    Ok(match o.model() {
        Model::Steinhaus => ValueBlock::Phases(
            (0..len).map(|i| value_from_factors(o, &t.factors_at(base + i)).to_complex()).collect(),
        ),
        m => {
            let sq = m == Model::Rademacher;
            ValueBlock::Signs((0..len).map(|i| sign_from_factors(o, &t.factors_at(base + i), sq)).collect())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{build_factor_table, primes_up_to};

    #[test]
    fn deterministic_and_stateless() {
        let o = SignOracle::new(42, Model::Rademacher);
        let a = prime_value(&o, 7919).unwrap();
        let _ = prime_value(&o, 2).unwrap();
        assert_eq!(a, prime_value(&o, 7919).unwrap());
        assert_eq!(SignOracle::new(42, Model::Rademacher).sign(7919), o.sign(7919));
        assert!(matches!(prime_value(&o, 91), Err(LabError::Domain(_))));
    }

    #[test]
    fn balanced_signs() {
        let o = SignOracle::new(7, Model::Rademacher);
        let ps = primes_up_to(104_729);
        assert_eq!(ps.len(), 10_000);
        let plus = ps.iter().filter(|&&p| o.sign(p) == 1).count() as f64 / 1e4;
        assert!((plus - 0.5).abs() <= 3.0 * 0.5 / 100.0, "fraction {plus}");
    }

    #[test]
    fn steinhaus_on_circle() {
        let o = SignOracle::new(3, Model::Steinhaus);
        for p in primes_up_to(2000) {
            match prime_value(&o, p).unwrap() {
                Value::Phase(z) => assert!((z.norm() - 1.0).abs() < 1e-12),
                Value::Sign(_) => panic!("expected a phase"),
            }
        }
    }

    #[test]
    fn small_values_by_hand() {
        let t = build_factor_table(1, 100).unwrap();
        let r = SignOracle::new(11, Model::Rademacher);
        let c = r.with_model(Model::CompletelyMult);
        assert_eq!(value_at(&r, 12, &t).unwrap(), Value::Sign(0));
        assert_eq!(value_at(&c, 12, &t).unwrap(), Value::Sign(c.sign(3)));
        assert_eq!(value_at(&r, 6, &t).unwrap(), Value::Sign(r.sign(2) * r.sign(3)));
        assert_eq!(value_at(&r, 1, &t).unwrap(), Value::Sign(1));
        let s = r.with_model(Model::Steinhaus);
        assert_eq!(value_at(&s, 1, &t).unwrap(), Value::Phase(Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn block_matches_pointwise() {
        let t = build_factor_table(1, 10_000).unwrap();
        for model in [Model::Rademacher, Model::CompletelyMult, Model::Steinhaus] {
            let o = SignOracle::new(99, model);
            let b = batch_values(&o, 2, 10_000, &t).unwrap();
            for n in 2..10_000u64 {
                let v = value_at(&o, n, &t).unwrap();
                let got = b.get((n - 2) as usize).unwrap();
                match (v, got) {
                    (Value::Phase(a), Value::Phase(b)) => assert!((a - b).norm() < 1e-15),
                    (a, b) => assert_eq!(a, b),
                }
            }
            if model == Model::Rademacher {
                for n in 2..10_000u64 {
                    let zero = b.get((n - 2) as usize).unwrap() == Value::Sign(0);
                    assert_eq!(zero, !t.factors(n).unwrap().is_squarefree());
                }
            }
        }
        assert!(batch_values(&SignOracle::new(1, Model::Rademacher), 5, 5, &t).unwrap().is_empty());
    }

    #[test]
    fn rademacher_equals_completely_mult_on_squarefree() {
        let t = build_factor_table(1, 100_001).unwrap();
        for seed in [0u64, 1, 0xdead_beef] {
            let r = SignOracle::new(seed, Model::Rademacher);
            let c = r.with_model(Model::CompletelyMult);
            for n in 1..=100_000u64 {
                if t.factors(n).unwrap().is_squarefree() {
                    assert_eq!(value_at(&r, n, &t).unwrap(), value_at(&c, n, &t).unwrap());
                }
            }
        }
    }

    #[test]
    fn orthogonality_over_all_assignments() {
        let t = build_factor_table(1, 11).unwrap();
        let all = exhaustive_assignments(&[2, 3, 5, 7], Model::Rademacher).unwrap();
        assert_eq!(all.len(), 16);
        let sqf: Vec<u64> = (1..=10).filter(|&n| t.factors(n).unwrap().is_squarefree()).collect();
        for &m in &sqf {
            for &n in &sqf {
                let e: f64 = all
                    .iter()
                    .map(|a| value_at(a, m, &t).unwrap().re() * value_at(a, n, &t).unwrap().re())
                    .sum::<f64>()
                    / 16.0;
                assert_eq!(e, if m == n { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn assignment_validation() {
        assert!(SignAssignment::new(&[2, 4], 0, Model::Rademacher).is_err());
        assert!(SignAssignment::new(&[2, 2], 0, Model::Rademacher).is_err());
        let many = primes_up_to(100);
        assert!(matches!(SignAssignment::new(&many, 0, Model::Rademacher), Err(LabError::Resource(_))));
        let a = SignAssignment::new(&[5, 3], 0b01, Model::Rademacher).unwrap();
        assert_eq!((a.sign(5), a.sign(3), a.sign(7)), (-1, 1, 1));
    }

    #[test]
    fn model_names_round_trip() {
        for m in [Model::Rademacher, Model::CompletelyMult, Model::Steinhaus] {
            assert_eq!(m.name().parse::<Model>().unwrap(), m);
        }
        assert!("gaussian".parse::<Model>().is_err());
    }
}
