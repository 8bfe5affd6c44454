//! Partial sums of the models: prefix sums at checkpoints, restricted sums,
//! the prime-split decomposition, variance proxies and the two rearrangement
//! identities relating f* and f.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{isqrt, FactorSegments, FactorTable, SieveConfig, SIEVE_CEILING};
use crate::error::{LabError, Result};
use crate::sampler::{sign_from_factors, value_from_factors, Model, RandomModel};
use crate::stats::{ComplexNeumaier, Neumaier};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    One,
    InverseSqrt,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Restriction {
    None,
    /// P(n) ≤ y.
    Smooth { y: f64 },
    /// P(n) > √x, where x is the checkpoint.
    Rough,
    /// q_lo < P(n) ≤ q_hi.
    Window { q_lo: f64, q_hi: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SumSpec {
    pub weight: Weight,
    pub restriction: Restriction,
}

impl SumSpec {
    /// Σ_{n≤x} f(n)/√n.
    pub fn m_f() -> Self {
        Self { weight: Weight::InverseSqrt, restriction: Restriction::None }
    }

    pub fn new(weight: Weight, restriction: Restriction) -> Result<Self> {
        let s = Self { weight, restriction };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self.restriction {
            Restriction::Smooth { y } if !(y > 0.0) => {
                Err(LabError::InvalidArgument(format!("smooth bound {y} must be positive")))
            }
            Restriction::Window { q_lo, q_hi } if !(q_lo > 0.0 && q_hi > q_lo) => {
                Err(LabError::InvalidArgument(format!("window ({q_lo}, {q_hi}] must be positive and nonempty")))
            }
            _ => Ok(()),
        }
    }

    pub fn tag(&self) -> String {
        let w = match self.weight {
            Weight::One => "one",
            Weight::InverseSqrt => "inverse-sqrt",
        };
        match self.restriction {
            Restriction::None => format!("{w}/none"),
            Restriction::Smooth { y } => format!("{w}/smooth({y})"),
            Restriction::Rough => format!("{w}/rough"),
            Restriction::Window { q_lo, q_hi } => format!("{w}/window({q_lo},{q_hi}]"),
        }
    }

    #[inline]
    fn admits(&self, largest: u32) -> bool {
        match self.restriction {
            Restriction::None | Restriction::Rough => true,
            Restriction::Smooth { y } => largest as f64 <= y,
            Restriction::Window { q_lo, q_hi } => {
                let p = largest as f64;
                p > q_lo && p <= q_hi
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrefixSeries {
    pub label: String,
    pub model: Model,
    pub spec: SumSpec,
    pub checkpoints: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Factor tables over [1, n_max] with per-entry 1/√n and P(n), in order.
pub(crate) struct Segment<'a> {
    pub table: &'a FactorTable,
    pub inv_sqrt: &'a [f64],
    pub largest: &'a [u32],
}

pub(crate) fn for_each_segment<F>(n_max: u64, cfg: &SieveConfig, mut f: F) -> Result<()>
where
    F: FnMut(&Segment<'_>) -> Result<()>,
{
    if n_max == 0 {
        return Ok(());
    }
    if n_max >= SIEVE_CEILING {
        return Err(LabError::Resource(format!("x = {n_max} is beyond the sieve ceiling {SIEVE_CEILING}")));
    }
    let mut inv_sqrt = Vec::new();
    let mut largest = Vec::new();
    for table in FactorSegments::new(1, n_max + 1, *cfg)? {
        let table = table?;
        inv_sqrt.clear();
        largest.clear();
        inv_sqrt.extend((table.lo()..table.hi()).map(|n| 1.0 / (n as f64).sqrt()));
        largest.extend((0..table.len()).map(|i| table.factors_at(i).primes().last().copied().unwrap_or(1)));
        f(&Segment { table: &table, inv_sqrt: &inv_sqrt, largest: &largest })?;
    }
    Ok(())
}

pub(crate) fn snap_checkpoints(checkpoints: &[f64], x_max: f64) -> Result<Vec<u64>> {
    for w in checkpoints.windows(2) {
        if !(w[1] > w[0]) {
            return Err(LabError::InvalidArgument("checkpoints must be strictly increasing".into()));
        }
    }
    if let Some(&c) = checkpoints.iter().find(|c| !(c.is_finite() && **c > 0.0 && **c <= x_max)) {
        return Err(LabError::InvalidArgument(format!("checkpoint {c} outside (0, {x_max}]")));
    }
    Ok(checkpoints.iter().map(|c| c.floor() as u64).collect())
}

struct SeriesState {
    acc: ComplexNeumaier,
    next: usize,
    values: Vec<Complex64>,
    diff: Vec<ComplexNeumaier>,
}

impl SeriesState {
    fn new(snapped: &[u64], rough: bool) -> Self {
        let mut s = Self {
            acc: ComplexNeumaier::new(),
            next: 0,
            values: vec![Complex64::new(0.0, 0.0); snapped.len()],
            diff: if rough { vec![ComplexNeumaier::new(); snapped.len() + 1] } else { Vec::new() },
        };
        while s.next < snapped.len() && snapped[s.next] == 0 {
            s.next += 1;
        }
        s
    }

    fn update<M: RandomModel>(&mut self, o: &M, seg: &Segment<'_>, spec: &SumSpec, snapped: &[u64]) {
        let lo = seg.table.lo();
        let rough = matches!(spec.restriction, Restriction::Rough);
        let sqf = o.model() == Model::Rademacher;
        let real = o.model().is_real();
        for i in 0..seg.table.len() {
            let n = lo + i as u64;
            if self.next >= snapped.len() {
                return;
            }
            let lp = seg.largest[i];
            if spec.admits(lp) {
                let f = seg.table.factors_at(i);
                let w = match spec.weight {
                    Weight::One => 1.0,
                    Weight::InverseSqrt => seg.inv_sqrt[i],
                };
                let v = if real {
                    let s = sign_from_factors(o, &f, sqf);
                    Complex64::new(s as f64 * w, 0.0)
                } else {
                    value_from_factors(o, &f).to_complex() * w
                };
                if v.re != 0.0 || v.im != 0.0 {
                    if rough {
                        // n counts at checkpoints c with n ≤ c < P(n)².
                        let p2 = lp as u64 * lp as u64;
                        let end = snapped.partition_point(|&c| c < p2);
                        if end > self.next {
                            self.diff[self.next].add(v);
                            self.diff[end].add(-v);
                        }
                    } else {
                        self.acc.add(v);
                    }
                }
            }
            while self.next < snapped.len() && snapped[self.next] == n {
                if !rough {
                    self.values[self.next] = self.acc.value();
                }
                self.next += 1;
            }
        }
    }

    fn finish(mut self) -> Vec<Complex64> {
        if !self.diff.is_empty() {
            let mut acc = ComplexNeumaier::new();
            for (k, v) in self.values.iter_mut().enumerate() {
                acc.add(self.diff[k].value());
                *v = acc.value();
            }
        }
        self.values
    }
}

pub fn prefix_sums<M: RandomModel>(o: &M, x_max: f64, checkpoints: &[f64], spec: SumSpec) -> Result<PrefixSeries> {
    let mut out = prefix_sums_many(std::slice::from_ref(o), x_max, checkpoints, spec, &SieveConfig::default())?;
    Ok(out.pop().expect("one series per model"))
}

/// One streaming pass shared by all models; models are processed in
/// parallel within each segment, each model's own accumulation is sequential.
pub fn prefix_sums_many<M: RandomModel>(
    models: &[M],
    x_max: f64,
    checkpoints: &[f64],
    spec: SumSpec,
    cfg: &SieveConfig,
) -> Result<Vec<PrefixSeries>> {
    spec.validate()?;
    let snapped = snap_checkpoints(checkpoints, x_max)?;
    let rough = matches!(spec.restriction, Restriction::Rough);
    let mut states: Vec<SeriesState> = models.iter().map(|_| SeriesState::new(&snapped, rough)).collect();
    let n_max = snapped.last().copied().unwrap_or(0);
    for_each_segment(n_max, cfg, |seg| {
        states.par_iter_mut().zip(models.par_iter()).for_each(|(s, o)| s.update(o, seg, &spec, &snapped));
        Ok(())
    })?;
    Ok(states
        .into_iter()
        .zip(models)
        .map(|(s, o)| PrefixSeries {
            label: o.label(),
            model: o.model(),
            spec,
            checkpoints: checkpoints.to_vec(),
            values: s.finish(),
        })
        .collect())
}

/// CSV with columns seed, model, checkpoint, real, imag, spec-tag.
pub fn write_series_csv<W: std::io::Write>(series: &[PrefixSeries], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["seed", "model", "checkpoint", "real", "imag", "spec-tag"])?;
    for s in series {
        let tag = s.spec.tag();
        for (c, v) in s.checkpoints.iter().zip(&s.values) {
            wr.write_record([
                s.label.as_str(),
                s.model.name(),
                &format_num(*c),
                &format_num(v.re),
                &format_num(v.im),
                &tag,
            ])?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// 17 significant digits, '.' decimal point, independent of locale.
pub fn format_num(x: f64) -> String {
    if x.is_finite() && x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.16e}")
    }
}

/// f(n)/√n and P(n) for all n ≤ n_max, materialized for random access.
pub(crate) struct DenseIndex {
    vals: Vec<f64>,
    largest: Vec<u32>,
}

/// Cap on materialized entries for the direct double loops.
pub const DENSE_LIMIT: u64 = 1 << 25;
/// Cap on inner-loop iterations for the direct double loops.
pub const DEFAULT_OPS_BUDGET: u64 = 4_000_000_000;

impl DenseIndex {
    pub(crate) fn build<M: RandomModel>(o: &M, n_max: u64) -> Result<Self> {
        if !o.model().is_real() {
            return Err(LabError::InvalidArgument("direct sums here need a real-valued model".into()));
        }
        if n_max > DENSE_LIMIT {
            return Err(LabError::Resource(format!("{n_max} entries exceed the dense limit {DENSE_LIMIT}")));
        }
        let mut vals = vec![0.0; n_max as usize + 1];
        let mut largest = vec![0u32; n_max as usize + 1];
        let sqf = o.model() == Model::Rademacher;
        for_each_segment(n_max, &SieveConfig::default(), |seg| {
            for i in 0..seg.table.len() {
                let n = (seg.table.lo() + i as u64) as usize;
                let f = seg.table.factors_at(i);
                vals[n] = sign_from_factors(o, &f, sqf) as f64 * seg.inv_sqrt[i];
                largest[n] = seg.largest[i];
            }
            Ok(())
        })?;
        Ok(Self { vals, largest })
    }

    /// Σ_{n≤z, P(n)<p} f(n)/√n.
    pub(crate) fn inner(&self, z: u64, p: u64) -> f64 {
        let mut acc = Neumaier::new();
        for n in 1..=z as usize {
            if (self.largest[n] as u64) < p && self.vals[n] != 0.0 {
                acc.add(self.vals[n]);
            }
        }
        acc.value()
    }

    /// Σ_{n≤z, lo ≤ P(n) < hi} f(n)/√n.
    pub(crate) fn band(&self, z: u64, lo: u64, hi: u64) -> f64 {
        let mut acc = Neumaier::new();
        for n in 1..=z as usize {
            let lp = self.largest[n] as u64;
            if lp >= lo && lp < hi {
                acc.add(self.vals[n]);
            }
        }
        acc.value()
    }

    fn is_prime(&self, n: u64) -> bool {
        n > 1 && self.largest[n as usize] as u64 == n
    }

    pub(crate) fn value(&self, n: u64) -> f64 {
        self.vals[n as usize]
    }

    pub(crate) fn largest(&self, n: u64) -> u64 {
        self.largest[n as usize] as u64
    }
}

fn check_ops(primes: &[u64], x: u64, budget: u64) -> Result<()> {
    let ops: u64 = primes.iter().map(|&p| x / p).sum();
    if ops > budget {
        return Err(LabError::Resource(format!("direct double loop needs {ops} steps, budget {budget}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimeSplit {
    pub s0: f64,
    /// S_1..S_J.
    pub buckets: Vec<f64>,
    /// M_f(x) computed separately as a plain sum.
    pub m_f: f64,
}

impl PrimeSplit {
    pub fn reconstruction(&self) -> f64 {
        let mut acc = Neumaier::new();
        acc.add(self.s0);
        for &s in &self.buckets {
            acc.add(s);
        }
        acc.value()
    }
}

/// Split M_f(x) by the bucket of the largest prime factor.
pub fn prime_split<M: RandomModel>(o: &M, x: f64, ys: &[f64]) -> Result<PrimeSplit> {
    if o.model() != Model::Rademacher {
        return Err(LabError::InvalidArgument("the prime split needs squarefree support (Rademacher model)".into()));
    }
    if ys.is_empty() || ys.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LabError::InvalidArgument("bucket bounds must be strictly increasing".into()));
    }
    if !(x >= 1.0) || *ys.last().unwrap() < x {
        return Err(LabError::InvalidArgument(format!("need x >= 1 and y_J >= x (x = {x})")));
    }
    let xi = x.floor() as u64;
    let d = DenseIndex::build(o, xi)?;
    let y0 = ys[0];
    let primes: Vec<u64> = (2..=xi).filter(|&n| d.is_prime(n) && n as f64 > y0).collect();
    check_ops(&primes, xi, DEFAULT_OPS_BUDGET)?;

    let mut s0 = Neumaier::new();
    let mut m_f = Neumaier::new();
    for n in 1..=xi {
        m_f.add(d.value(n));
        if d.largest(n) as f64 <= y0 {
            s0.add(d.value(n));
        }
    }
    let mut buckets = vec![Neumaier::new(); ys.len() - 1];
    for &p in &primes {
        let j = ys.partition_point(|&y| y < p as f64);
        let fp = d.value(p);
        buckets[j - 1].add(fp * d.inner(xi / p, p));
    }
    Ok(PrimeSplit {
        s0: s0.value(),
        buckets: buckets.iter().map(Neumaier::value).collect(),
        m_f: m_f.value(),
    })
}

/// Σ_{y_lo<p≤y_hi} (1/p)·|Σ_{n≤x/p, P(n)<p} f(n)/√n|².
pub fn variance_v<M: RandomModel>(o: &M, x: f64, y_lo: f64, y_hi: f64) -> Result<f64> {
    if !(y_lo >= 2.0 && y_hi > y_lo && y_hi <= x) {
        return Err(LabError::InvalidRange(format!("need 2 <= y_lo < y_hi <= x (got {y_lo}, {y_hi}, {x})")));
    }
    let xi = x.floor() as u64;
    let n_max = (x / y_lo).floor() as u64;
    let d = DenseIndex::build(o, n_max.max(1))?;
    let primes = crate::arith::PrimeRange::new(y_lo, y_hi)?.primes();
    check_ops(&primes, xi, DEFAULT_OPS_BUDGET)?;
    let mut acc = Neumaier::new();
    for &p in &primes {
        let inner = d.inner(xi / p, p);
        acc.add(inner * inner / p as f64);
    }
    Ok(acc.value())
}

/// The restricted variance over the window (√x, x].
pub fn variance_v_rough<M: RandomModel>(o: &M, x: f64) -> Result<f64> {
    if !(x >= 4.0) {
        return Err(LabError::InvalidArgument(format!("rough variance needs x >= 4 (got {x})")));
    }
    variance_v(o, x, x.sqrt(), x)
}

/// Σ_{n≤z, q0≤P(n)<q} f(n)/√n.
pub fn y_process<M: RandomModel>(o: &M, z: f64, q0: u64, q: u64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(LabError::InvalidArgument(format!("z = {z} must be >= 0")));
    }
    let zi = z.floor() as u64;
    if zi == 0 {
        return Ok(0.0);
    }
    let d = DenseIndex::build(o, zi)?;
    Ok(d.band(zi, q0, q))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_gap: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, abs_gap: (lhs - rhs).abs() }
    }

    pub fn relative_gap(&self) -> f64 {
        self.abs_gap / (1.0 + self.lhs.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityPair {
    /// Σ f*(n) against √x·M_f(x) − Σ {√(x/a)} f(a).
    pub heur: IdentityCheck,
    /// Σ f*(n)/√n against Σ_b (1/b)·M_f(x/b²).
    pub heur2: IdentityCheck,
}

/// Both identities from one streaming pass. The oracle must be the
/// completely multiplicative model; f is its squarefree restriction.
pub fn identity_checks<M: RandomModel>(o: &M, x: f64) -> Result<IdentityPair> {
    if o.model() != Model::CompletelyMult {
        return Err(LabError::InvalidArgument("identity checks need the completely multiplicative model".into()));
    }
    if !(x >= 1.0) || !x.is_finite() {
        return Err(LabError::InvalidArgument(format!("x = {x} must be >= 1")));
    }
    let xi = x.floor() as u64;
    let bmax = isqrt(xi);
    // ⌊x/b²⌋ for b = bmax..1, ascending.
    let cps: Vec<u64> = (1..=bmax).rev().map(|b| xi / (b * b)).collect();
    let mut at_cp = vec![0.0; cps.len()];
    let mut next = 0usize;

    let mut lhs1 = Neumaier::new();
    let mut lhs2 = Neumaier::new();
    let mut mf = Neumaier::new();
    let mut frac = Neumaier::new();
    for_each_segment(xi, &SieveConfig::default(), |seg| {
        for i in 0..seg.table.len() {
            let n = seg.table.lo() + i as u64;
            let f = seg.table.factors_at(i);
            let fstar = sign_from_factors(o, &f, false) as f64;
            lhs1.add(fstar);
            lhs2.add(fstar * seg.inv_sqrt[i]);
            if f.is_squarefree() {
                mf.add(fstar * seg.inv_sqrt[i]);
                let s = (x / n as f64).sqrt();
                let fl = isqrt(xi / n) as f64;
                frac.add((s - fl) * fstar);
            }
            while next < cps.len() && cps[next] == n {
                at_cp[next] = mf.value();
                next += 1;
            }
        }
        Ok(())
    })?;
    let rhs1 = x.sqrt() * mf.value() - frac.value();
    let mut rhs2 = Neumaier::new();
    for (k, &v) in at_cp.iter().enumerate() {
        let b = bmax - k as u64;
        rhs2.add(v / b as f64);
    }
    Ok(IdentityPair {
        heur: IdentityCheck::new(lhs1.value(), rhs1),
        heur2: IdentityCheck::new(lhs2.value(), rhs2.value()),
    })
}

pub fn identity_check_heur<M: RandomModel>(o: &M, x: f64) -> Result<IdentityCheck> {
    Ok(identity_checks(o, x)?.heur)
}

pub fn identity_check_heur2<M: RandomModel>(o: &M, x: f64) -> Result<IdentityCheck> {
    Ok(identity_checks(o, x)?.heur2)
}

/// Convenience for real models: M_f values as f64.
pub fn real_values(series: &PrefixSeries) -> Vec<f64> {
    series.values.iter().map(|v| v.re).collect()
}

/// Calls `visit(state, n, M_f(n))` for every n in [1, n_max], per real model.
fn for_each_mf<M, S, V>(models: &[M], n_max: u64, cfg: &SieveConfig, states: &mut [S], visit: V) -> Result<()>
where
    M: RandomModel,
    S: Send,
    V: Fn(&mut S, u64, f64) + Sync,
{
    if let Some(o) = models.iter().find(|o| !o.model().is_real()) {
        return Err(LabError::InvalidArgument(format!("{} is not a real model", o.model())));
    }
    let mut accs = vec![Neumaier::new(); models.len()];
    for_each_segment(n_max, cfg, |seg| {
        states.par_iter_mut().zip(accs.par_iter_mut()).zip(models.par_iter()).for_each(|((s, acc), o)| {
            let sqf = o.model() == Model::Rademacher;
            for i in 0..seg.table.len() {
                let e = sign_from_factors(o, &seg.table.factors_at(i), sqf);
                if e != 0 {
                    acc.add(e as f64 * seg.inv_sqrt[i]);
                }
                visit(s, seg.table.lo() + i as u64, acc.value());
            }
        });
        Ok(())
    })
}

/// Sign changes of n ↦ M_f(n) with n in [10^k, 10^{k+1}), for k = 0..=⌊log10 x_max⌋.
///
/// Zeros do not break a run: a change is counted when the sign differs from
/// the last nonzero sign.
pub fn sign_changes_per_decade<M: RandomModel>(models: &[M], x_max: f64, cfg: &SieveConfig) -> Result<Vec<Vec<u64>>> {
    if !(x_max >= 1.0) {
        return Err(LabError::InvalidArgument(format!("x_max = {x_max} must be >= 1")));
    }
    let n_max = x_max.floor() as u64;
    let decades = n_max.ilog10() as usize + 1;
    struct St {
        counts: Vec<u64>,
        last: i8,
        bin: usize,
        next_edge: u64,
    }
    let mut states: Vec<St> =
        models.iter().map(|_| St { counts: vec![0; decades], last: 0, bin: 0, next_edge: 10 }).collect();
    for_each_mf(models, n_max, cfg, &mut states, |s, n, m| {
        if n >= s.next_edge {
            s.bin += 1;
            s.next_edge = s.next_edge.saturating_mul(10);
        }
        let sg = if m > 0.0 { 1 } else if m < 0.0 { -1 } else { 0 };
        if sg != 0 {
            if s.last != 0 && sg != s.last {
                s.counts[s.bin] += 1;
            }
            s.last = sg;
        }
    })?;
    Ok(states.into_iter().map(|s| s.counts).collect())
}

/// max |M_f(x)| over integers x in (lo, hi] for each window; `None` for a
/// window holding no integer. Windows must be sorted and disjoint.
pub fn window_maxima<M: RandomModel>(models: &[M], windows: &[(f64, f64)], cfg: &SieveConfig) -> Result<Vec<Vec<Option<f64>>>> {
    let ints: Vec<(u64, u64)> = windows
        .iter()
        .map(|&(lo, hi)| {
            if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
                return Err(LabError::InvalidRange(format!("window ({lo}, {hi}]")));
            }
            Ok((lo.floor() as u64, hi.floor() as u64))
        })
        .collect::<Result<_>>()?;
    if ints.windows(2).any(|w| w[1].0 < w[0].1) {
        return Err(LabError::InvalidArgument("windows must be sorted and disjoint".into()));
    }
    let n_max = ints.last().map_or(0, |w| w.1);
    let mut states: Vec<(usize, Vec<Option<f64>>)> = models.iter().map(|_| (0, vec![None; ints.len()])).collect();
    for_each_mf(models, n_max, cfg, &mut states, |(k, best), n, m| {
        while *k < ints.len() && n > ints[*k].1 {
            *k += 1;
        }
        if *k < ints.len() && n > ints[*k].0 {
            let b = best[*k].get_or_insert(0.0);
            *b = b.max(m.abs());
        }
    })?;
    Ok(states.into_iter().map(|s| s.1).collect())
}
