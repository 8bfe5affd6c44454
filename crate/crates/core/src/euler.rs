//! Rademacher Euler products in log space: windows, increments, exact
//! one-prime expectations, chaos window integrals and the dyadic cover.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{PrimeRange, DEFAULT_ENUMERATION_CUTOFF};
use crate::error::{LabError, Result};
use crate::quad::GaussLegendre;
use crate::sampler::{Model, RandomModel, SignOracle};
use crate::stats::{mean_se, Neumaier};

/// The point s = 1/2 + σ + it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexShift {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexShift {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !(sigma > -0.5) || !t.is_finite() {
            return Err(LabError::Domain(format!("shift sigma = {sigma} must exceed -1/2")));
        }
        Ok(Self { sigma, t })
    }

    pub fn s(&self) -> Complex64 {
        Complex64::new(0.5 + self.sigma, self.t)
    }

    pub fn conj(&self) -> Self {
        Self { sigma: self.sigma, t: -self.t }
    }
}

/// Primes in (y_lo, y_hi].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProductWindow {
    pub y_lo: f64,
    pub y_hi: f64,
}

impl ProductWindow {
    pub fn new(y_lo: f64, y_hi: f64) -> Result<Self> {
        if !(y_lo >= 1.0 && y_hi >= y_lo && y_hi.is_finite()) {
            return Err(LabError::InvalidRange(format!("product window ({y_lo}, {y_hi}]")));
        }
        if y_hi > DEFAULT_ENUMERATION_CUTOFF {
            return Err(LabError::Resource(format!("window top {y_hi} exceeds the enumeration cutoff")));
        }
        Ok(Self { y_lo, y_hi })
    }

    pub fn primes(&self) -> Vec<u64> {
        PrimeRange { lo: self.y_lo, hi: self.y_hi }.primes()
    }
}

/// Window primes with their logarithms, reusable across samples.
#[derive(Clone, Debug)]
pub struct EulerWindow {
    pub primes: Vec<u64>,
    pub log_p: Vec<f64>,
}

impl EulerWindow {
    pub fn new(w: &ProductWindow) -> Self {
        Self::from_primes(w.primes())
    }

    pub fn from_primes(primes: Vec<u64>) -> Self {
        let log_p = primes.iter().map(|&p| (p as f64).ln()).collect();
        Self { primes, log_p }
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn signs<M: RandomModel + ?Sized>(&self, o: &M) -> Vec<f64> {
        self.primes.iter().map(|&p| o.sign(p) as f64).collect()
    }

    /// Σ log(1 + f(p)p^{-s}) with principal logarithms.
    pub fn log_product<M: RandomModel + ?Sized>(&self, o: &M, s: ComplexShift) -> Complex64 {
        let steinhaus = o.model() == Model::Steinhaus;
        let mut re = Neumaier::new();
        let mut im = Neumaier::new();
        for (&p, &lp) in self.primes.iter().zip(&self.log_p) {
            let a = (-(0.5 + s.sigma) * lp).exp();
            let (sn, cs) = (s.t * lp).sin_cos();
            // z = f(p)·a·e^{-iθ}
            let mut z = Complex64::new(a * cs, -a * sn);
            if steinhaus {
                z *= o.phase(p);
            } else if o.sign(p) < 0 {
                z = -z;
            }
            re.add(0.5 * (2.0 * z.re + z.norm_sqr()).ln_1p());
            im.add(z.im.atan2(1.0 + z.re));
        }
        Complex64::new(re.value(), im.value())
    }

    /// log|F(1/2+σ+it)|² for real signs, via chunked products of
    /// 1 + 2εa·cos(t log p) + a².
    pub fn log_abs_sq_real(&self, signs: &[f64], sigma: f64, t: f64) -> f64 {
        let mut acc = Neumaier::new();
        let mut prod = 1.0;
        for (k, (&lp, &e)) in self.log_p.iter().zip(signs).enumerate() {
            let a = (-(0.5 + sigma) * lp).exp();
            prod *= 1.0 + 2.0 * e * a * (t * lp).cos() + a * a;
            if k % 16 == 15 {
                acc.add(prod.ln());
                prod = 1.0;
            }
        }
        acc.add(prod.ln());
        acc.value()
    }
}

pub fn log_product<M: RandomModel + ?Sized>(o: &M, w: &ProductWindow, s: ComplexShift) -> Result<Complex64> {
    ComplexShift::new(s.sigma, s.t)?;
    Ok(EulerWindow::new(w).log_product(o, s))
}

/// (y0^{e^{-(k+2)}}, y0^{e^{-(k+1)}}] given log y0.
pub fn increment_window(log_y0: f64, k: u32) -> Result<ProductWindow> {
    if !(log_y0 > 0.0) {
        return Err(LabError::Domain(format!("log y0 = {log_y0} must be positive")));
    }
    let lo = (log_y0 * (-(k as f64 + 2.0)).exp()).exp();
    let hi = (log_y0 * (-(k as f64 + 1.0)).exp()).exp();
    ProductWindow::new(lo, hi)
}

/// The k-th increment I_k(s).
pub fn increment_i_k<M: RandomModel + ?Sized>(o: &M, log_y0: f64, k: u32, s: ComplexShift) -> Result<Complex64> {
    let w = increment_window(log_y0, k)?;
    Ok(log_product(o, &w, s)?.exp())
}

/// |1 + εa e^{-iθ}|² with a = p^{-1/2-σ}, θ = t log p.
#[inline]
fn factor_abs_sq(p: u64, sigma: f64, t: f64, eps: f64) -> f64 {
    let lp = (p as f64).ln();
    let a = (-(0.5 + sigma) * lp).exp();
    1.0 + 2.0 * eps * a * (t * lp).cos() + a * a
}

/// ½[g(+1) + g(−1)] with g(ε) = |1+εp^{-s1}|^{2α}|1+εp^{-s2}|^{2β}.
pub fn per_prime_expectation_exact(p: u64, sigma: f64, t1: f64, t2: f64, alpha: f64, beta: f64) -> Result<f64> {
    let mut total = 0.0;
    for eps in [1.0, -1.0] {
        let b1 = factor_abs_sq(p, sigma, t1, eps);
        let b2 = factor_abs_sq(p, sigma, t2, eps);
        if (b1 == 0.0 && alpha < 0.0) || (b2 == 0.0 && beta < 0.0) {
            return Err(LabError::Domain(format!("vanishing factor at p = {p} with a negative exponent")));
        }
        let g1 = if alpha == 0.0 { 1.0 } else { b1.powf(alpha) };
        let g2 = if beta == 0.0 { 1.0 } else { b2.powf(beta) };
        total += 0.5 * g1 * g2;
    }
    Ok(total)
}

/// log of ∏_{p∈w} per-prime expectations.
pub fn log_expectation_product(w: &ProductWindow, sigma: f64, t1: f64, t2: f64, alpha: f64, beta: f64) -> Result<f64> {
    let mut acc = Neumaier::new();
    for p in w.primes() {
        acc.add(per_prime_expectation_exact(p, sigma, t1, t2, alpha, beta)?.ln());
    }
    Ok(acc.value())
}

/// The exponent of the two-shift expectation formula without its error term.
pub fn principal_exponent(w: &ProductWindow, sigma: f64, t1: f64, t2: f64, alpha: f64, beta: f64) -> f64 {
    let mut acc = Neumaier::new();
    for p in w.primes() {
        let lp = (p as f64).ln();
        let num = alpha * alpha
            + beta * beta
            + (alpha * alpha - alpha) * (2.0 * t1 * lp).cos()
            + (beta * beta - beta) * (2.0 * t2 * lp).cos()
            + 2.0 * alpha * beta * (((t1 - t2) * lp).cos() + ((t1 + t2) * lp).cos());
        acc.add(num * (-(1.0 + 2.0 * sigma) * lp).exp());
    }
    acc.value()
}

/// Monte Carlo E|F_w(1/2+σ+it1)|^{2α}|F_w(1/2+σ+it2)|^{2β} over seeds
/// seed_base, seed_base+1, …; the exact value is exp(log_expectation_product).
pub fn expectation_mc(
    w: &ProductWindow,
    sigma: f64,
    t1: f64,
    t2: f64,
    alpha: f64,
    beta: f64,
    samples: usize,
    seed_base: u64,
) -> Result<crate::stats::MeanSe> {
    ComplexShift::new(sigma, t1)?;
    if samples < 2 {
        return Err(LabError::Underpowered(format!("{samples} samples")));
    }
    let win = EulerWindow::new(w);
    let draws: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let o = SignOracle::new(seed_base.wrapping_add(i), Model::Rademacher);
            let signs = win.signs(&o);
            (alpha * win.log_abs_sq_real(&signs, sigma, t1) + beta * win.log_abs_sq_real(&signs, sigma, t2)).exp()
        })
        .collect();
    Ok(mean_se(&draws))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioCheck {
    pub t: f64,
    pub sigma: f64,
    pub primes: usize,
    pub mc_estimate: f64,
    pub stderr: f64,
    pub exact: f64,
    /// ln(exact): the observed constant C in exact = e^C.
    pub log_constant: f64,
    /// exp(Σ 2t²(log p)²/p^{1+2σ}), the Taylor-bound envelope.
    pub taylor_envelope: f64,
}

impl RatioCheck {
    pub fn within(&self, k_se: f64) -> bool {
        (self.mc_estimate - self.exact).abs() <= k_se * self.stderr + 1e-12 * self.exact
    }
}

/// Window primes for the short-product ratio: p ≤ ⌊exp(1/|t|)⌋.
pub fn ratio_window(t: f64) -> Result<ProductWindow> {
    if t == 0.0 || !t.is_finite() {
        return Err(LabError::Domain("the short-product ratio needs t != 0".into()));
    }
    let z = (1.0 / t.abs()).exp();
    if z > DEFAULT_ENUMERATION_CUTOFF {
        return Err(LabError::Resource(format!("exp(1/|t|) = {z:e} exceeds the enumeration budget")));
    }
    ProductWindow::new(1.5, z.floor().max(1.5))
}

/// Exact and Monte Carlo E∏|(1+f(p)p^{-1/2-σ-it})/(1+f(p)p^{-1/2-σ})|².
pub fn expected_ratio_bound_check(t: f64, sigma: f64, samples: usize, seed_base: u64) -> Result<RatioCheck> {
    let w = ratio_window(t)?;
    ComplexShift::new(sigma, t)?;
    let win = EulerWindow::new(&w);
    let amp: Vec<f64> = win.log_p.iter().map(|&lp| (-(0.5 + sigma) * lp).exp()).collect();
    let cosv: Vec<f64> = win.log_p.iter().map(|&lp| (t * lp).cos()).collect();
    let mut log_exact = Neumaier::new();
    let mut env = Neumaier::new();
    for ((&a, &c), &lp) in amp.iter().zip(&cosv).zip(&win.log_p) {
        let plus = (1.0 + 2.0 * a * c + a * a) / ((1.0 + a) * (1.0 + a));
        let minus = (1.0 - 2.0 * a * c + a * a) / ((1.0 - a) * (1.0 - a));
        log_exact.add((0.5 * (plus + minus)).ln());
        env.add(2.0 * t * t * lp * lp * a * a);
    }
    let exact = log_exact.value().exp();
    let draws: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let o = SignOracle::new(seed_base.wrapping_add(i), Model::Rademacher);
            let mut acc = Neumaier::new();
            for ((&p, &a), &c) in win.primes.iter().zip(&amp).zip(&cosv) {
                let e = o.sign(p) as f64;
                let num = 1.0 + 2.0 * e * a * c + a * a;
                let den = (1.0 + e * a) * (1.0 + e * a);
                acc.add((num / den).ln());
            }
            acc.value().exp()
        })
        .collect();
    let m = mean_se(&draws);
    Ok(RatioCheck {
        t,
        sigma,
        primes: win.len(),
        mc_estimate: m.mean,
        stderr: if samples > 1 { m.stderr } else { f64::INFINITY },
        exact,
        log_constant: log_exact.value(),
        taylor_envelope: env.value().exp(),
    })
}

/// Seed-independent quadrature data for ∫_{N-1/2}^{N+1/2} |F_y(1/2+σ+it)|² dt:
/// Gauss–Legendre nodes, weights, cos(t log p) per node and the per-prime
/// amplitudes, so a sample costs one multiply-add per (node, prime).
#[derive(Clone, Debug)]
pub struct ChaosGrid {
    pub primes: Vec<u64>,
    weights: Vec<f64>,
    cos_table: Vec<f64>,
    amp2: Vec<f64>,
    c0: Vec<f64>,
}

const CHAOS_RULE: usize = 8;

impl ChaosGrid {
    pub fn new(primes: &[u64], sigma: f64, n_center: f64, panels: usize) -> Self {
        let g = GaussLegendre::new(CHAOS_RULE);
        let (a, b) = (n_center - 0.5, n_center + 0.5);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * CHAOS_RULE);
        let mut weights = Vec::with_capacity(panels * CHAOS_RULE);
        for k in 0..panels {
            let mid = a + h * (k as f64 + 0.5);
            for (x, w) in g.nodes().iter().zip(g.weights()) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        let log_p: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
        let amp: Vec<f64> = log_p.iter().map(|&lp| (-(0.5 + sigma) * lp).exp()).collect();
        let mut cos_table = Vec::with_capacity(nodes.len() * primes.len());
        for &t in &nodes {
            cos_table.extend(log_p.iter().map(|&lp| (t * lp).cos()));
        }
        Self {
            primes: primes.to_vec(),
            weights,
            cos_table,
            amp2: amp.iter().map(|a| 2.0 * a).collect(),
            c0: amp.iter().map(|a| 1.0 + a * a).collect(),
        }
    }

    pub fn nodes(&self) -> usize {
        self.weights.len()
    }

    /// The window integral for one sign vector (aligned with `primes`).
    pub fn integral(&self, signs: &[f64]) -> f64 {
        let m = self.primes.len();
        let c1: Vec<f64> = self.amp2.iter().zip(signs).map(|(a, s)| a * s).collect();
        let mut acc = Neumaier::new();
        for (k, &w) in self.weights.iter().enumerate() {
            let row = &self.cos_table[k * m..(k + 1) * m];
            let mut log_sum = 0.0;
            let mut prod = 1.0;
            for (j, ((&c, &b), &a)) in row.iter().zip(&c1).zip(&self.c0).enumerate() {
                prod *= a + b * c;
                if j % 32 == 31 {
                    log_sum += prod.ln();
                    prod = 1.0;
                }
            }
            log_sum += prod.ln();
            acc.add(w * log_sum.exp());
        }
        acc.value()
    }
}

pub fn default_chaos_panels(y: f64) -> usize {
    16usize.max((4.0 * y.max(1.0).ln()).ceil() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChaosIntegral {
    pub value: f64,
    pub panels: usize,
    pub relative_change: f64,
}

const MAX_DOUBLINGS: u32 = 6;
const CHAOS_REL_TOL: f64 = 1e-6;

/// ∫_{N-1/2}^{N+1/2} |F_y(1/2+σ+it)|² dt for a real-sign model, doubling the
/// panel count until the relative change drops below 1e-6.
pub fn chaos_window_integral<M: RandomModel + ?Sized>(
    o: &M,
    y: f64,
    sigma: f64,
    n_center: i64,
    panels: usize,
) -> Result<ChaosIntegral> {
    if panels < 16 {
        return Err(LabError::InvalidArgument(format!("need at least 16 panels (got {panels})")));
    }
    if !o.model().is_real() {
        return Err(LabError::InvalidArgument("chaos integrals are defined here for real signs".into()));
    }
    ComplexShift::new(sigma, 0.0)?;
    let w = ProductWindow::new(1.0, y.max(1.0))?;
    let primes = w.primes();
    let signs: Vec<f64> = primes.iter().map(|&p| o.sign(p) as f64).collect();
    let mut p = panels;
    let mut prev = ChaosGrid::new(&primes, sigma, n_center as f64, p).integral(&signs);
    for _ in 0..MAX_DOUBLINGS {
        p *= 2;
        let next = ChaosGrid::new(&primes, sigma, n_center as f64, p).integral(&signs);
        let change = (next - prev).abs() / next.abs().max(f64::MIN_POSITIVE);
        if change < CHAOS_REL_TOL {
            return Ok(ChaosIntegral { value: next, panels: p, relative_change: change });
        }
        prev = next;
    }
    Err(LabError::Numeric(format!(
        "chaos integral at y = {y}, N = {n_center} did not settle after {MAX_DOUBLINGS} doublings (last {prev})"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DyadicGroup {
    Inner,
    Outer,
}

/// One window (|T|, 2|T|] on the side given by `sign`, |T| = 2^n/log y0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DyadicWindow {
    pub n: u32,
    pub sign: i8,
    pub t_lo: f64,
    pub t_hi: f64,
    pub group: DyadicGroup,
}

/// Dyadic windows covering (1/log y0, (log log y0)^{-eps}] on both sides,
/// grouped at (log log y0)^{-K}: inner when |T| ≤ that split.
pub fn dyadic_windows(log_y0: f64, k: f64, eps: f64) -> Result<Vec<DyadicWindow>> {
    if !(log_y0 >= 16f64.ln()) {
        return Err(LabError::InvalidArgument(format!("need y0 >= 16 (log y0 = {log_y0})")));
    }
    if !(eps > 0.0 && eps < k) {
        return Err(LabError::Degenerate(format!("need 0 < eps < K (eps = {eps}, K = {k})")));
    }
    let ll = log_y0.ln();
    let top = ll.powf(-eps);
    let split = ll.powf(-k);
    let base = 1.0 / log_y0;
    if base >= top {
        return Err(LabError::Degenerate(format!(
            "empty cover: 1/log y0 = {base} is not below (log log y0)^-eps = {top}"
        )));
    }
    let mut out = Vec::new();
    let mut n = 0u32;
    loop {
        let lo = base * 2f64.powi(n as i32);
        if lo >= top {
            break;
        }
        let group = if lo <= split { DyadicGroup::Inner } else { DyadicGroup::Outer };
        for sign in [1i8, -1] {
            out.push(DyadicWindow { n, sign, t_lo: lo, t_hi: 2.0 * lo, group });
        }
        n += 1;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChaosRow {
    pub y: f64,
    pub q: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub reference: f64,
    pub ratio: f64,
}

/// (min{log y, 1/|σ|}/(1 + (1−q)√(log log y)))^q.
pub fn chaos_reference(y: f64, q: f64, sigma: f64) -> f64 {
    let ly = y.ln();
    let m = if sigma == 0.0 { ly } else { ly.min(1.0 / sigma.abs()) };
    (m / (1.0 + (1.0 - q) * ly.ln().max(0.0).sqrt())).powf(q)
}

/// Monte Carlo E[(∫_{-1/2}^{1/2}|F_y(1/2+σ+it)|²dt)^q] per rung, with seeds
/// seed_base, seed_base+1, ….
pub fn chaos_moment_probe(
    y_ladder: &[f64],
    q: f64,
    sigma: f64,
    samples: usize,
    seed_base: u64,
) -> Result<Vec<ChaosRow>> {
    if !(0.0..=1.0).contains(&q) {
        return Err(LabError::InvalidArgument(format!("q = {q} must lie in [0, 1]")));
    }
    if samples < 100 {
        return Err(LabError::Underpowered(format!("{samples} samples; at least 100 required")));
    }
    if y_ladder.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LabError::InvalidArgument("y ladder must be ascending".into()));
    }
    y_ladder
        .iter()
        .map(|&y| {
            let w = ProductWindow::new(1.0, y)?;
            let primes = w.primes();
            let grid = ChaosGrid::new(&primes, sigma, 0.0, 2 * default_chaos_panels(y));
            let draws: Vec<f64> = (0..samples as u64)
                .into_par_iter()
                .map(|i| {
                    if q == 0.0 {
                        return 1.0;
                    }
                    let o = SignOracle::new(seed_base.wrapping_add(i), Model::Rademacher);
                    let signs: Vec<f64> = primes.iter().map(|&p| o.sign(p) as f64).collect();
                    grid.integral(&signs).powf(q)
                })
                .collect();
            let m = mean_se(&draws);
            let reference = chaos_reference(y, q, sigma);
            Ok(ChaosRow { y, q, estimate: m.mean, stderr: m.stderr, reference, ratio: m.mean / reference })
        })
        .collect()
}

/// E∫|F_y|² = ∏_{p≤y}(1 + p^{-1-2σ}) on a unit window (t-independent).
pub fn chaos_first_moment_exact(y: f64, sigma: f64) -> Result<f64> {
    let w = ProductWindow::new(1.0, y)?;
    log_expectation_product(&w, sigma, 0.0, 0.0, 1.0, 0.0).map(f64::exp)
}

pub fn write_chaos_csv<W: std::io::Write>(rows: &[ChaosRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["y", "q", "estimate", "stderr", "reference", "ratio"])?;
    for r in rows {
        wr.write_record(
            [r.y, r.q, r.estimate, r.stderr, r.reference, r.ratio].map(crate::sums::format_num),
        )?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{exhaustive_assignments, SignAssignment};

    #[test]
    fn empty_and_tiny_windows() {
        let o = SignOracle::new(1, Model::Rademacher);
        let s = ComplexShift::new(0.0, 1.0).unwrap();
        assert_eq!(log_product(&o, &ProductWindow::new(1.0, 1.9).unwrap(), s).unwrap(), Complex64::new(0.0, 0.0));
        let a = SignAssignment::all_plus(&[2, 3], Model::Rademacher).unwrap();
        let v = log_product(&a, &ProductWindow::new(1.0, 3.0).unwrap(), ComplexShift::new(0.5, 0.0).unwrap()).unwrap();
        assert!((v.exp() - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        assert!(matches!(ComplexShift::new(-0.5, 0.0), Err(LabError::Domain(_))));
    }

    #[test]
    fn log_product_matches_direct_product() {
        let w = ProductWindow::new(1.0, 2000.0).unwrap();
        for model in [Model::Rademacher, Model::Steinhaus] {
            let o = SignOracle::new(5, model);
            let s = ComplexShift::new(0.05, 3.7).unwrap();
            let got = log_product(&o, &w, s).unwrap().exp();
            let mut prod = Complex64::new(1.0, 0.0);
            for p in w.primes() {
                let f = match model {
                    Model::Steinhaus => o.phase(p),
                    _ => Complex64::new(o.sign(p) as f64, 0.0),
                };
                prod *= Complex64::new(1.0, 0.0) + f * (-s.s() * (p as f64).ln()).exp();
            }
            assert!((got - prod).norm() <= 1e-10 * prod.norm());
        }
    }

    #[test]
    fn conjugate_symmetry_and_additivity() {
        let o = SignOracle::new(9, Model::Rademacher);
        let s = ComplexShift::new(0.0, 0.3).unwrap();
        let w = ProductWindow::new(1.0, 1e4).unwrap();
        let a = log_product(&o, &w, s).unwrap();
        let b = log_product(&o, &w, s.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
        let l = log_product(&o, &ProductWindow::new(1.0, 300.0).unwrap(), s).unwrap();
        let r = log_product(&o, &ProductWindow::new(300.0, 1e4).unwrap(), s).unwrap();
        assert!((l + r - a).norm() < 1e-12);
        let win = EulerWindow::new(&w);
        let signs = win.signs(&o);
        assert!((win.log_abs_sq_real(&signs, 0.0, 0.3) - 2.0 * a.re).abs() < 1e-10);
    }

    #[test]
    fn increments_tile_the_product() {
        let o = SignOracle::new(2, Model::Rademacher);
        let s = ComplexShift::new(0.01, 0.2).unwrap();
        let log_y0 = 30.0;
        let m = 4;
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..=m {
            total += log_product(&o, &increment_window(log_y0, k).unwrap(), s).unwrap();
        }
        let low = ProductWindow::new(1.0, (log_y0 * (-(m as f64 + 2.0)).exp()).exp()).unwrap();
        total += log_product(&o, &low, s).unwrap();
        let full = ProductWindow::new(1.0, (log_y0 / std::f64::consts::E).exp()).unwrap();
        assert!((total - log_product(&o, &full, s).unwrap()).norm() < 1e-11);
        // deep increments sit below 2
        assert_eq!(increment_i_k(&o, log_y0, 10, s).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn per_prime_values() {
        assert!((per_prime_expectation_exact(2, 0.0, 0.7, 0.0, 1.0, 0.0).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(per_prime_expectation_exact(3, 0.1, 2.0, 1.0, 0.0, 0.0).unwrap(), 1.0);
        for t in [-3.0, -0.5, 0.0, 0.25, 1.0, 10.0, 100.0] {
            let v = per_prime_expectation_exact(101, 1e-3, t, 0.0, 1.0, 0.0).unwrap();
            let c = 1.0 + (-(1.0 + 2e-3) * 101f64.ln()).exp();
            assert!((v - c).abs() < 1e-15);
        }
    }

    #[test]
    fn per_prime_matches_exhaustive_average() {
        let all = exhaustive_assignments(&[2, 3, 5, 7], Model::Rademacher).unwrap();
        let w = ProductWindow::new(1.0, 7.0).unwrap();
        let (sigma, t1, t2, al, be) = (0.02, 0.4, -1.1, 0.7, -0.3);
        let mut avg = 0.0;
        for a in &all {
            let mut g = 1.0;
            for p in [2u64, 3, 5, 7] {
                let e = a.sign(p) as f64;
                g *= factor_abs_sq(p, sigma, t1, e).powf(al) * factor_abs_sq(p, sigma, t2, e).powf(be);
            }
            avg += g / 16.0;
        }
        let exact = log_expectation_product(&w, sigma, t1, t2, al, be).unwrap().exp();
        assert!((avg - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn disjoint_windows_factorize() {
        let all = exhaustive_assignments(&[2, 3, 5, 7], Model::Rademacher).unwrap();
        let s = ComplexShift::new(0.0, 0.6).unwrap();
        let (w1, w2) = (ProductWindow::new(1.0, 3.0).unwrap(), ProductWindow::new(3.0, 7.0).unwrap());
        let mean = |f: &dyn Fn(&SignAssignment) -> f64| all.iter().map(f).sum::<f64>() / 16.0;
        let both = mean(&|a| (2.0 * (log_product(a, &w1, s).unwrap() + log_product(a, &w2, s).unwrap()).re).exp());
        let e1 = mean(&|a| (2.0 * log_product(a, &w1, s).unwrap().re).exp());
        let e2 = mean(&|a| (2.0 * log_product(a, &w2, s).unwrap().re).exp());
        assert!((both - e1 * e2).abs() < 1e-13);
    }

    #[test]
    fn principal_term_gap_is_moderate() {
        let w = ProductWindow::new(2.0, 1e4).unwrap();
        let exact = log_expectation_product(&w, 1e-3, 0.0, 0.0, 1.0, 0.0).unwrap();
        let principal = principal_exponent(&w, 1e-3, 0.0, 0.0, 1.0, 0.0);
        let gap = ((exact - principal).exp() - 1.0).abs();
        assert!(gap <= 0.75, "gap {gap}");
    }

    #[test]
    fn ratio_exact_by_enumeration() {
        let r = expected_ratio_bound_check(0.5, 0.0, 200, 0).unwrap();
        assert_eq!(r.primes, 4);
        let all = exhaustive_assignments(&[2, 3, 5, 7], Model::Rademacher).unwrap();
        let mut avg = 0.0;
        for a in &all {
            let mut g = 1.0;
            for p in [2u64, 3, 5, 7] {
                let e = a.sign(p) as f64;
                g *= factor_abs_sq(p, 0.0, 0.5, e) / factor_abs_sq(p, 0.0, 0.0, e);
            }
            avg += g / 16.0;
        }
        assert!((avg - r.exact).abs() < 1e-12);
        let empty = expected_ratio_bound_check(2.0, 0.0, 200, 0).unwrap();
        assert_eq!((empty.primes, empty.exact, empty.mc_estimate), (0, 1.0, 1.0));
    }

    #[test]
    fn chaos_integral_symmetry_and_refinement() {
        let o = SignOracle::new(17, Model::Rademacher);
        let a = chaos_window_integral(&o, 1e3, 0.0, 3, 28).unwrap();
        let b = chaos_window_integral(&o, 1e3, 0.0, -3, 28).unwrap();
        assert!((a.value - b.value).abs() <= 1e-12 * a.value);
        assert!(a.relative_change < 1e-6);
        assert!(chaos_window_integral(&o, 1e3, 0.0, 0, 8).is_err());
    }

    #[test]
    fn chaos_exhaustive_two_primes() {
        let all = exhaustive_assignments(&[2, 3], Model::Rademacher).unwrap();
        let mut avg = 0.0;
        let mut direct = 0.0;
        let g = GaussLegendre::new(20);
        for a in &all {
            avg += chaos_window_integral(a, 3.0, 0.0, 0, 16).unwrap().value / 4.0;
            let (e2, e3) = (a.sign(2) as f64, a.sign(3) as f64);
            direct += g.composite(-0.5, 0.5, 8, |t| factor_abs_sq(2, 0.0, t, e2) * factor_abs_sq(3, 0.0, t, e3)) / 4.0;
        }
        assert!((avg - direct).abs() < 1e-9);
        assert!((avg - 2.0).abs() < 1e-9);
    }

    #[test]
    fn zeroth_moment_is_one() {
        let rows = chaos_moment_probe(&[100.0], 0.0, 0.0, 100, 0).unwrap();
        assert_eq!(rows[0].estimate, 1.0);
        assert_eq!(rows[0].stderr, 0.0);
    }

    #[test]
    fn dyadic_cover_scan() {
        let log_y0 = 4f64.exp();
        let ws = dyadic_windows(log_y0, 2.0, 1.0).unwrap();
        let pos: Vec<_> = ws.iter().filter(|w| w.sign > 0).collect();
        // Scan: smallest n with 2^n/log y0 ≥ 1/4 is n = 4.
        let mut n_end = 0;
        while 2f64.powi(n_end) / log_y0 < 0.25 {
            n_end += 1;
        }
        assert_eq!(pos.len(), n_end as usize);
        let inner: Vec<u32> = pos.iter().filter(|w| w.group == DyadicGroup::Inner).map(|w| w.n).collect();
        assert_eq!(inner, vec![0, 1]);
        for pair in pos.windows(2) {
            assert_eq!(pair[0].t_hi, pair[1].t_lo);
        }
        assert!(pos[0].t_lo <= 1.0 / log_y0 && pos.last().unwrap().t_hi >= 0.25);
        assert!(dyadic_windows(log_y0, 2.0, 2.0).is_err());
        assert!(matches!(dyadic_windows(3.0, 40.0, 30.0), Err(LabError::Degenerate(_))));
    }
}
