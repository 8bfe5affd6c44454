use num_complex::Complex64;
use serde::Serialize;

use super::{Verdict, VerdictClass};
use crate::arith::build_factor_table;
use crate::error::{LabError, Result};
use crate::quad::GaussLegendre;
use crate::sampler::{batch_values, RandomModel};
use crate::stats::{ComplexNeumaier, Neumaier};

/// A finitely supported Dirichlet series Σ a_n n^{-s}.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirichletPolynomial {
    /// Sorted by n, no repeats, no zero coefficients.
    terms: Vec<(u64, Complex64)>,
}

impl DirichletPolynomial {
    /// Repeated indices are summed; zero coefficients are dropped.
    pub fn new(mut terms: Vec<(u64, Complex64)>) -> Result<Self> {
        if terms.iter().any(|&(n, _)| n == 0) {
            return Err(LabError::InvalidArgument("Dirichlet coefficients start at n = 1".into()));
        }
        if terms.iter().any(|(_, a)| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(LabError::InvalidArgument("non-finite coefficient".into()));
        }
        terms.sort_by_key(|&(n, _)| n);
        let mut merged: Vec<(u64, Complex64)> = Vec::with_capacity(terms.len());
        for (n, a) in terms {
            match merged.last_mut() {
                Some((m, b)) if *m == n => *b += a,
                _ => merged.push((n, a)),
            }
        }
        merged.retain(|(_, a)| a.norm_sqr() > 0.0);
        Ok(Self { terms: merged })
    }

    pub fn from_real(terms: &[(u64, f64)]) -> Result<Self> {
        Self::new(terms.iter().map(|&(n, a)| (n, Complex64::new(a, 0.0))).collect())
    }

    /// a_n = f(n)/√n for n ≤ n_max.
    pub fn from_model<M: RandomModel + ?Sized>(o: &M, n_max: u64) -> Result<Self> {
        if n_max == 0 {
            return Self::new(Vec::new());
        }
        let t = build_factor_table(1, n_max + 1)?;
        let block = batch_values(o, 1, n_max + 1, &t)?;
        let terms = (0..block.len())
            .map(|i| {
                let n = i as u64 + 1;
                (n, block.get(i).expect("in range").to_complex() / (n as f64).sqrt())
            })
            .collect();
        Self::new(terms)
    }

    pub fn terms(&self) -> &[(u64, Complex64)] {
        &self.terms
    }

    pub fn n_max(&self) -> u64 {
        self.terms.last().map_or(0, |&(n, _)| n)
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, a)| a.im == 0.0)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = ComplexNeumaier::new();
        for &(n, a) in &self.terms {
            acc.add(a * (-s * (n as f64).ln()).exp());
        }
        acc.value()
    }

    /// ∫_1^∞ |Σ_{n≤x} a_n|² x^{-1-2σ} dx, exact for a step function.
    pub fn mean_square_closed_form(&self, sigma: f64) -> f64 {
        let mut acc = Neumaier::new();
        let mut s = Complex64::new(0.0, 0.0);
        for (i, &(n, a)) in self.terms.iter().enumerate() {
            s += a;
            let head = (-2.0 * sigma * (n as f64).ln()).exp();
            let piece = match self.terms.get(i + 1) {
                // n^{-2σ} − m^{-2σ} = −n^{-2σ}·expm1(−2σ ln(m/n))
                Some(&(m, _)) => -head * (-2.0 * sigma * ((m - n) as f64 / n as f64).ln_1p()).exp_m1(),
                None => head,
            };
            acc.add(s.norm_sqr() * piece / (2.0 * sigma));
        }
        acc.value()
    }

    /// Σ |a_n| n^{-σ}, the sup of |A| on Re s = σ.
    pub fn sup_bound(&self, sigma: f64) -> f64 {
        neu(self.terms.iter().map(|&(n, a)| a.norm() * (n as f64).powf(-sigma)))
    }

    fn mean_value_constants(&self, sigma: f64) -> (f64, f64) {
        let b2: Vec<f64> = self.terms.iter().map(|&(n, a)| a.norm_sqr() * (n as f64).powf(-2.0 * sigma)).collect();
        let w = neu(b2.iter().copied());
        let mut e = Neumaier::new();
        if self.terms.len() > 1 {
            let ln_gap = |i: usize| {
                let (a, b) = (self.terms[i].0, self.terms[i + 1].0);
                ((b - a) as f64 / a as f64).ln_1p()
            };
            for i in 0..self.terms.len() {
                let left = if i > 0 { ln_gap(i - 1) } else { f64::INFINITY };
                let right = if i + 1 < self.terms.len() { ln_gap(i) } else { f64::INFINITY };
                e.add(3.0 * std::f64::consts::PI * b2[i] / left.min(right));
            }
        }
        (w, e.value())
    }
}

fn neu<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    crate::stats::neumaier_sum(xs)
}

/// The pieces of the right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParsevalParts {
    pub lhs: f64,
    pub quad: f64,
    pub quad_error: f64,
    pub tail_center: f64,
    pub tail_radius: f64,
    pub tail_t: f64,
    pub rhs: f64,
}

/// Certified interval for (1/2π)∫_{|t|>T} |A(σ+it)|²/(σ²+t²) dt.
///
/// Two enclosures are intersected. The sup bound gives [0, B²·c/(πσ)] with
/// c = atan(σ/T). The Montgomery–Vaughan mean value theorem gives
/// ∫_T^U |A|² = W(U−T) + θE with |θ| ≤ 1, W = Σ|b_n|², E = 3πΣ|b_n|²/δ_n;
/// integrating by parts against the weight 1/(σ²+t²) yields the interval
/// W·c/(πσ) ± E/(π(σ²+T²)).
fn tail_interval(poly: &DirichletPolynomial, sigma: f64, t: f64) -> (f64, f64) {
    let pi = std::f64::consts::PI;
    let c = (sigma / t).atan();
    let b = poly.sup_bound(sigma);
    let (w, e) = poly.mean_value_constants(sigma);
    let center = w * c / (pi * sigma);
    let radius = e / (pi * (sigma * sigma + t * t));
    let lo = (center - radius).max(0.0);
    let hi = (center + radius).min(b * b * c / (pi * sigma));
    (0.5 * (lo + hi), 0.5 * (hi - lo).max(0.0))
}

const GL_POINTS: usize = 10;

/// Panel breakpoints on [0, T]: widths start at σ/2, grow with t, and are
/// capped at 2/ln N so each panel sees at most a fraction of an oscillation.
fn breakpoints(sigma: f64, t_max: f64, n_max: u64) -> Vec<f64> {
    let h_max = if n_max > 2 { (2.0 / (n_max as f64).ln()).min(1.0) } else { 1.0 };
    let h0 = (0.5 * sigma).min(h_max);
    let mut pts = vec![0.0];
    let mut t = 0.0;
    while t < t_max {
        t = (t + (h0 + 0.25 * t).min(h_max)).min(t_max);
        pts.push(t);
    }
    pts
}

fn quad_rhs(poly: &DirichletPolynomial, sigma: f64, t_max: f64) -> (f64, f64) {
    let gl = GaussLegendre::new(GL_POINTS);
    let coeffs: Vec<(f64, Complex64)> = poly
        .terms
        .iter()
        .map(|&(n, a)| {
            let ln = (n as f64).ln();
            (ln, a * (-sigma * ln).exp())
        })
        .collect();
    let integrand = |t: f64| {
        let mut re = Neumaier::new();
        let mut im = Neumaier::new();
        for &(ln, b) in &coeffs {
            let (s, c) = (t * ln).sin_cos();
            // b·e^{-it ln n}
            re.add(b.re * c + b.im * s);
            im.add(b.im * c - b.re * s);
        }
        let (r, i) = (re.value(), im.value());
        (r * r + i * i) / (sigma * sigma + t * t)
    };
    // |A(σ−it)| = |A(σ+it)| for real coefficients.
    let sides: &[(f64, f64)] = if poly.is_real() { &[(2.0, 1.0)] } else { &[(1.0, 1.0), (1.0, -1.0)] };
    let pts = breakpoints(sigma, t_max, poly.n_max());
    let mut coarse = Neumaier::new();
    let mut fine = Neumaier::new();
    for &(scale, dir) in sides {
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let m = 0.5 * (a + b);
            let f = |t: f64| scale * integrand(dir * t);
            coarse.add(gl.panel(a, b, f));
            fine.add(gl.panel(a, m, f));
            fine.add(gl.panel(m, b, f));
        }
    }
    let inv = 1.0 / (2.0 * std::f64::consts::PI);
    (fine.value() * inv, (fine.value() - coarse.value()).abs() * inv)
}

pub fn parseval_parts(poly: &DirichletPolynomial, sigma: f64, tail_t: f64) -> Result<ParsevalParts> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(LabError::Domain(format!("sigma = {sigma} must be positive")));
    }
    if !(tail_t > 0.0) || !tail_t.is_finite() {
        return Err(LabError::InvalidArgument(format!("tail_T = {tail_t} must be positive")));
    }
    let lhs = poly.mean_square_closed_form(sigma);
    let (quad, quad_error) = if poly.terms.is_empty() { (0.0, 0.0) } else { quad_rhs(poly, sigma, tail_t) };
    let (tail_center, tail_radius) = if poly.terms.is_empty() { (0.0, 0.0) } else { tail_interval(poly, sigma, tail_t) };
    Ok(ParsevalParts { lhs, quad, quad_error, tail_center, tail_radius, tail_t, rhs: quad + tail_center })
}

/// lhs = ∫_0^∞ |Σ_{n≤x} a_n|² x^{-1-2σ} dx in closed form; rhs = (1/2π)∫|A(σ+it)|²/|σ+it|² dt
/// by quadrature on [−T, T] plus the certified tail.
///
/// Fails with `InvalidArgument` when the certified tail enclosure is wider
/// than half the tolerance; pick a larger `tail_t` or use [`parseval_check_auto`].
pub fn parseval_check(poly: &DirichletPolynomial, sigma: f64, tail_t: f64, tolerance: f64) -> Result<Verdict> {
    let parts = parseval_parts(poly, sigma, tail_t)?;
    let scale = 1.0 + parts.rhs.abs();
    if parts.tail_radius > 0.5 * tolerance * scale {
        return Err(LabError::InvalidArgument(format!(
            "tail enclosure ±{:.3e} at T = {tail_t} exceeds half the tolerance",
            parts.tail_radius
        )));
    }
    let gap = (parts.lhs - parts.rhs).abs();
    let pass = gap <= tolerance * (1.0 + parts.lhs.abs());
    Ok(Verdict::new("parseval", VerdictClass::IdentityExact, parts.lhs, parts.rhs, tolerance, pass).with_diagnostics(
        format!(
            "N_max={} sigma={sigma} T={tail_t} quad={:.12e} quad_err={:.2e} tail={:.6e}±{:.2e} gap={gap:.3e}",
            poly.n_max(),
            parts.quad,
            parts.quad_error,
            parts.tail_center,
            parts.tail_radius
        ),
    ))
}

pub const MAX_TAIL_T: f64 = 1e6;

/// Doubles T from 16 until the tail enclosure is within a quarter of the tolerance.
pub fn parseval_check_auto(poly: &DirichletPolynomial, sigma: f64, tolerance: f64) -> Result<Verdict> {
    if !(sigma > 0.0) {
        return Err(LabError::Domain(format!("sigma = {sigma} must be positive")));
    }
    let scale = 1.0 + poly.mean_square_closed_form(sigma).abs();
    let mut t = 16.0;
    while !poly.terms.is_empty() && tail_interval(poly, sigma, t).1 > 0.25 * tolerance * scale {
        t *= 2.0;
        if t > MAX_TAIL_T {
            return Err(LabError::Resource(format!("no certified tail below T = {MAX_TAIL_T}")));
        }
    }
    parseval_check(poly, sigma, t, tolerance)
}
