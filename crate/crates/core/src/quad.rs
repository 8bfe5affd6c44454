//! Gauss–Legendre quadrature: fixed rules, composite panels, adaptive bisection.

use crate::error::{LabError, Result};
use crate::stats::Neumaier;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on P_n from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫_a^b f on a single panel.
    pub fn panel<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Neumaier::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }

    /// Composite rule over `panels` equal panels of [a, b].
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = Neumaier::new();
        for k in 0..panels {
            let lo = a + h * k as f64;
            let hi = if k + 1 == panels { b } else { a + h * (k + 1) as f64 };
            acc.add(self.panel(lo, hi, &mut f));
        }
        acc.value()
    }

    /// Adaptive bisection: a panel is accepted when splitting it changes the
    /// estimate by at most `abs_tol` scaled by the panel's share of [a, b].
    pub fn adaptive<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        abs_tol: f64,
        max_depth: u32,
        mut f: F,
    ) -> Result<f64> {
        let whole = self.panel(a, b, &mut f);
        let mut acc = Neumaier::new();
        let mut stack = vec![(a, b, whole, 0u32)];
        let width = b - a;
        while let Some((lo, hi, est, depth)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let left = self.panel(lo, mid, &mut f);
            let right = self.panel(mid, hi, &mut f);
            let refined = left + right;
            let share = abs_tol * (hi - lo) / width;
            if (refined - est).abs() <= share.max(f64::EPSILON * refined.abs()) {
                acc.add(refined);
            } else if depth >= max_depth {
                return Err(LabError::Numeric(format!(
                    "adaptive quadrature did not converge on [{lo}, {hi}] after {depth} bisections"
                )));
            } else {
                stack.push((mid, hi, right, depth + 1));
                stack.push((lo, mid, left, depth + 1));
            }
        }
        Ok(acc.value())
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
