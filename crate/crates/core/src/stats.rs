//! Compensated accumulation and small summary statistics.

use num_complex::Complex64;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of complex values, componentwise.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        if z.im != 0.0 {
            self.im.add(z.im);
        }
    }

    #[inline]
    pub fn add_real(&mut self, x: f64) {
        self.re.add(x);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    xs.into_iter().collect::<Neumaier>().value()
}

/// Mean and standard error of the mean, both summed in a fixed order.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MeanSe {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

pub fn mean_se(xs: &[f64]) -> MeanSe {
    let n = xs.len();
    if n == 0 {
        return MeanSe { mean: f64::NAN, stderr: f64::NAN, n };
    }
    let mean = neumaier_sum(xs.iter().copied()) / n as f64;
    if n == 1 {
        return MeanSe { mean, stderr: f64::INFINITY, n };
    }
    let ss = neumaier_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    let var = ss / (n - 1) as f64;
    MeanSe { mean, stderr: (var / n as f64).sqrt(), n }
}

/// Standard error of a binomial proportion, floored at the value for one
/// success so that an empirical frequency of zero still has positive slack.
pub fn binomial_se(successes: usize, n: usize) -> f64 {
    let p = successes.max(1) as f64 / n as f64;
    (p * (1.0 - p).max(0.0) / n as f64).sqrt()
}

/// Linear-interpolated quantile of already sorted data (type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Quantile levels reported across seeds.
pub const REPORT_QUANTILES: [f64; 7] = [0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0];

pub fn report_quantiles(xs: &[f64]) -> [f64; 7] {
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mut out = [0.0; 7];
    for (o, q) in out.iter_mut().zip(REPORT_QUANTILES) {
        *o = quantile_sorted(&v, q);
    }
    out
}

/// Kendall rank correlation between index and value; negative means decay.
pub fn kendall_tau_against_index(ys: &[f64]) -> f64 {
    let n = ys.len();
    if n < 2 {
        return 0.0;
    }
    let mut s: i64 = 0;
    for i in 0..n {
        for j in i + 1..n {
            s += match ys[j].partial_cmp(&ys[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    s as f64 / (n * (n - 1) / 2) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(xs), 2.0);
    }

    #[test]
    fn quantiles_of_small_sample() {
        let q = report_quantiles(&[3.0, 1.0, 2.0, 4.0, 5.0]);
        assert_eq!(q[0], 1.0);
        assert_eq!(q[3], 3.0);
        assert_eq!(q[6], 5.0);
        assert!((q[1] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn mean_se_matches_hand_values() {
        let m = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m.mean - 2.5).abs() < 1e-15);
        let var: f64 = 5.0 / 3.0;
        assert!((m.stderr - (var / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kendall_sign() {
        assert_eq!(kendall_tau_against_index(&[3.0, 2.0, 1.0]), -1.0);
        assert_eq!(kendall_tau_against_index(&[1.0, 2.0, 3.0]), 1.0);
    }
}
