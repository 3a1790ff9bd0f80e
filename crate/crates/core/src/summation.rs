//! Summation kernels shared by the prefix-sum, Cesàro and quadrature paths.

use serde::{Deserialize, Serialize};

/// How long sums are accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummationMode {
    /// Chunked running sums with pairwise-reduced chunk totals.
    #[default]
    Pairwise,
    /// Neumaier-compensated running sum.
    Compensated,
}

const CHUNK: usize = 256;

/// Pairwise (cascade) sum of a slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Error-free transformation: `a + b = s + e` exactly.
#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// A value carried as an unevaluated sum `hi + lo` (double-double).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub fn new(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }

    pub fn add_f64(self, x: f64) -> Self {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    pub fn sub(self, other: Dd) -> Self {
        let (s, e) = two_sum(self.hi, -other.hi);
        let (hi, lo) = two_sum(s, e + self.lo - other.lo);
        Dd { hi, lo }
    }

    pub fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let r = (-q1).mul_add(d, self.hi) + self.lo;
        let q2 = r / d;
        let (hi, lo) = two_sum(q1, q2);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, m: f64) -> Self {
        let p = self.hi * m;
        let e = self.hi.mul_add(m, -p);
        let (hi, lo) = two_sum(p, e + self.lo * m);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Running prefix sums `y_n = sum_{k<=n} x_k`.
pub fn prefix_sums(xs: &[f64], mode: SummationMode) -> Vec<f64> {
    match mode {
        SummationMode::Compensated => prefix_sums_dd(xs).into_iter().map(Dd::to_f64).collect(),
        SummationMode::Pairwise => {
            let mut out = Vec::with_capacity(xs.len());
            let mut offset = Dd::default();
            for chunk in xs.chunks(CHUNK) {
                let base = offset.to_f64();
                let mut local = 0.0;
                for &x in chunk {
                    local += x;
                    out.push(base + local);
                }
                // chunk totals are pairwise-reduced and carried unrounded
                offset = offset.add_f64(pairwise_sum(chunk));
            }
            out
        }
    }
}

/// Neumaier/double-double prefix sums, kept unrounded.
pub(crate) fn prefix_sums_dd(xs: &[f64]) -> Vec<Dd> {
    let mut acc = Dd::default();
    xs.iter()
        .map(|&x| {
            acc = acc.add_f64(x);
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..1000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }

    #[test]
    fn prefix_modes_agree() {
        let xs: Vec<f64> = (0..5000).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        let a = prefix_sums(&xs, SummationMode::Pairwise);
        let b = prefix_sums(&xs, SummationMode::Compensated);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn dd_division_is_accurate() {
        let third = Dd::new(1.0).div_f64(3.0);
        let back = third.mul_f64(3.0).sub(Dd::new(1.0));
        assert!(back.to_f64().abs() < 1e-30);
    }
}
