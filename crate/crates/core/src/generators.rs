//! Built-in sequences with exact dyadic block sums.
//!
//! Block-level evaluation never materialises indices, so horizons of
//! thousands of blocks (indices near `2^1000`) stay cheap.

use std::f64::consts::LN_2;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::{pointwise_block_sum, BlockSequence, CsvSequence, Granularity};

/// Default block horizon of block-only generators.
pub const DEFAULT_BLOCK_HORIZON: usize = 1_000_000;
/// Largest block for which interval-intersection block sums are exact in u128.
const MAX_U128_BLOCK: usize = 125;

/// `x_n = 1/(n+1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Harmonic;

pub fn gen_harmonic() -> Harmonic {
    Harmonic
}

/// `H_M - log M - gamma` up to `O(M^-8)`.
fn harmonic_tail(m: f64) -> f64 {
    let r = 1.0 / m;
    let r2 = r * r;
    0.5 * r - r2 * (1.0 / 12.0 - r2 * (1.0 / 120.0 - r2 / 252.0))
}

impl BlockSequence for Harmonic {
    fn granularity(&self) -> Granularity {
        Granularity::Both
    }

    fn value_at(&self, index: u64) -> Option<f64> {
        Some(1.0 / (index as f64 + 1.0))
    }

    fn block_sum_at(&self, n: usize) -> Result<f64> {
        if n <= 10 {
            return pointwise_block_sum(self, n);
        }
        // H_{2^{n+1}-1} - H_{2^n-1}
        let nf = n as f64;
        let m1 = (nf + 1.0).exp2() - 1.0;
        let m0 = nf.exp2() - 1.0;
        // small terms first so the sum rounds once against log 2
        let log_part = (-(-nf - 1.0).exp2()).ln_1p() - (-(-nf).exp2()).ln_1p();
        Ok(LN_2 + (log_part + (harmonic_tail(m1) - harmonic_tail(m0))))
    }

    fn block_edge_weights(&self, _block: usize) -> Option<(f64, f64)> {
        Some((1.0, 1.0))
    }

    fn sup_bound(&self) -> f64 {
        1.0
    }

    fn label(&self) -> String {
        "harmonic".into()
    }
}

/// Singular values of the operator `A_n`: `mu(l) = 2^{-a(l)}` where `a(l)` is
/// the least element `a >= bitlen(l)` of `{j + n(i+2)^2 : 0 <= j <= i}`.
#[derive(Debug, Clone, Copy)]
pub struct AnSequence {
    n: u64,
    horizon: usize,
}

pub fn gen_an(n: u64) -> Result<AnSequence> {
    AnSequence::new(n, DEFAULT_BLOCK_HORIZON)
}

impl AnSequence {
    pub fn new(n: u64, horizon: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("A_n needs n >= 1".into()));
        }
        Ok(AnSequence { n, horizon })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// First block of the `i`-th constancy run, `n(i+2)^2`.
    pub fn run_start(&self, i: u64) -> u64 {
        self.n * (i + 2) * (i + 2)
    }

    /// `min{a in A : a >= m}`.
    pub fn exponent(&self, m: u64) -> u64 {
        // smallest i with n(i+2)^2 + i >= m
        let mut i = ((m as f64 / self.n as f64).sqrt() as u64).saturating_sub(3);
        while self.run_start(i) + i < m {
            i += 1;
        }
        while i > 0 && self.run_start(i - 1) + (i - 1) >= m {
            i -= 1;
        }
        m.max(self.run_start(i))
    }

    fn check(&self, block: usize) -> Result<()> {
        if block >= self.horizon {
            return Err(Error::InsufficientBlocks {
                block,
                available: self.horizon,
            });
        }
        Ok(())
    }
}

impl BlockSequence for AnSequence {
    fn granularity(&self) -> Granularity {
        Granularity::Both
    }

    fn value_at(&self, index: u64) -> Option<f64> {
        let bitlen = (u64::BITS - index.leading_zeros()) as u64;
        Some((-(self.exponent(bitlen) as f64)).exp2())
    }

    /// `2^{-a(m)} + (2^m - 1) 2^{-a(m+1)}`: index `2^m - 1` has bit length `m`,
    /// the remaining `2^m - 1` indices have bit length `m + 1`.
    fn block_sum_at(&self, m: usize) -> Result<f64> {
        self.check(m)?;
        let a0 = self.exponent(m as u64) as f64;
        let a1 = self.exponent(m as u64 + 1) as f64;
        Ok((-a0).exp2() + (m as f64 - a1).exp2() - (-a1).exp2())
    }

    fn block_edge_weights(&self, m: usize) -> Option<(f64, f64)> {
        self.check(m).ok()?;
        let a0 = self.exponent(m as u64) as f64;
        let a1 = self.exponent(m as u64 + 1) as f64;
        let mf = m as f64;
        Some(((mf - a0).exp2(), (mf + 1.0 - a1).exp2() - (-a1).exp2()))
    }

    fn sup_bound(&self) -> f64 {
        (-4.0 * self.n as f64).exp2()
    }

    fn available_blocks(&self) -> Option<usize> {
        Some(self.horizon)
    }

    fn label(&self) -> String {
        format!("a-n({})", self.n)
    }
}

/// A bounded sequence given as a base value plus constant runs on integer
/// intervals; block sums come from exact interval intersection.
trait IntervalSequence {
    fn base(&self) -> f64;
    /// Runs `[lo, hi]` with value `v` (replacing the base) that meet `[a, b]`.
    fn runs(&self, a: u128, b: u128) -> Vec<(u128, u128, f64)>;
}

fn interval_block_sum<S: IntervalSequence>(s: &S, n: usize) -> Result<f64> {
    if n > MAX_U128_BLOCK {
        return Err(Error::InsufficientBlocks {
            block: n,
            available: MAX_U128_BLOCK + 1,
        });
    }
    let a = (1u128 << n) - 1;
    let b = (1u128 << (n + 1)) - 2;
    let mut total = s.base() * (1u128 << n) as f64;
    for (lo, hi, v) in s.runs(a, b) {
        let (lo, hi) = (lo.max(a), hi.min(b));
        if lo <= hi {
            total += (v - s.base()) * (hi - lo + 1) as f64;
        }
    }
    Ok(total)
}

fn floor_log2(k: u64) -> u32 {
    u64::BITS - 1 - k.leading_zeros()
}

macro_rules! interval_block_impl {
    ($t:ty, $label:expr, $sup:expr) => {
        impl BlockSequence for $t {
            fn granularity(&self) -> Granularity {
                Granularity::Both
            }
            fn value_at(&self, index: u64) -> Option<f64> {
                Some(self.value(index))
            }
            fn block_sum_at(&self, n: usize) -> Result<f64> {
                interval_block_sum(self, n)
            }
            fn sup_bound(&self) -> f64 {
                $sup
            }
            fn label(&self) -> String {
                $label.into()
            }
        }
    };
}

/// `y = 1 + sum_{n>=1} chi_[2^n, 2^n + n]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct YDif1;

pub fn gen_y_dif1() -> YDif1 {
    YDif1
}

impl YDif1 {
    fn value(&self, k: u64) -> f64 {
        if k < 2 {
            return 1.0;
        }
        let j = floor_log2(k);
        if k - (1u64 << j) <= j as u64 {
            2.0
        } else {
            1.0
        }
    }
}

impl IntervalSequence for YDif1 {
    fn base(&self) -> f64 {
        1.0
    }
    fn runs(&self, a: u128, b: u128) -> Vec<(u128, u128, f64)> {
        (1..128u32)
            .map(|j| (1u128 << j, (1u128 << j) + j as u128, 2.0))
            .filter(|&(lo, hi, _)| hi >= a && lo <= b)
            .collect()
    }
}

interval_block_impl!(YDif1, "y-dif1", 2.0);

/// `y = 1 + sum_{n>=1} chi_(4^n, 2 * 4^n]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct YDif2;

pub fn gen_y_dif2() -> YDif2 {
    YDif2
}

impl YDif2 {
    fn value(&self, k: u64) -> f64 {
        if k >= 5 && floor_log2(k - 1).is_multiple_of(2) {
            2.0
        } else {
            1.0
        }
    }
}

impl IntervalSequence for YDif2 {
    fn base(&self) -> f64 {
        1.0
    }
    fn runs(&self, a: u128, b: u128) -> Vec<(u128, u128, f64)> {
        (1..64u32)
            .map(|j| ((1u128 << (2 * j)) + 1, 1u128 << (2 * j + 1), 2.0))
            .filter(|&(lo, hi, _)| hi >= a && lo <= b)
            .collect()
    }
}

interval_block_impl!(YDif2, "y-dif2", 2.0);

/// `x_k = (-1)^n` for `2^n < k <= 2^{n+1}`, with `x_0 = x_1 = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct XAltDyadic;

pub fn gen_x_alt_dyadic() -> XAltDyadic {
    XAltDyadic
}

impl XAltDyadic {
    fn value(&self, k: u64) -> f64 {
        if k < 2 || floor_log2(k - 1).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

impl IntervalSequence for XAltDyadic {
    fn base(&self) -> f64 {
        1.0
    }
    fn runs(&self, a: u128, b: u128) -> Vec<(u128, u128, f64)> {
        (0..127u32)
            .filter(|j| j % 2 == 1)
            .map(|j| ((1u128 << j) + 1, 1u128 << (j + 1), -1.0))
            .filter(|&(lo, hi, _)| hi >= a && lo <= b)
            .collect()
    }
}

interval_block_impl!(XAltDyadic, "x-alt-dyadic", 1.0);

/// Named generator with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Harmonic,
    AN { n: u64 },
    YDif1,
    YDif2,
    XAltDyadic,
    DiagOfD { y: Box<GeneratorSpec> },
    CustomCsv { path: PathBuf },
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Harmonic => write!(f, "harmonic"),
            GeneratorSpec::AN { n } => write!(f, "a-n({n})"),
            GeneratorSpec::YDif1 => write!(f, "y-dif1"),
            GeneratorSpec::YDif2 => write!(f, "y-dif2"),
            GeneratorSpec::XAltDyadic => write!(f, "x-alt-dyadic"),
            GeneratorSpec::DiagOfD { y } => write!(f, "D({y})"),
            GeneratorSpec::CustomCsv { path } => write!(f, "csv:{}", path.display()),
        }
    }
}

impl GeneratorSpec {
    /// Real sequence for this spec. CSV files with an imaginary column are
    /// rejected here; load them through [`CsvSequence`] instead.
    pub fn build(&self) -> Result<Arc<dyn BlockSequence>> {
        Ok(match self {
            GeneratorSpec::Harmonic => Arc::new(Harmonic),
            GeneratorSpec::AN { n } => Arc::new(gen_an(*n)?),
            GeneratorSpec::YDif1 => Arc::new(YDif1),
            GeneratorSpec::YDif2 => Arc::new(YDif2),
            GeneratorSpec::XAltDyadic => Arc::new(XAltDyadic),
            GeneratorSpec::DiagOfD { y } => {
                let inner = y.build()?;
                check_d_ordering(inner.as_ref(), D_CHECK_HORIZON)?;
                Arc::new(crate::transforms::pietsch_d(inner)?)
            }
            GeneratorSpec::CustomCsv { path } => {
                let c = CsvSequence::from_path(path)?;
                if c.is_complex() {
                    return Err(Error::ComplexInput);
                }
                Arc::new(c.real_part(&self.to_string()))
            }
        })
    }
}

/// Indices of `y` checked by [`gen_diag_of_d`].
pub const D_CHECK_HORIZON: usize = 1 << 20;

/// `|y_{n+1}| <= 2 |y_n|` for `n < horizon` (or the available length), which
/// makes `|Dy|` nonincreasing.
pub fn check_d_ordering(y: &dyn BlockSequence, horizon: usize) -> Result<()> {
    let len = y
        .pointwise_len()
        .map_or(horizon, |l| (l as usize).min(horizon));
    let mut prev = y.value_at(0).ok_or(Error::NotPointwise { index: 0 })?;
    for n in 1..len {
        let cur = y.value_at(n as u64).ok_or(Error::NotPointwise { index: n as u64 })?;
        if cur.abs() > 2.0 * prev.abs() {
            return Err(Error::NotDecreasing { index: n });
        }
        prev = cur;
    }
    Ok(())
}

/// `diag(Dy)`: eigenvalues `Dy`, whose block sums are `log 2 * y_n`.
pub fn gen_diag_of_d(
    y: Arc<dyn BlockSequence>,
    label: impl Into<String>,
) -> Result<crate::measurability::OperatorModel> {
    use crate::measurability::{EigenSequence, ModelKind, OperatorModel};
    check_d_ordering(y.as_ref(), D_CHECK_HORIZON)?;
    let nonneg = {
        let len = y.pointwise_len().map_or(D_CHECK_HORIZON, |l| l as usize);
        (0..len.min(D_CHECK_HORIZON)).all(|n| y.value_at(n as u64).is_some_and(|v| v >= 0.0))
    };
    let d: Arc<dyn BlockSequence> = Arc::new(crate::transforms::pietsch_d(y)?);
    Ok(OperatorModel::new(
        EigenSequence::Real(d),
        if nonneg {
            ModelKind::DiagonalPositive
        } else {
            ModelKind::SelfAdjoint
        },
        label,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{norm_m1inf_blocks, quasi_norm_l1inf_blocks};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn harmonic_values_and_blocks() {
        let h = gen_harmonic();
        assert_eq!(h.value_at(0), Some(1.0));
        assert!((h.block_sum_at(1).unwrap() - (0.5 + 1.0 / 3.0)).abs() < 1e-16);
        for n in 0..=22 {
            let p = pointwise_block_sum(&h, n).unwrap();
            assert!(rel(h.block_sum_at(n).unwrap(), p) < 1e-12, "block {n}");
        }
        for n in [40, 200, 1000, 5000] {
            let v = h.block_sum_at(n).unwrap() / LN_2;
            assert!((v - 1.0).abs() <= 2.0 * (-(n as f64)).exp2() + 1e-15);
        }
    }

    #[test]
    fn interval_generators_match_pointwise() {
        let gens: [&dyn BlockSequence; 3] = [&YDif1, &YDif2, &XAltDyadic];
        for g in gens {
            for n in 0..=20 {
                let b = g.block_sum_at(n).unwrap();
                let p = pointwise_block_sum(g, n).unwrap();
                assert!((b - p).abs() <= 1e-12 * p.abs().max(1.0), "{g:?} block {n}");
            }
        }
    }

    #[test]
    fn pointwise_definitions() {
        assert_eq!(YDif1.value_at(4), Some(2.0));
        assert_eq!(YDif1.value_at(6), Some(2.0));
        assert_eq!(YDif1.value_at(7), Some(1.0));
        assert_eq!(YDif2.value_at(5), Some(2.0));
        assert_eq!(YDif2.value_at(8), Some(2.0));
        assert_eq!(YDif2.value_at(9), Some(1.0));
        assert_eq!(YDif2.value_at(17), Some(2.0));
        assert_eq!(XAltDyadic.value_at(2), Some(1.0));
        assert_eq!(XAltDyadic.value_at(3), Some(-1.0));
        assert_eq!(XAltDyadic.value_at(4), Some(-1.0));
        assert_eq!(XAltDyadic.value_at(5), Some(1.0));
        for k in 3..100_000u64 {
            let y = YDif2.value(k);
            let x = XAltDyadic.value(k);
            assert_eq!(y - x / 2.0 - 1.5, 0.0, "k = {k}");
        }
    }

    #[test]
    fn an_exponents() {
        let a = gen_an(1).unwrap();
        // A = {4} u {9, 10} u {16, 17, 18} u ...
        let want = [(0, 4), (4, 4), (5, 9), (10, 10), (11, 16), (18, 18), (19, 25)];
        for (m, e) in want {
            assert_eq!(a.exponent(m), e, "m = {m}");
        }
        let a2 = gen_an(2).unwrap();
        assert_eq!(a2.exponent(9), 18);
        assert_eq!(a2.exponent(19), 19);
        assert_eq!(a2.exponent(20), 32);
    }

    #[test]
    fn an_block_pointwise_consistency() {
        for n in [1, 2, 4] {
            let a = gen_an(n).unwrap();
            for m in 0..=20 {
                let p = pointwise_block_sum(&a, m).unwrap();
                assert!(rel(a.block_sum_at(m).unwrap(), p) < 1e-12);
            }
        }
    }

    #[test]
    fn an_norms() {
        for n in [1u64, 2, 4] {
            let a = gen_an(n).unwrap();
            let q = quasi_norm_l1inf_blocks(&a, 5000).unwrap();
            assert_eq!(q.value, 1.0);
            let (_, ratios) = norm_m1inf_blocks(&a, 5000).unwrap();
            assert!(ratios.iter().all(|&r| r <= 2.0 / n as f64));
        }
    }

    #[test]
    fn an_is_nonincreasing_at_run_edges() {
        let a = gen_an(1).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            for m in [a.run_start(i), a.run_start(i) + i, a.run_start(i) + i + 1] {
                let v = (-(a.exponent(m) as f64)).exp2();
                assert!(v <= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn an_window_sum() {
        for n in [1u64, 2, 4] {
            let a = gen_an(n).unwrap();
            for k in [1u64, 5, 30] {
                let start = a.run_start(k) as usize;
                let s: f64 = (start..start + k as usize).map(|m| a.block_sum_at(m).unwrap()).sum();
                let big = start as f64;
                let expect = k as f64 / 2.0 + (-big).exp2() - (-big - k as f64).exp2();
                assert!((s - expect).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn an_horizon() {
        let a = AnSequence::new(1, 100).unwrap();
        assert!(a.block_sum_at(100).is_err());
        assert!(gen_an(0).is_err());
    }

    #[test]
    fn diag_of_d_checks_ordering() {
        use crate::sequence::TabulatedSequence;
        let bad = Arc::new(TabulatedSequence::pointwise(vec![1.0, 3.0]));
        assert!(matches!(
            gen_diag_of_d(bad, "bad"),
            Err(Error::NotDecreasing { index: 1 })
        ));
        let ok = gen_diag_of_d(Arc::new(YDif1), "dif1").unwrap();
        assert_eq!(ok.kind, crate::measurability::ModelKind::DiagonalPositive);
        let sa = gen_diag_of_d(Arc::new(XAltDyadic), "alt").unwrap();
        assert_eq!(sa.kind, crate::measurability::ModelKind::SelfAdjoint);
    }

    #[test]
    fn large_block_refusal() {
        assert!(YDif1.block_sum_at(126).is_err());
        assert!(YDif1.block_sum_at(125).is_ok());
    }
}
