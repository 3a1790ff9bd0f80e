//! Sequence operators: shifts, dilation, the Pietsch map `D`, the normalised
//! block-sum functional `Phi`, Cesaro means and their continuous-parameter
//! counterparts on piecewise-constant functions.

use std::f64::consts::LN_2;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sequence::{
    block_end, block_of_index, block_start, BlockSequence, Granularity, TabulatedSequence,
    Truncation, MAX_POINTWISE_BLOCK,
};
use crate::summation::{prefix_sums, prefix_sums_dd, Dd};

/// Largest supported Cesaro iterate.
pub const MAX_CESARO_ITERATES: usize = 12;

/// `(0, x_0, x_1, ...)`; the output is one entry longer.
pub fn shift_right(x: &Truncation) -> Truncation {
    let mut v = Vec::with_capacity(x.len() + 1);
    v.push(0.0);
    v.extend_from_slice(x.values());
    x.derive(v).expect("finite input")
}

/// `(x_1, x_2, ...)`; the output is one entry shorter.
pub fn shift_left(x: &Truncation) -> Result<Truncation> {
    x.derive(x.values()[1..].to_vec())
}

/// `(x_0, x_0, x_1, x_1, ...)`.
pub fn dilate2(x: &Truncation) -> Truncation {
    let v = x.values().iter().flat_map(|&a| [a, a]).collect();
    x.derive(v).expect("finite input")
}

/// `Dy`: spreads `log 2 * y_n` evenly over block `n`.
#[derive(Debug, Clone)]
pub struct DSequence<S> {
    inner: S,
}

/// `(Dy)_k = log 2 * y_n / 2^n` for `k` in block `n`. `y` must be
/// pointwise-evaluable (its index is the block index of the result).
pub fn pietsch_d<S: BlockSequence>(y: S) -> Result<DSequence<S>> {
    if !y.granularity().has_pointwise() {
        return Err(Error::Precondition(
            "Pietsch D needs pointwise values of its argument".into(),
        ));
    }
    if !y.sup_bound().is_finite() {
        return Err(Error::Precondition("Pietsch D needs a bounded argument".into()));
    }
    Ok(DSequence { inner: y })
}

/// `D` applied to a finite window; blocks beyond the window are unavailable.
pub fn pietsch_d_truncation(y: &Truncation) -> DSequence<TabulatedSequence> {
    DSequence {
        inner: TabulatedSequence::pointwise(y.values().to_vec()),
    }
}

impl<S: BlockSequence> DSequence<S> {
    pub fn inner(&self) -> &S {
        &self.inner
    }

    fn y(&self, n: usize) -> Result<f64> {
        self.inner
            .value_at(n as u64)
            .ok_or(Error::InsufficientBlocks {
                block: n,
                available: self.inner.available_blocks().unwrap_or(n),
            })
    }

    /// Pointwise values over blocks `0..n_blocks` (length `2^n_blocks - 1`).
    pub fn materialize(&self, n_blocks: usize) -> Result<Truncation> {
        if n_blocks > MAX_POINTWISE_BLOCK + 1 {
            return Err(Error::PointwiseRangeExceeded { block: n_blocks - 1 });
        }
        let mut v = Vec::with_capacity((1usize << n_blocks) - 1);
        for n in 0..n_blocks {
            let c = LN_2 * self.y(n)? / (1u64 << n) as f64;
            v.extend(std::iter::repeat_n(c, 1 << n));
        }
        Truncation::new(v)
    }
}

impl<S: BlockSequence> BlockSequence for DSequence<S> {
    fn granularity(&self) -> Granularity {
        Granularity::Both
    }

    fn value_at(&self, index: u64) -> Option<f64> {
        let n = block_of_index(index);
        let y = self.inner.value_at(n as u64)?;
        Some(LN_2 * y * (-(n as f64)).exp2())
    }

    fn block_sum_at(&self, block: usize) -> Result<f64> {
        Ok(LN_2 * self.y(block)?)
    }

    fn block_edge_weights(&self, block: usize) -> Option<(f64, f64)> {
        let y = self.inner.value_at(block as u64)?.abs() * LN_2;
        Some((y, y * (2.0 - (-(block as f64)).exp2())))
    }

    fn sup_bound(&self) -> f64 {
        LN_2 * self.inner.sup_bound()
    }

    fn available_blocks(&self) -> Option<usize> {
        // y is read pointwise: its length is the block count of Dy
        self.inner.pointwise_len().map(|n| n as usize)
    }

    fn label(&self) -> String {
        format!("D({})", self.inner.label())
    }
}

/// `Phi(x)_n = (1/log 2) * sum over block n`, for `n < n_blocks`.
///
/// Sequences without block aggregates are summed pointwise, which is refused
/// beyond block 29.
pub fn block_sums_phi(x: &dyn BlockSequence, n_blocks: usize) -> Result<Truncation> {
    if n_blocks == 0 {
        return Err(Error::EmptyTruncation);
    }
    if !x.granularity().has_blocks() && n_blocks > MAX_POINTWISE_BLOCK + 1 {
        return Err(Error::PointwiseRangeExceeded { block: n_blocks - 1 });
    }
    if let Some(available) = x.available_blocks() {
        if n_blocks > available {
            return Err(Error::InsufficientBlocks {
                block: n_blocks - 1,
                available,
            });
        }
    }
    let sums: Vec<f64> = (0..n_blocks)
        .into_par_iter()
        .map(|n| x.block_sum_at(n).map(|s| s / LN_2))
        .collect::<Result<_>>()?;
    Truncation::new(sums)
}

/// `(Cx)_n = (1/(n+1)) sum_{k<=n} x_k`.
pub fn cesaro(x: &Truncation) -> Truncation {
    let ps = prefix_sums(x.values(), x.mode());
    let v = ps
        .into_iter()
        .enumerate()
        .map(|(n, s)| s / (n as f64 + 1.0))
        .collect();
    x.derive(v).expect("finite input")
}

/// `C^m x`; `C^0` is the identity.
pub fn cesaro_iter(x: &Truncation, m: usize) -> Result<Truncation> {
    if m > MAX_CESARO_ITERATES {
        return Err(Error::TooManyIterates {
            m,
            max: MAX_CESARO_ITERATES,
        });
    }
    let mut y = x.clone();
    for _ in 0..m {
        y = cesaro(&y);
    }
    Ok(y)
}

/// `Cx` carried in double-double.
pub(crate) fn cesaro_dd(x: &[f64]) -> Vec<Dd> {
    prefix_sums_dd(x)
        .into_iter()
        .enumerate()
        .map(|(n, s)| s.div_f64(n as f64 + 1.0))
        .collect()
}

/// Step function with value `values[i]` on `[breakpoints[i], breakpoints[i+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    /// `cumulative[i] = integral from breakpoints[0] to breakpoints[i]`.
    cumulative: Vec<f64>,
}

impl PiecewiseConstantFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::Precondition(
                "need exactly one more breakpoint than values".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) || breakpoints[0] < 0.0 {
            return Err(Error::BadBreakpoints);
        }
        let mut cumulative = Vec::with_capacity(breakpoints.len());
        let mut acc = Dd::default();
        cumulative.push(0.0);
        for (i, &v) in values.iter().enumerate() {
            acc = acc.add_f64(v * (breakpoints[i + 1] - breakpoints[i]));
            cumulative.push(acc.to_f64());
        }
        Ok(PiecewiseConstantFunction {
            breakpoints,
            values,
            cumulative,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    fn check(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if !(t > lo && t <= hi) {
            return Err(Error::OutsideDomain { t, lo, hi });
        }
        Ok(())
    }

    /// Segment containing `t` (right endpoint maps to the last segment).
    fn segment(&self, t: f64) -> usize {
        let i = self.breakpoints.partition_point(|&b| b <= t);
        i.saturating_sub(1).min(self.values.len() - 1)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutsideDomain { t, lo, hi });
        }
        Ok(self.values[self.segment(t)])
    }

    /// `integral_{breakpoints[0]}^t f`.
    pub fn integral_to(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutsideDomain { t, lo, hi });
        }
        let i = self.segment(t);
        Ok(self.cumulative[i] + self.values[i] * (t - self.breakpoints[i]))
    }
}

/// `pi(x) = sum_n x_n chi_[n, n+1)` on `[0, N]`.
pub fn embed_pi(x: &Truncation) -> PiecewiseConstantFunction {
    let bp = (0..=x.len()).map(|i| i as f64).collect();
    PiecewiseConstantFunction::new(bp, x.values().to_vec()).expect("integer breakpoints")
}

/// `(Hf)(t) = (1/t) integral_0^t f` for `f` starting at 0.
pub fn hardy_h(f: &PiecewiseConstantFunction, t: f64) -> Result<f64> {
    f.check(t)?;
    if f.domain().0 != 0.0 {
        return Err(Error::Precondition("Hardy operator needs f on (0, T]".into()));
    }
    Ok(f.integral_to(t)? / t)
}

/// `(Mf)(t) = (1/log t) integral_1^t f(s) ds/s`, `t > 1`.
pub fn log_hardy_m(f: &PiecewiseConstantFunction, t: f64) -> Result<f64> {
    let (lo, hi) = f.domain();
    if !(t > 1.0 && t <= hi) || lo > 1.0 {
        return Err(Error::OutsideDomain { t, lo: lo.max(1.0), hi });
    }
    let mut acc = Dd::default();
    for (i, &v) in f.values.iter().enumerate() {
        let a = f.breakpoints[i].max(1.0);
        let b = f.breakpoints[i + 1].min(t);
        if b > a {
            acc = acc.add_f64(v * (b / a).ln());
        }
        if f.breakpoints[i + 1] >= t {
            break;
        }
    }
    Ok(acc.to_f64() / t.ln())
}

/// `(P_a f)(t) = f(t^a)`.
pub fn power_sub(f: &PiecewiseConstantFunction, a: f64, t: f64) -> Result<f64> {
    if !(a > 0.0) || !(t > 0.0) {
        return Err(Error::Precondition("P_a needs a > 0 and t > 0".into()));
    }
    f.eval(t.powf(a))
}

/// The running-sum decomposition of `z = x - D(Phi(x*))`.
#[derive(Debug, Clone)]
pub struct Aux1Decomposition {
    pub z: Truncation,
    pub u: Truncation,
    pub v: Truncation,
}

/// For nonnegative nonincreasing `x` covering whole blocks, returns `u, v >= 0`
/// with `z = u - v` and `v` a blockwise cyclic rotation of `u`. Within block
/// `n`, `u_k = sum_{i = 2^n - 1}^k z_i` and `v_k = u_{k-1}` (wrapping to the
/// block's last entry, which vanishes up to rounding).
pub fn aux1_decomposition(x: &Truncation) -> Result<Aux1Decomposition> {
    let xs = x.values();
    let n = xs.len();
    if let Some(i) = xs.iter().position(|&a| a < 0.0) {
        return Err(Error::Precondition(format!("negative entry at index {i}")));
    }
    if let Some(i) = xs.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::NotDecreasing { index: i + 1 });
    }
    if !(n + 1).is_power_of_two() {
        return Err(Error::IncompleteBlock { len: n });
    }
    let blocks = block_of_index(n as u64);
    let mut z = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    for b in 0..blocks {
        let (s, e) = (block_start(b) as usize, block_end(b) as usize);
        let block = &xs[s..=e];
        // D(Phi(x)) on block b is the block mean
        let mean = crate::summation::pairwise_sum(block) / block.len() as f64;
        let mut run = Dd::default();
        for k in s..=e {
            z[k] = xs[k] - mean;
            run = run.add_f64(z[k]);
            u[k] = run.to_f64().max(0.0);
        }
        v[s] = u[e];
        v[s + 1..=e].copy_from_slice(&u[s..e]);
    }
    Ok(Aux1Decomposition {
        z: x.derive(z)?,
        u: x.derive(u)?,
        v: x.derive(v)?,
    })
}
