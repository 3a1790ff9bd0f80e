//! Estimators standing in for functionals that cannot be constructed: the
//! interval swept by all Banach limits (sliding-window sup/inf over a
//! geometric ladder of window lengths), the almost-convergence test,
//! a plain tail-convergence probe and tail gaps of iterated Cesaro means.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::Truncation;
use crate::summation::{prefix_sums, SummationMode};
use crate::transforms::{cesaro, MAX_CESARO_ITERATES};

pub const DEFAULT_TOL: f64 = 0.02;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.75;
pub const DEFAULT_M_MAX: usize = 8;
/// Smallest window on the ladder.
pub const K_MIN: usize = 8;
/// Iterated-gap threshold for "gap tends to zero".
pub const DM_GAP_LIMIT: f64 = 0.1;
/// Fewest tail points on which the probe will decide.
const MIN_TAIL: usize = 16;

/// Largest ladder window used when none is requested:
/// `max(8, 2^floor(log2(log2 N)))`, capped at `N/4`.
pub fn default_k_max(n: usize) -> usize {
    let l = (n.max(2) as f64).log2();
    let k = 1usize << (l.log2().floor().max(0.0) as u32);
    // at least two rungs so reliability can be graded
    k.max(2 * K_MIN).min((n / 4).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reliability {
    Stable,
    StillDecreasing,
    HorizonLimited,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderPoint {
    pub k: usize,
    pub sup: f64,
    pub inf: f64,
}

/// Estimated range `[inf, sup]` of `B(x)` over all Banach limits `B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BanachInterval {
    pub sup_est: f64,
    pub inf_est: f64,
    pub k_ladder: Vec<usize>,
    /// Largest window start examined.
    pub m_horizon: usize,
    pub monotone_envelope: Vec<LadderPoint>,
    pub reliability: Reliability,
}

impl BanachInterval {
    pub fn gap(&self) -> f64 {
        self.sup_est - self.inf_est
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.sup_est + self.inf_est)
    }

    /// `[c, c]` with no window data.
    pub fn point(c: f64) -> Self {
        BanachInterval {
            sup_est: c,
            inf_est: c,
            k_ladder: Vec::new(),
            m_horizon: 0,
            monotone_envelope: Vec::new(),
            reliability: Reliability::Stable,
        }
    }

    /// Every bound multiplied by `s` (bounds swap when `s < 0`).
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        let (a, b) = (self.inf_est * s, self.sup_est * s);
        out.inf_est = a.min(b);
        out.sup_est = a.max(b);
        for p in &mut out.monotone_envelope {
            let (a, b) = (p.inf * s, p.sup * s);
            p.inf = a.min(b);
            p.sup = a.max(b);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuchestonConfig {
    /// Largest window length; `None` selects [`default_k_max`].
    pub k_max: Option<usize>,
    /// First admissible window start.
    pub burn_in: usize,
    pub tol: f64,
}

impl Default for SuchestonConfig {
    fn default() -> Self {
        SuchestonConfig {
            k_max: None,
            burn_in: 0,
            tol: DEFAULT_TOL,
        }
    }
}

impl SuchestonConfig {
    /// Defaults used by the classifier: window starts skip the first `N/16`.
    pub fn for_classification(n: usize, tol: f64) -> Self {
        SuchestonConfig {
            k_max: None,
            burn_in: n / 16,
            tol,
        }
    }
}

fn ladder(k_max: usize) -> Vec<usize> {
    if k_max < K_MIN {
        return vec![k_max];
    }
    let mut ks = Vec::new();
    let mut k = K_MIN;
    while k <= k_max {
        ks.push(k);
        k *= 2;
    }
    if *ks.last().unwrap() != k_max {
        ks.push(k_max);
    }
    ks
}

fn grade(env: &[LadderPoint], tol: f64, can_grow: bool) -> Reliability {
    if env.len() < 2 {
        return Reliability::HorizonLimited;
    }
    let (a, b) = (env[env.len() - 2], env[env.len() - 1]);
    if (a.sup - b.sup).abs() <= tol && (a.inf - b.inf).abs() <= tol {
        Reliability::Stable
    } else if can_grow {
        Reliability::StillDecreasing
    } else {
        Reliability::HorizonLimited
    }
}

/// Sliding-window sup/inf of `(1/k) sum_{i=m}^{m+k-1} x_i` over all starts
/// `m <= N - k`, for `k` on the ladder `8, 16, ..., k_max`.
pub fn sucheston_bounds(x: &Truncation, k_max: usize, tol: f64) -> Result<BanachInterval> {
    sucheston_bounds_with(
        x,
        &SuchestonConfig {
            k_max: Some(k_max),
            burn_in: 0,
            tol,
        },
    )
}

pub fn sucheston_bounds_with(x: &Truncation, cfg: &SuchestonConfig) -> Result<BanachInterval> {
    let n = x.len();
    let k_max = cfg.k_max.unwrap_or_else(|| default_k_max(n));
    if k_max == 0 || k_max > n / 4 {
        return Err(Error::WindowTooLarge { k_max, len: n });
    }
    if cfg.burn_in + k_max > n {
        return Err(Error::Precondition(format!(
            "burn-in {} leaves no window of length {k_max}",
            cfg.burn_in
        )));
    }
    let mut p = Vec::with_capacity(n + 1);
    p.push(0.0);
    p.extend(prefix_sums(x.values(), x.mode()));
    let ks = ladder(k_max);
    let env: Vec<LadderPoint> = ks
        .par_iter()
        .map(|&k| {
            let (mut sup, mut inf) = (f64::NEG_INFINITY, f64::INFINITY);
            let kf = k as f64;
            for m in cfg.burn_in..=n - k {
                let avg = (p[m + k] - p[m]) / kf;
                sup = sup.max(avg);
                inf = inf.min(avg);
            }
            LadderPoint { k, sup, inf }
        })
        .collect();
    let last = *env.last().unwrap();
    Ok(BanachInterval {
        sup_est: last.sup,
        inf_est: last.inf.min(last.sup),
        k_ladder: ks,
        m_horizon: n - k_max,
        reliability: grade(&env, cfg.tol, 8 * k_max <= n),
        monotone_envelope: env,
    })
}

/// A window `[start, start + len)` of block indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AnchoredWindow {
    pub start: usize,
    pub len: usize,
}

/// Window averages of a sequence that is evaluated only inside the requested
/// windows. Groups windows by length; each length is one ladder point, the
/// longest being the reported estimate.
pub fn anchored_window_bounds<F>(windows: &[AnchoredWindow], tol: f64, eval: F) -> Result<BanachInterval>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    if windows.is_empty() || windows.iter().any(|w| w.len == 0) {
        return Err(Error::Precondition("need at least one nonempty window".into()));
    }
    let avgs: Vec<(usize, f64)> = windows
        .par_iter()
        .map(|w| {
            let vals = (w.start..w.start + w.len)
                .map(&eval)
                .collect::<Result<Vec<f64>>>()?;
            Ok((w.len, crate::summation::pairwise_sum(&vals) / w.len as f64))
        })
        .collect::<Result<_>>()?;
    let mut ks: Vec<usize> = windows.iter().map(|w| w.len).collect();
    ks.sort_unstable();
    ks.dedup();
    let env: Vec<LadderPoint> = ks
        .iter()
        .map(|&k| {
            let (mut sup, mut inf) = (f64::NEG_INFINITY, f64::INFINITY);
            for &(l, a) in avgs.iter().filter(|(l, _)| *l == k) {
                debug_assert_eq!(l, k);
                sup = sup.max(a);
                inf = inf.min(a);
            }
            LadderPoint { k, sup, inf }
        })
        .collect();
    let last = *env.last().unwrap();
    Ok(BanachInterval {
        sup_est: last.sup,
        inf_est: last.inf,
        k_ladder: ks,
        m_horizon: windows.iter().map(|w| w.start).max().unwrap(),
        reliability: grade(&env, tol, false),
        monotone_envelope: env,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Convergent,
    Divergent,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceVerdict {
    pub status: Status,
    pub limit_est: Option<f64>,
    /// `max - min` over the inspected tail (or interval gap).
    pub osc_tail: f64,
    pub tail_min: f64,
    pub tail_max: f64,
}

/// Almost convergent iff the Sucheston interval is stable and no wider than
/// `cfg.tol`; the limit is its midpoint.
pub fn lorentz_test(x: &Truncation, k_max: usize, tol: f64) -> Result<(ConvergenceVerdict, BanachInterval)> {
    lorentz_test_with(
        x,
        &SuchestonConfig {
            k_max: Some(k_max),
            burn_in: 0,
            tol,
        },
    )
}

pub fn lorentz_test_with(
    x: &Truncation,
    cfg: &SuchestonConfig,
) -> Result<(ConvergenceVerdict, BanachInterval)> {
    let iv = sucheston_bounds_with(x, cfg)?;
    Ok((lorentz_verdict(&iv, cfg.tol), iv))
}

pub fn lorentz_verdict(iv: &BanachInterval, tol: f64) -> ConvergenceVerdict {
    let gap = iv.gap();
    let status = match (iv.reliability, gap <= tol) {
        (Reliability::Stable, true) => Status::Convergent,
        (Reliability::Stable, false) => Status::Divergent,
        _ => Status::Undecided,
    };
    ConvergenceVerdict {
        status,
        limit_est: (status == Status::Convergent).then(|| iv.midpoint()),
        osc_tail: gap,
        tail_min: iv.inf_est,
        tail_max: iv.sup_est,
    }
}

fn tail_start(n: usize, tail_fraction: f64) -> usize {
    let len = ((n as f64) * tail_fraction.clamp(0.0, 1.0)).round() as usize;
    n - len.min(n)
}

/// Convergent iff `max - min` over the trailing `tail_fraction` of indices is
/// at most `tol`; the limit is the tail mean.
pub fn convergence_probe(x: &Truncation, tail_fraction: f64, tol: f64) -> ConvergenceVerdict {
    let tail = &x.values()[tail_start(x.len(), tail_fraction)..];
    if tail.len() < MIN_TAIL {
        return ConvergenceVerdict {
            status: Status::Undecided,
            limit_est: None,
            osc_tail: f64::NAN,
            tail_min: f64::NAN,
            tail_max: f64::NAN,
        };
    }
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let osc = hi - lo;
    let convergent = osc <= tol;
    ConvergenceVerdict {
        status: if convergent { Status::Convergent } else { Status::Divergent },
        limit_est: convergent
            .then(|| crate::summation::pairwise_sum(tail) / tail.len() as f64),
        osc_tail: osc,
        tail_min: lo,
        tail_max: hi,
    }
}

/// Tail extremes of `C^m x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IteratedGap {
    pub m: usize,
    /// Tail extremes after removing the fitted origin response.
    pub liminf_est: f64,
    pub limsup_est: f64,
    /// Tail extremes of `C^m x` itself.
    pub raw_liminf: f64,
    pub raw_limsup: f64,
}

impl IteratedGap {
    pub fn gap(&self) -> f64 {
        self.limsup_est - self.liminf_est
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.limsup_est + self.liminf_est)
    }
}

/// Tail liminf/limsup of `C^m x` for `m = 0..=m_max`.
///
/// `C^m x` carries a slowly decaying response `c * C^m delta_0` to its own
/// initial segment. Per `m`, the tail is regressed on `[1, C^m delta_0]` and
/// the fitted multiple of `C^m delta_0` is removed before taking extremes.
/// Finitely supported perturbations do not move Cesaro-invariant limits.
pub fn iterated_cesaro_gap(x: &Truncation, m_max: usize, tail_fraction: f64) -> Result<Vec<IteratedGap>> {
    if m_max > MAX_CESARO_ITERATES {
        return Err(Error::TooManyIterates {
            m: m_max,
            max: MAX_CESARO_ITERATES,
        });
    }
    let n = x.len();
    let s = tail_start(n, tail_fraction);
    if n - s < MIN_TAIL {
        return Err(Error::Precondition(format!(
            "tail of {} points is too short",
            n - s
        )));
    }
    let mut delta = vec![0.0; n];
    delta[0] = 1.0;
    let mut d = Truncation::new(delta)?.with_mode(SummationMode::Compensated);
    let mut y = x.clone();
    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        if m > 0 {
            y = cesaro(&y);
            d = cesaro(&d);
        }
        let (t, b) = (&y.values()[s..], &d.values()[s..]);
        let len = t.len() as f64;
        let mt = t.iter().sum::<f64>() / len;
        let mb = b.iter().sum::<f64>() / len;
        let (mut sbb, mut sbt) = (0.0, 0.0);
        for (&ti, &bi) in t.iter().zip(b) {
            sbb += (bi - mb) * (bi - mb);
            sbt += (bi - mb) * (ti - mt);
        }
        let slope = if sbb > 0.0 { sbt / sbb } else { 0.0 };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut rlo, mut rhi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (&ti, &bi) in t.iter().zip(b) {
            let r = ti - slope * bi;
            lo = lo.min(r);
            hi = hi.max(r);
            rlo = rlo.min(ti);
            rhi = rhi.max(ti);
        }
        out.push(IteratedGap {
            m,
            liminf_est: lo,
            limsup_est: hi,
            raw_liminf: rlo,
            raw_limsup: rhi,
        });
    }
    Ok(out)
}

/// Verdict for "the iterated gap tends to zero": the last gap is at most
/// [`DM_GAP_LIMIT`] and the last three gaps are non-increasing or all within
/// `tol`. The value is the midpoint at the `m` with the smallest gap (first
/// on ties): every Cesaro-invariant limit agrees on all `C^m x`, and higher
/// iterates amplify slowly decaying transients.
pub fn dm_verdict(gaps: &[IteratedGap], tol: f64) -> ConvergenceVerdict {
    let Some(last) = gaps.last() else {
        return ConvergenceVerdict {
            status: Status::Undecided,
            limit_est: None,
            osc_tail: f64::NAN,
            tail_min: f64::NAN,
            tail_max: f64::NAN,
        };
    };
    let tail: Vec<f64> = gaps.iter().rev().take(3).rev().map(IteratedGap::gap).collect();
    let shrinking = tail.windows(2).all(|w| w[1] <= w[0]);
    let small = tail.iter().all(|&g| g <= tol);
    let status = if tail.len() < 3 {
        Status::Undecided
    } else if last.gap() <= DM_GAP_LIMIT && (shrinking || small) {
        Status::Convergent
    } else if last.gap() > DM_GAP_LIMIT && !shrinking {
        Status::Divergent
    } else {
        Status::Undecided
    };
    let best = gaps
        .iter()
        .min_by(|a, b| a.gap().total_cmp(&b.gap()))
        .unwrap_or(last);
    ConvergenceVerdict {
        status,
        limit_est: (status == Status::Convergent).then(|| best.midpoint()),
        osc_tail: best.gap(),
        tail_min: best.liminf_est,
        tail_max: best.limsup_est,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::shift_right;
    use proptest::prelude::*;

    fn x_alt(n: usize) -> Truncation {
        Truncation::from_fn(n, |k| {
            if k <= 1 || (usize::BITS - 1 - (k - 1).leading_zeros()) % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .unwrap()
    }

    fn y_dif1(n: usize) -> Truncation {
        Truncation::from_fn(n, |k| {
            if k < 2 {
                return 1.0;
            }
            let j = usize::BITS - 1 - k.leading_zeros();
            if k - (1 << j) <= j as usize { 2.0 } else { 1.0 }
        })
        .unwrap()
    }

    /// Brute-force window sweep without prefix sums.
    fn brute(x: &[f64], k: usize) -> (f64, f64) {
        let (mut hi, mut lo) = (f64::MIN, f64::MAX);
        for m in 0..=x.len() - k {
            let a: f64 = x[m..m + k].iter().sum::<f64>() / k as f64;
            hi = hi.max(a);
            lo = lo.min(a);
        }
        (lo, hi)
    }

    #[test]
    fn ladder_shape() {
        assert_eq!(ladder(64), vec![8, 16, 32, 64]);
        assert_eq!(ladder(40), vec![8, 16, 32, 40]);
        assert_eq!(ladder(4), vec![4]);
        assert_eq!(default_k_max(1 << 20), 16);
        assert_eq!(default_k_max(1 << 16), 16);
        assert_eq!(default_k_max(1 << 8), 16);
        assert_eq!(default_k_max(32), 8);
    }

    #[test]
    fn constant_interval() {
        let one = Truncation::new(vec![1.0; 1024]).unwrap();
        let iv = sucheston_bounds(&one, 64, 0.02).unwrap();
        assert_eq!((iv.inf_est, iv.sup_est), (1.0, 1.0));
        assert_eq!(iv.reliability, Reliability::Stable);
    }

    #[test]
    fn alternating_dyadic_interval() {
        let x = x_alt(1 << 16);
        let iv = sucheston_bounds(&x, 64, 0.02).unwrap();
        let (lo, hi) = brute(x.values(), 64);
        assert!((iv.inf_est - lo).abs() < 1e-12 && (iv.sup_est - hi).abs() < 1e-12);
        assert!((iv.inf_est + 1.0).abs() < 1e-12 && (iv.sup_est - 1.0).abs() < 1e-12);
    }

    #[test]
    fn y_dif1_interval_and_lorentz() {
        let y = y_dif1(1 << 16);
        let (v, iv) = lorentz_test(&y, 16, 0.02).unwrap();
        let (lo, hi) = brute(y.values(), 16);
        assert!((iv.inf_est - lo).abs() < 1e-12 && (iv.sup_est - hi).abs() < 1e-12);
        assert!((iv.inf_est - 1.0).abs() < 1e-12 && (iv.sup_est - 2.0).abs() < 1e-12);
        assert_eq!(v.status, Status::Divergent);
        assert!(v.osc_tail > 0.9);
    }

    #[test]
    fn lorentz_on_convergent_and_periodic() {
        let x = Truncation::from_fn(1 << 14, |n| 0.3 + 1.0 / (n as f64 + 1.0)).unwrap();
        let cfg = SuchestonConfig::for_classification(x.len(), 0.02);
        let (v, _) = lorentz_test_with(&x, &cfg).unwrap();
        assert_eq!(v.status, Status::Convergent);
        assert!((v.limit_est.unwrap() - 0.3).abs() < 0.01);

        let p = Truncation::from_fn(1 << 12, |n| ((n + 1) % 2) as f64).unwrap();
        let (v, iv) = lorentz_test(&p, 64, 0.02).unwrap();
        assert_eq!(v.status, Status::Convergent);
        assert!((v.limit_est.unwrap() - 0.5).abs() < 1e-12);
        for pt in &iv.monotone_envelope {
            assert!(pt.sup - 0.5 <= 0.5 / pt.k as f64 + 1e-12);
        }
    }

    #[test]
    fn errors() {
        let x = Truncation::new(vec![1.0; 32]).unwrap();
        assert!(matches!(
            sucheston_bounds(&x, 16, 0.02),
            Err(Error::WindowTooLarge { k_max: 16, len: 32 })
        ));
        assert!(iterated_cesaro_gap(&x, 13, 0.75).is_err());
    }

    #[test]
    fn probe_examples() {
        let c = Truncation::new(vec![2.5; 100]).unwrap();
        let v = convergence_probe(&c, 0.75, 0.02);
        assert_eq!(v.status, Status::Convergent);
        assert_eq!(v.osc_tail, 0.0);
        assert_eq!(v.limit_est, Some(2.5));
        let short = Truncation::new(vec![1.0; 10]).unwrap();
        assert_eq!(convergence_probe(&short, 0.75, 0.02).status, Status::Undecided);
    }

    #[test]
    fn probe_on_cesaro_of_y_dif1() {
        let y = y_dif1(1 << 20);
        let v = convergence_probe(&cesaro(&y), 0.75, 0.02);
        assert_eq!(v.status, Status::Convergent);
        assert!((v.limit_est.unwrap() - 1.0).abs() < 0.02);
    }

    #[test]
    fn iterated_gap_on_alternation() {
        let x = x_alt(1 << 18);
        let g = iterated_cesaro_gap(&x, 8, 0.75).unwrap();
        assert_eq!(g.len(), 9);
        assert!(g[0].gap() > 1.9);
        assert!(g[8].gap() < 0.1, "{:?}", g[8]);
        assert!(g[8].midpoint().abs() < 0.03);
        assert_eq!(dm_verdict(&g, 0.02).status, Status::Convergent);
    }

    #[test]
    fn iterated_gap_on_convergent() {
        let x = Truncation::from_fn(1 << 14, |n| 2.0 + 1.0 / (n as f64 + 1.0)).unwrap();
        let g = iterated_cesaro_gap(&x, 4, 0.75).unwrap();
        for it in &g {
            assert!(it.gap() < 0.01 && (it.midpoint() - 2.0).abs() < 0.01);
        }
    }

    #[test]
    fn horizon_growth_never_lowers_sup() {
        let x = y_dif1(1 << 14);
        let short = Truncation::new(x.values()[..1 << 13].to_vec()).unwrap();
        let a = sucheston_bounds(&short, 32, 0.02).unwrap();
        let b = sucheston_bounds(&x, 32, 0.02).unwrap();
        for (p, q) in a.monotone_envelope.iter().zip(&b.monotone_envelope) {
            assert!(q.sup >= p.sup && q.inf <= p.inf);
        }
    }

    #[test]
    fn anchored_windows() {
        let w = [
            AnchoredWindow { start: 10, len: 4 },
            AnchoredWindow { start: 100, len: 4 },
            AnchoredWindow { start: 3, len: 8 },
        ];
        let iv = anchored_window_bounds(&w, 0.02, |m| Ok(m as f64)).unwrap();
        assert_eq!(iv.k_ladder, vec![4, 8]);
        assert_eq!(iv.monotone_envelope[0].sup, 101.5);
        assert_eq!(iv.sup_est, 6.5);
    }

    proptest! {
        #[test]
        fn shift_invariance(x in prop::collection::vec(-1.0f64..1.0, 256..512)) {
            let xt = Truncation::new(x).unwrap();
            let a = sucheston_bounds(&xt, 32, 0.02).unwrap();
            let b = sucheston_bounds(&shift_right(&xt), 32, 0.02).unwrap();
            let slack = 2.0 * xt.sup_norm() * 32.0 / xt.len() as f64;
            prop_assert!((a.sup_est - b.sup_est).abs() <= slack + 1e-12);
            prop_assert!((a.inf_est - b.inf_est).abs() <= slack + 1e-12);
        }

        #[test]
        fn sandwich(c in -3.0f64..3.0, amp in 0.0f64..1.0) {
            let x = Truncation::from_fn(4096, |n| c + amp / (n as f64 + 1.0)).unwrap();
            let p = convergence_probe(&x, 0.75, 0.02);
            let iv = sucheston_bounds(&x, 64, 0.02).unwrap();
            prop_assert_eq!(p.status, Status::Convergent);
            let l = p.limit_est.unwrap();
            prop_assert!(iv.inf_est - 1e-12 <= l && l <= iv.sup_est + 1e-12);
        }

        #[test]
        fn window_sweep_matches_brute(x in prop::collection::vec(-2.0f64..2.0, 64..200)) {
            let xt = Truncation::new(x.clone()).unwrap();
            let iv = sucheston_bounds(&xt, 16, 0.02).unwrap();
            let (lo, hi) = brute(&x, 16);
            prop_assert!((iv.inf_est - lo).abs() < 1e-12 && (iv.sup_est - hi).abs() < 1e-12);
        }
    }
}
