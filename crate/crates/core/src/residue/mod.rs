//! Residues and trace intervals of radial model symbols
//! `p(x, s) = |phi(x)|^2 q(|s|)`.
//!
//! Every radial integral is taken in `z = log r`, where
//! `integral q(r) r^{d-1} dr = integral q(e^z) e^{dz} dz`. The lower cutoff is
//! `max(r_min, 4)`.

mod anchor;
mod quadrature;

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::Serialize;

pub use anchor::{anchor_z, anchor_z_phase, solve_z_over_log_z};
pub use quadrature::{adaptive_simpson, integrate_pieces, Quadrature};

use crate::bounds::{
    anchored_window_bounds, convergence_probe, lorentz_verdict, sucheston_bounds_with,
    AnchoredWindow, BanachInterval, ConvergenceVerdict, SuchestonConfig, DEFAULT_TAIL_FRACTION,
    DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::sequence::{BlockSequence, CsvSequence, Granularity, Truncation};
use crate::transforms::cesaro;

/// Absolute quadrature tolerance per block.
pub const BLOCK_TOL: f64 = 1e-9;
/// Smallest lower limit of every radial integral.
pub const R_CUTOFF: f64 = 4.0;
/// Longest quadrature piece in `z`.
const PIECE: f64 = 1.0;
/// Tail integrals in `z` are cut where `e^{-d(z - z0)}` drops below `e^{-TAIL_SPAN}`.
const TAIL_SPAN: f64 = 40.0;

/// `Vol(S^{d-1}) = 2 pi^{d/2} / Gamma(d/2)`.
pub fn sphere_volume(d: u32) -> f64 {
    // Gamma(d/2) by the half-integer recursion
    let mut g = if d.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if d.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x + 0.5 < f64::from(d) / 2.0 {
        g *= x;
        x += 1.0;
    }
    2.0 * PI.powf(f64::from(d) / 2.0) / g
}

/// Radial profile `q(r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadialProfile {
    /// `r^{-d} sin(log r / log log r)`.
    QExample,
    /// `r^{-p}`.
    InversePower { p: f64 },
    Zero,
    /// Samples `(log r_i, q_i)`, linear in `log r`, zero outside.
    Tabulated { z: Vec<f64>, q: Vec<f64> },
}

impl RadialProfile {
    /// Reads `r,q` lines (same CSV dialect as user sequences).
    pub fn from_csv_path(path: &std::path::Path) -> Result<Self> {
        let c = CsvSequence::from_path(path)?;
        let q = c.im.ok_or_else(|| Error::Parse {
            line: 1,
            message: "profile needs `r,q` pairs".into(),
        })?;
        let z: Vec<f64> = c
            .re
            .iter()
            .map(|&r| {
                if r > 0.0 {
                    Ok(r.ln())
                } else {
                    Err(Error::Precondition("profile radii must be positive".into()))
                }
            })
            .collect::<Result<_>>()?;
        if z.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::BadBreakpoints);
        }
        Ok(RadialProfile::Tabulated { z, q })
    }

    fn q_at_z(&self, z: f64, d: u32) -> f64 {
        match self {
            RadialProfile::QExample => (-(f64::from(d)) * z).exp() * (z / z.ln()).sin(),
            RadialProfile::InversePower { p } => (-p * z).exp(),
            RadialProfile::Zero => 0.0,
            RadialProfile::Tabulated { z: zs, q } => {
                if z < zs[0] || z > *zs.last().unwrap() {
                    return 0.0;
                }
                let i = zs.partition_point(|&a| a <= z).clamp(1, zs.len() - 1);
                let t = (z - zs[i - 1]) / (zs[i] - zs[i - 1]);
                q[i - 1] + t * (q[i] - q[i - 1])
            }
        }
    }
}

/// `integral_a^b f` over `[a, b]` intersected with the table range, one
/// quadrature run per knot interval so every piece is smooth.
fn integrate_between_knots<F: Fn(f64) -> f64>(f: &F, knots: &[f64], a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    let (lo, hi) = (a.max(knots[0]), b.min(*knots.last().unwrap()));
    if hi <= lo {
        return Ok(Quadrature::default());
    }
    let mut edges = vec![lo];
    edges.extend(knots.iter().copied().filter(|&k| k > lo && k < hi));
    edges.push(hi);
    // tolerance shared in proportion to length
    let mut total = Quadrature::default();
    for w in edges.windows(2) {
        let t = tol * (w[1] - w[0]) / (hi - lo);
        total = total + integrate_pieces(f, w[0], w[1], PIECE, t)?;
    }
    Ok(total)
}

/// Radial symbol `W q(|s|)` on `R^d`, `W = integral |phi|^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSymbol {
    pub d: u32,
    pub profile: RadialProfile,
    pub r_min: f64,
    pub x_weight: f64,
    pub label: String,
}

impl RadialSymbol {
    /// `W` defaults to `1 / Vol(S^{d-1})`, cancelling the surface factor.
    pub fn new(d: u32, profile: RadialProfile, r_min: f64, label: impl Into<String>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("dimension must be positive".into()));
        }
        if !(r_min > 0.0) {
            return Err(Error::Precondition("r_min must be positive".into()));
        }
        Ok(RadialSymbol {
            d,
            profile,
            r_min,
            x_weight: 1.0 / sphere_volume(d),
            label: label.into(),
        })
    }

    pub fn with_x_weight(mut self, w: f64) -> Self {
        self.x_weight = w;
        self
    }

    /// `W Vol(S^{d-1})`.
    pub fn scale(&self) -> f64 {
        self.x_weight * sphere_volume(self.d)
    }

    /// `log max(r_min, 4)`.
    pub fn z_lo(&self) -> f64 {
        self.r_min.max(R_CUTOFF).ln()
    }

    /// Radial integrand in `z`: `q(e^z) e^{dz}`.
    pub fn integrand(&self, z: f64) -> f64 {
        match self.profile {
            RadialProfile::QExample => (z / z.ln()).sin(),
            RadialProfile::InversePower { p } => ((f64::from(self.d) - p) * z).exp(),
            _ => self.profile.q_at_z(z, self.d) * (f64::from(self.d) * z).exp(),
        }
    }

    /// `W Vol(S^{d-1}) integral_{z_a}^{z_b} q(e^z) e^{dz} dz`, clipped below
    /// at [`Self::z_lo`].
    pub fn radial_integral(&self, za: f64, zb: f64, tol: f64) -> Result<Quadrature> {
        let a = za.max(self.z_lo());
        if zb <= a {
            return Ok(Quadrature::default());
        }
        let s = self.scale();
        let q = match self.profile {
            RadialProfile::Zero => Quadrature::default(),
            RadialProfile::InversePower { p } => {
                let c = f64::from(self.d) - p;
                let v = if c == 0.0 {
                    zb - a
                } else {
                    ((c * zb).exp() - (c * a).exp()) / c
                };
                Quadrature {
                    value: v,
                    error: 0.0,
                    evaluations: 0,
                }
            }
            _ => self.integrate_smooth(a, zb, tol / s.max(1e-300))?,
        };
        Ok(Quadrature {
            value: s * q.value,
            error: s * q.error,
            evaluations: q.evaluations,
        })
    }

    /// Unscaled integral of the integrand; tables are split at their knots.
    fn integrate_smooth(&self, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
        let f = |z| self.integrand(z);
        match &self.profile {
            RadialProfile::Tabulated { z: knots, .. } => integrate_between_knots(&f, knots, a, b, tol),
            _ => integrate_pieces(&f, a, b, PIECE, tol),
        }
    }

    /// Contribution of `[r_min, 4)` dropped by the cutoff.
    pub fn clipping_constant(&self, tol: f64) -> Result<f64> {
        if self.r_min >= R_CUTOFF {
            return Ok(0.0);
        }
        let (a, b) = (self.r_min.ln(), R_CUTOFF.ln());
        let v = match self.profile {
            RadialProfile::Zero => 0.0,
            // log log r is undefined below r = e
            RadialProfile::QExample => return Ok(f64::NAN),
            _ => self.integrate_smooth(a, b, tol)?.value,
        };
        Ok((self.scale() * v).abs())
    }

    /// Block `n` in `z`: `[(n/d) log 2, ((n+1)/d) log 2]`.
    pub fn block_bounds(&self, n: usize) -> (f64, f64) {
        let d = f64::from(self.d);
        (n as f64 * LN_2 / d, (n as f64 + 1.0) * LN_2 / d)
    }
}

/// The symbol whose residue vanishes while positive traces disagree.
pub fn q_example(d: u32) -> Result<RadialSymbol> {
    RadialSymbol::new(d, RadialProfile::QExample, R_CUTOFF, format!("q-example(d={d})"))
}

/// `q(r) = r^{-p}` with `r_min = 4`.
pub fn inverse_power(d: u32, p: f64) -> Result<RadialSymbol> {
    RadialSymbol::new(d, RadialProfile::InversePower { p }, R_CUTOFF, format!("inverse-power(d={d}, p={p})"))
}

/// `Res_n = (1/log(2+n)) integral_{|s| <= n^{1/d}} p`, with the largest
/// quadrature error bound over the grid.
pub fn res_sequence(sym: &RadialSymbol, n_grid: &[f64]) -> Result<(Truncation, f64)> {
    if n_grid.is_empty() {
        return Err(Error::EmptyTruncation);
    }
    if n_grid.windows(2).any(|w| !(w[0] < w[1])) || n_grid[0] <= 0.0 {
        return Err(Error::Precondition("n grid must be positive and increasing".into()));
    }
    let d = f64::from(sym.d);
    let zs: Vec<f64> = n_grid.iter().map(|n| n.ln() / d).collect();
    // consecutive segments are independent
    let segs: Vec<Quadrature> = (0..zs.len())
        .into_par_iter()
        .map(|i| {
            let a = if i == 0 { sym.z_lo() } else { zs[i - 1] };
            sym.radial_integral(a, zs[i], BLOCK_TOL)
        })
        .collect::<Result<_>>()?;
    let mut acc = Quadrature::default();
    let mut out = Vec::with_capacity(zs.len());
    let mut err: f64 = 0.0;
    for (q, n) in segs.into_iter().zip(n_grid) {
        acc = acc + q;
        out.push(acc.value / (2.0 + n).ln());
        err = err.max(acc.error / (2.0 + n).ln());
    }
    Ok((Truncation::new(out)?, err))
}

/// `Res_{2^{N+1}}` for `N < len`: prefix sums of block integrals over
/// `log(2 + 2^{N+1})`, the latter evaluated without overflow.
pub fn res_dyadic(block_integrals: &Truncation) -> Result<Truncation> {
    let ps = crate::summation::prefix_sums(block_integrals.values(), crate::SummationMode::Compensated);
    let v = ps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let big_n = (i + 1) as f64;
            s / (big_n * LN_2 + (1.0 - big_n).exp2().ln_1p())
        })
        .collect();
    Truncation::new(v)
}

/// Block integrals `I_n` for `n < n_blocks` and their error bounds.
pub fn block_integrals(sym: &RadialSymbol, n_blocks: usize) -> Result<(Truncation, Vec<f64>)> {
    let qs: Vec<Quadrature> = (0..n_blocks)
        .into_par_iter()
        .map(|n| {
            let (a, b) = sym.block_bounds(n);
            sym.radial_integral(a, b, BLOCK_TOL)
        })
        .collect::<Result<_>>()?;
    let errs = qs.iter().map(|q| q.error).collect();
    Ok((Truncation::new(qs.iter().map(|q| q.value).collect())?, errs))
}

/// `I_n` evaluated lazily, as a block-only sequence.
#[derive(Debug, Clone)]
pub struct BlockIntegralSequence {
    sym: RadialSymbol,
}

impl BlockIntegralSequence {
    pub fn new(sym: RadialSymbol) -> Self {
        BlockIntegralSequence { sym }
    }
}

impl BlockSequence for BlockIntegralSequence {
    fn granularity(&self) -> Granularity {
        Granularity::BlockOnly
    }

    fn block_sum_at(&self, n: usize) -> Result<f64> {
        let (a, b) = self.sym.block_bounds(n);
        Ok(self.sym.radial_integral(a, b, BLOCK_TOL)?.value)
    }

    fn label(&self) -> String {
        format!("block-integrals({})", self.sym.label)
    }
}

/// Result of the Laplacian-modulation growth check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulatedCheck {
    /// Fitted growth exponent of `sup_{t' <= t} F(t')`; infinite when the
    /// tail integral diverges.
    pub exponent: f64,
    pub pass: bool,
    pub tail_divergent: bool,
    /// `log F(t)` on the grid (`-inf` where `F = 0`).
    pub log_f: Vec<f64>,
}

/// `log(e^{d z0} integral_{z0}^inf q(e^z)^2 e^{dz} dz)`, or `None` when the
/// integral vanishes. Errors with [`Error::TailDivergent`].
fn scaled_tail(sym: &RadialSymbol, z0: f64) -> Result<Option<f64>> {
    let d = f64::from(sym.d);
    let s = match &sym.profile {
        RadialProfile::Zero => return Ok(None),
        RadialProfile::InversePower { p } => {
            // integral_{z0}^inf e^{(d - 2p) z} dz
            let c = 2.0 * p - d;
            if c <= 0.0 {
                return Err(Error::TailDivergent);
            }
            return Ok(Some((d - 2.0 * p) * z0 - c.ln() + d * z0));
        }
        RadialProfile::QExample => {
            let z0 = z0.max(sym.z_lo());
            let f = |z: f64| (-d * (z - z0)).exp() * (z / z.ln()).sin().powi(2);
            let q = integrate_pieces(&f, z0, z0 + TAIL_SPAN / d, PIECE, 1e-10)?;
            q.value.max(0.0)
        }
        RadialProfile::Tabulated { z, .. } => {
            let hi = *z.last().unwrap();
            if z0 >= hi {
                return Ok(None);
            }
            let f = |w: f64| {
                let q = sym.profile.q_at_z(w, sym.d);
                q * q * (d * (w - z0)).exp()
            };
            let v = integrate_between_knots(&f, z, z0, hi, 1e-10)?.value;
            return Ok((v > 0.0).then(|| v.ln() + 2.0 * d * z0));
        }
    };
    Ok((s > 0.0).then(|| s.ln()))
}

/// `F(t) = (1+t)^{d/2} (W Vol(S^{d-1}) integral_{r>t} q^2 r^{d-1} dr)^{1/2}`
/// on `t_grid`; the exponent is the least-squares slope of
/// `log max_{t' <= t} F(t')` against `log t` over the upper half of the grid.
pub fn modulated_check(sym: &RadialSymbol, t_grid: &[f64]) -> Result<ModulatedCheck> {
    if t_grid.len() < 4 || t_grid.windows(2).any(|w| !(w[0] < w[1])) || t_grid[0] <= 0.0 {
        return Err(Error::Precondition("t grid needs >= 4 increasing positive points".into()));
    }
    let d = f64::from(sym.d);
    let ls = sym.scale().ln();
    let mut log_f = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let z0 = t.ln();
        match scaled_tail(sym, z0) {
            Err(Error::TailDivergent) => {
                return Ok(ModulatedCheck {
                    exponent: f64::INFINITY,
                    pass: false,
                    tail_divergent: true,
                    log_f: Vec::new(),
                })
            }
            Err(e) => return Err(e),
            // log tail = scaled - d z0
            Ok(Some(lt)) => {
                log_f.push(0.5 * d * t.ln_1p() + 0.5 * (ls + lt - d * z0));
            }
            Ok(None) => log_f.push(f64::NEG_INFINITY),
        }
    }
    let mut run = f64::NEG_INFINITY;
    let envelope: Vec<f64> = log_f
        .iter()
        .map(|&v| {
            run = run.max(v);
            run
        })
        .collect();
    let half = t_grid.len() / 2;
    let pts: Vec<(f64, f64)> = t_grid[half..]
        .iter()
        .zip(&envelope[half..])
        .filter(|(_, v)| v.is_finite())
        .map(|(t, &v)| (t.ln(), v))
        .collect();
    let exponent = if pts.len() < 2 {
        0.0
    } else {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        sxy / sxx
    };
    Ok(ModulatedCheck {
        exponent,
        pass: exponent <= 0.05,
        tail_divergent: false,
        log_f,
    })
}

/// Default `t` grid: 64 points geometric in `log t` from the cutoff to `e^200`.
pub fn default_t_grid(sym: &RadialSymbol) -> Vec<f64> {
    let (a, b) = (sym.z_lo(), 200.0);
    (0..64).map(|i| (a + (b - a) * i as f64 / 63.0).exp()).collect()
}

/// Peak and trough windows for each anchor `n`: start
/// `floor(z * d / log 2)`, length `n`.
pub fn anchor_windows(d: u32, anchors: &[u32]) -> Result<Vec<AnchoredWindow>> {
    let mut out = Vec::with_capacity(2 * anchors.len());
    for &n in anchors {
        for phase in [PI / 2.0, -PI / 2.0] {
            let z = anchor_z_phase(n, phase)?;
            out.push(AnchoredWindow {
                start: (z * f64::from(d) / LN_2).floor() as usize,
                len: n as usize,
            });
        }
    }
    Ok(out)
}

/// Which block-integral windows the trace interval is estimated from.
#[derive(Debug, Clone, PartialEq)]
pub enum WindowSpec {
    /// Every window start over `n_blocks` blocks.
    Full { n_blocks: usize, k_max: Option<usize> },
    /// Only the listed windows are integrated.
    Anchored(Vec<AnchoredWindow>),
}

/// `(2 pi)^d`, the Fourier normalisation in the trace formula.
pub fn default_fourier_factor(d: u32) -> f64 {
    (2.0 * PI).powi(d as i32)
}

/// Interval of the unnormalised block integrals over the requested windows.
pub fn block_integral_interval(sym: &RadialSymbol, windows: &WindowSpec) -> Result<BanachInterval> {
    match windows {
        WindowSpec::Full { n_blocks, k_max } => {
            let (i, _) = block_integrals(sym, *n_blocks)?;
            let cfg = SuchestonConfig {
                k_max: *k_max,
                burn_in: n_blocks / 16,
                tol: DEFAULT_TOL,
            };
            sucheston_bounds_with(&i, &cfg)
        }
        WindowSpec::Anchored(ws) => {
            let seq = BlockIntegralSequence::new(sym.clone());
            anchored_window_bounds(ws, DEFAULT_TOL, |m| seq.block_sum_at(m))
        }
    }
}

/// Trace interval `[inf, sup] / (fourier_factor * log 2)` of block integrals.
pub fn symbol_trace_interval(
    sym: &RadialSymbol,
    windows: &WindowSpec,
    fourier_factor: Option<f64>,
) -> Result<BanachInterval> {
    let f = fourier_factor.unwrap_or_else(|| default_fourier_factor(sym.d));
    Ok(block_integral_interval(sym, windows)?.scaled(1.0 / (f * LN_2)))
}

/// Settings of a residue run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidueConfig {
    pub n_blocks: usize,
    pub n_grid: Vec<f64>,
    pub anchors: Vec<u32>,
    pub t_grid: Option<Vec<f64>>,
    pub tol: f64,
    pub fourier_factor: Option<f64>,
}

impl Default for ResidueConfig {
    fn default() -> Self {
        ResidueConfig {
            n_blocks: 1 << 16,
            n_grid: (0..=60).map(|i| 10f64.powf(3.0 + i as f64 / 20.0)).collect(),
            anchors: vec![3, 4],
            t_grid: None,
            tol: DEFAULT_TOL,
            fourier_factor: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidueReport {
    pub label: String,
    pub d: u32,
    pub n_grid: Vec<f64>,
    pub res_seq: Truncation,
    /// Verdict on `Res_{2^N}`, `N` over the block horizon.
    pub res_scalar: ConvergenceVerdict,
    /// `d * Res`, the classical residue normalisation.
    pub res_wodzicki: Option<f64>,
    pub block_integrals: Truncation,
    /// Tail of the Cesaro means of the block integrals.
    pub cesaro_block_integrals: ConvergenceVerdict,
    /// Almost convergence of the block integrals.
    pub block_almost_convergence: ConvergenceVerdict,
    /// Normalised trace interval over all windows of the block horizon.
    pub trace_interval: BanachInterval,
    /// Unnormalised block-integral interval over anchor windows.
    pub anchor_interval: Option<BanachInterval>,
    pub modulated_exponent: f64,
    pub modulated_pass: bool,
    /// Largest per-block quadrature error bound.
    pub quadrature_error_bound: f64,
    pub res_error_bound: f64,
    pub clipping_constant: f64,
}

/// Runs the whole residue pipeline.
pub fn residue_report(sym: &RadialSymbol, cfg: &ResidueConfig) -> Result<ResidueReport> {
    if cfg.n_blocks < 64 {
        return Err(Error::Precondition("residue runs need at least 64 blocks".into()));
    }
    let (res_seq, res_err) = res_sequence(sym, &cfg.n_grid)?;
    let (ints, errs) = block_integrals(sym, cfg.n_blocks)?;
    let quad_err = errs.iter().copied().fold(0.0, f64::max);

    let res_scalar = convergence_probe(&res_dyadic(&ints)?, DEFAULT_TAIL_FRACTION, cfg.tol);

    let cesaro_tail = convergence_probe(&cesaro(&ints), DEFAULT_TAIL_FRACTION, cfg.tol);
    let full = sucheston_bounds_with(
        &ints,
        &SuchestonConfig {
            k_max: None,
            burn_in: cfg.n_blocks / 16,
            tol: cfg.tol,
        },
    )?;
    let almost = lorentz_verdict(&full, cfg.tol);
    let f = cfg.fourier_factor.unwrap_or_else(|| default_fourier_factor(sym.d));
    let trace_interval = full.scaled(1.0 / (f * LN_2));
    let anchor_interval = if cfg.anchors.is_empty() {
        None
    } else {
        Some(block_integral_interval(
            sym,
            &WindowSpec::Anchored(anchor_windows(sym.d, &cfg.anchors)?),
        )?)
    };
    let t_grid = cfg.t_grid.clone().unwrap_or_else(|| default_t_grid(sym));
    let m = modulated_check(sym, &t_grid)?;
    Ok(ResidueReport {
        label: sym.label.clone(),
        d: sym.d,
        n_grid: cfg.n_grid.clone(),
        res_seq,
        res_wodzicki: res_scalar.limit_est.map(|r| f64::from(sym.d) * r),
        res_scalar,
        block_integrals: ints,
        cesaro_block_integrals: cesaro_tail,
        block_almost_convergence: almost,
        trace_interval,
        anchor_interval,
        modulated_exponent: m.exponent,
        modulated_pass: m.pass,
        quadrature_error_bound: quad_err,
        res_error_bound: res_err,
        clipping_constant: sym.clipping_constant(BLOCK_TOL)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(1) - 2.0).abs() < 1e-15);
        assert!((sphere_volume(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn inverse_power_blocks_are_log2_over_d() {
        for d in [1, 2, 4] {
            let s = inverse_power(d, f64::from(d)).unwrap();
            let (i, _) = block_integrals(&s, 64).unwrap();
            for (n, &v) in i.values().iter().enumerate() {
                // blocks below r = 4 are clipped away
                let (a, b) = s.block_bounds(n);
                let lo = a.max(s.z_lo());
                let expect = (b - lo).max(0.0);
                assert!((v - expect).abs() < 1e-14, "d={d} n={n}");
                if n >= 2 * d as usize {
                    assert!((v - LN_2 / f64::from(d)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn inverse_power_residue_is_one_over_d() {
        for d in [1u32, 2, 4] {
            let s = inverse_power(d, f64::from(d)).unwrap();
            let grid = [1e3, 1e6, 1e12, 1e100];
            let (r, _) = res_sequence(&s, &grid).unwrap();
            for (n, v) in grid.iter().zip(r.values()) {
                // (1/log(2+n)) (log n / d - log 4)
                let closed = (n.ln() / f64::from(d) - 4f64.ln()) / (2.0 + n).ln();
                assert!((v - closed).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_matches_closed_form_through_generic_path() {
        // tabulated r^{-2} in d = 2 goes through adaptive Simpson
        let rs: Vec<f64> = (0..200).map(|i| 4.0 * 1.1f64.powi(i)).collect();
        let z: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
        let q: Vec<f64> = rs.iter().map(|r| r.powi(-2)).collect();
        let zmax = *z.last().unwrap();
        let s = RadialSymbol::new(2, RadialProfile::Tabulated { z, q }, 4.0, "tab").unwrap();
        let v = s.radial_integral(s.z_lo(), zmax, 1e-10).unwrap();
        // piecewise-linear q in z is not exactly e^{-2z}; compare loosely
        assert!((v.value - (zmax - 4f64.ln())).abs() < 1e-2 * zmax);
    }

    #[test]
    fn zero_symbol() {
        let s = RadialSymbol::new(3, RadialProfile::Zero, 1.0, "zero").unwrap();
        let (r, _) = res_sequence(&s, &[10.0, 100.0]).unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));
        let m = modulated_check(&s, &default_t_grid(&s)).unwrap();
        assert!(m.pass && m.exponent == 0.0);
        assert_eq!(s.clipping_constant(1e-9).unwrap(), 0.0);
    }

    #[test]
    fn modulated_examples() {
        for d in [1, 2, 4] {
            let q = q_example(d).unwrap();
            let m = modulated_check(&q, &default_t_grid(&q)).unwrap();
            assert!(m.pass, "d={d}: {}", m.exponent);
            let bad = inverse_power(d, f64::from(d) / 2.0).unwrap();
            let m = modulated_check(&bad, &default_t_grid(&bad)).unwrap();
            assert!(!m.pass && m.tail_divergent && m.exponent.is_infinite());
            let good = inverse_power(d, f64::from(d)).unwrap();
            let m = modulated_check(&good, &default_t_grid(&good)).unwrap();
            assert!(m.exponent.abs() < 1e-6);
            let grow = inverse_power(d, 0.75 * f64::from(d)).unwrap();
            let m = modulated_check(&grow, &default_t_grid(&grow)).unwrap();
            assert!((m.exponent - 0.25 * f64::from(d)).abs() < 1e-3 && !m.pass);
        }
    }

    #[test]
    fn q_block_integrals_reduce_to_sine() {
        let s = q_example(2).unwrap();
        let n = 40;
        let (a, b) = s.block_bounds(n);
        let v = s.radial_integral(a, b, 1e-11).unwrap().value;
        let direct = adaptive_simpson(&|z: f64| (z / z.ln()).sin(), a, b, 1e-12).unwrap().value;
        assert!((v - direct).abs() < 1e-10);
    }

    #[test]
    fn prefix_matches_residue_sequence() {
        for d in [1u32, 2] {
            let s = q_example(d).unwrap();
            let (i, errs) = block_integrals(&s, 60).unwrap();
            let qerr: f64 = errs.iter().sum();
            let mut acc = 0.0;
            for big_n in 1..=60usize {
                acc += i.values()[big_n - 1];
                let n = (big_n as f64).exp2();
                let (r, rerr) = res_sequence(&s, &[n]).unwrap();
                let lhs = r.values()[0] * (2.0 + n).ln();
                assert!((acc - lhs).abs() <= qerr + rerr * (2.0 + n).ln() + 1e-9);
            }
        }
    }

    #[test]
    fn halving_tolerance_stays_within_error_bound() {
        let s = q_example(1).unwrap();
        for n in [5usize, 50, 500, 5000] {
            let (a, b) = s.block_bounds(n);
            let coarse = s.radial_integral(a, b, 1e-9).unwrap();
            let fine = s.radial_integral(a, b, 5e-10).unwrap();
            assert!((coarse.value - fine.value).abs() <= coarse.error.max(1e-15));
        }
    }

    #[test]
    fn anchor_windows_sit_on_peaks() {
        for d in [1u32, 2, 4] {
            let s = q_example(d).unwrap();
            let ws = anchor_windows(d, &[3, 4]).unwrap();
            let iv = block_integral_interval(&s, &WindowSpec::Anchored(ws)).unwrap();
            assert!(iv.sup_est >= LN_2 / f64::from(d) - 0.1, "d={d}: {}", iv.sup_est);
            assert!(iv.inf_est <= -LN_2 / f64::from(d) + 0.1);
            let scaled = symbol_trace_interval(&s, &WindowSpec::Anchored(anchor_windows(d, &[3]).unwrap()), None).unwrap();
            assert!(scaled.sup_est > 0.0);
        }
    }

    #[test]
    fn full_report_for_inverse_power() {
        let s = inverse_power(2, 2.0).unwrap();
        let cfg = ResidueConfig {
            n_blocks: 4096,
            anchors: vec![],
            ..Default::default()
        };
        let r = residue_report(&s, &cfg).unwrap();
        let res = r.res_scalar.limit_est.unwrap();
        assert!((res - 0.5).abs() < 0.01);
        assert!((r.res_wodzicki.unwrap() - 1.0).abs() < 0.02);
        // almost-convergence limit equals log 2 * Res
        let lim = r.block_almost_convergence.limit_est.unwrap();
        assert!((lim - LN_2 * res).abs() < 0.02);
        assert!(r.modulated_pass);
        assert_eq!(r.clipping_constant, 0.0);
    }
}
