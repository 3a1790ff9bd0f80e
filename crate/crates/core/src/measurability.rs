//! Classification of operators into the measurable classes of the four trace
//! families, read off the block-sum sequence `Phi` of the eigenvalues.
//!
//! | class | test on `Phi` |
//! |---|---|
//! | all positive normalised traces | almost convergence (Sucheston interval) |
//! | Dixmier | convergence of `C Phi` |
//! | Connes-Dixmier | convergence of `C^2 Phi` |
//! | Cesaro-invariant (`D_M`) | iterated Cesaro gap tends to zero |

use std::sync::Arc;

use serde::Serialize;

use crate::bounds::{
    dm_verdict, convergence_probe, iterated_cesaro_gap, lorentz_verdict, sucheston_bounds_with,
    BanachInterval, ConvergenceVerdict, IteratedGap, Reliability, Status, SuchestonConfig,
    DEFAULT_M_MAX, DEFAULT_TAIL_FRACTION, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::sequence::{quasi_norm_l1inf_blocks, BlockSequence, Truncation};
use crate::summation::Dd;
use crate::transforms::{block_sums_phi, cesaro, cesaro_dd};

/// Number of trailing `Phi` values copied into the report.
const PHI_TAIL_LEN: usize = 8;
/// Leading indices checked for nonincreasing modulus.
const ORDER_CHECK_LEN: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    DiagonalPositive,
    SelfAdjoint,
    General,
}

#[derive(Debug, Clone)]
pub enum EigenSequence {
    Real(Arc<dyn BlockSequence>),
    Complex {
        re: Arc<dyn BlockSequence>,
        im: Arc<dyn BlockSequence>,
    },
}

/// An operator given by its eigenvalue sequence (nonincreasing modulus). An
/// optional singular-value profile is carried for reporting only.
#[derive(Debug, Clone)]
pub struct OperatorModel {
    pub eigen: EigenSequence,
    pub kind: ModelKind,
    pub label: String,
    pub singular_values: Option<Arc<dyn BlockSequence>>,
}

impl OperatorModel {
    pub fn new(eigen: EigenSequence, kind: ModelKind, label: impl Into<String>) -> Self {
        OperatorModel {
            eigen,
            kind,
            label: label.into(),
            singular_values: None,
        }
    }

    /// Diagonal positive operator whose eigenvalues and singular values are `mu`.
    pub fn diagonal(mu: Arc<dyn BlockSequence>, label: impl Into<String>) -> Self {
        OperatorModel {
            singular_values: Some(mu.clone()),
            ..Self::new(EigenSequence::Real(mu), ModelKind::DiagonalPositive, label)
        }
    }

    pub fn with_singular_values(mut self, mu: Arc<dyn BlockSequence>) -> Self {
        self.singular_values = Some(mu);
        self
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.eigen, EigenSequence::Complex { .. })
    }

    /// Diagnostics on the model itself (ordering, quasi-norm).
    pub fn validate(&self, n_blocks: usize) -> Vec<String> {
        let mut flags = Vec::new();
        let parts: Vec<&Arc<dyn BlockSequence>> = match &self.eigen {
            EigenSequence::Real(s) => vec![s],
            EigenSequence::Complex { re, im } => vec![re, im],
        };
        if parts.iter().all(|p| p.granularity().has_pointwise()) {
            let modulus = |k: u64| -> Option<f64> {
                let v: Vec<f64> = parts.iter().map(|p| p.value_at(k)).collect::<Option<_>>()?;
                Some(v.iter().map(|a| a * a).sum::<f64>().sqrt())
            };
            let limit = parts
                .iter()
                .filter_map(|p| p.pointwise_len())
                .min()
                .unwrap_or(ORDER_CHECK_LEN)
                .min(ORDER_CHECK_LEN);
            let mut prev = f64::INFINITY;
            for k in 0..limit {
                let Some(m) = modulus(k) else { break };
                if m > prev * (1.0 + 1e-12) {
                    flags.push(format!("eigenvalue modulus increases at index {k}"));
                    break;
                }
                prev = m;
            }
        }
        if let EigenSequence::Real(s) = &self.eigen {
            if let Ok(q) = quasi_norm_l1inf_blocks(s.as_ref(), n_blocks) {
                if q.possibly_divergent {
                    flags.push(format!(
                        "weak-l1 quasi-norm still growing near block {}",
                        q.argmax
                    ));
                }
            }
        }
        flags
    }
}

/// Verdict thresholds and horizons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub verdict: f64,
    pub tail_fraction: f64,
    pub m_max: usize,
    /// Largest Sucheston window; `None` for the default rule.
    pub k_max: Option<usize>,
    /// First window start as a fraction of the horizon.
    pub burn_in_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            verdict: DEFAULT_TOL,
            tail_fraction: DEFAULT_TAIL_FRACTION,
            m_max: DEFAULT_M_MAX,
            k_max: None,
            burn_in_fraction: 1.0 / 16.0,
        }
    }
}

impl Tolerances {
    fn sucheston(&self, n: usize) -> SuchestonConfig {
        SuchestonConfig {
            k_max: self.k_max,
            burn_in: (n as f64 * self.burn_in_fraction) as usize,
            tol: self.verdict,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassStatus {
    Measurable,
    NotMeasurable,
    Undecided,
}

impl From<Status> for ClassStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Convergent => ClassStatus::Measurable,
            Status::Divergent => ClassStatus::NotMeasurable,
            Status::Undecided => ClassStatus::Undecided,
        }
    }
}

/// Class verdict; `value_im` is present for complex inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub status: ClassStatus,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_im: Option<f64>,
}

impl Verdict {
    fn from_parts(re: &ConvergenceVerdict, im: Option<&ConvergenceVerdict>) -> Self {
        let Some(im) = im else {
            return Verdict {
                status: re.status.into(),
                value: re.limit_est,
                value_im: None,
            };
        };
        let (a, b): (ClassStatus, ClassStatus) = (re.status.into(), im.status.into());
        let status = if a == ClassStatus::NotMeasurable || b == ClassStatus::NotMeasurable {
            ClassStatus::NotMeasurable
        } else if a == ClassStatus::Measurable && b == ClassStatus::Measurable {
            ClassStatus::Measurable
        } else {
            ClassStatus::Undecided
        };
        let both = status == ClassStatus::Measurable;
        Verdict {
            status,
            value: if both { re.limit_est } else { None },
            value_im: if both { im.limit_est } else { None },
        }
    }
}

/// Lower bound for the Cesaro slope `n((Cx)_n - (Cx)_{n-1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauberianCheck {
    pub slope_min: f64,
    pub bound: f64,
    pub pass: bool,
    /// `max_n |n((Cx)_n - (Cx)_{n-1}) - (x_n - (Cx)_n)|`.
    pub identity_residual: f64,
}

/// `slope_min = min_{n>=1} n((Cx)_n - (Cx)_{n-1})` against `-2 ||x||_inf`.
/// `C x` is carried in double-double so the slope identity survives the
/// factor `n`.
pub fn tauberian_check(x: &Truncation) -> TauberianCheck {
    let xs = x.values();
    let c = cesaro_dd(xs);
    let mut slope_min = f64::INFINITY;
    let mut resid: f64 = 0.0;
    for n in 1..xs.len() {
        let slope = c[n].sub(c[n - 1]).mul_f64(n as f64).to_f64();
        let rhs = Dd::new(xs[n]).sub(c[n]).to_f64();
        slope_min = slope_min.min(slope);
        resid = resid.max((slope - rhs).abs());
    }
    if xs.len() == 1 {
        slope_min = 0.0;
    }
    let bound = -2.0 * x.sup_norm();
    TauberianCheck {
        slope_min,
        bound,
        pass: slope_min >= bound - 1e-9,
        identity_residual: resid,
    }
}

/// Per-component analysis of one real `Phi` sequence.
#[derive(Debug, Clone)]
pub struct ComponentDiagnostics {
    pub phi: Truncation,
    pub interval: BanachInterval,
    pub pt: ConvergenceVerdict,
    pub dixmier: ConvergenceVerdict,
    pub connes_dixmier: ConvergenceVerdict,
    pub iterated: Vec<IteratedGap>,
    pub dm: ConvergenceVerdict,
    pub tauberian: TauberianCheck,
}

fn analyse(phi: Truncation, tol: &Tolerances) -> Result<ComponentDiagnostics> {
    let n = phi.len();
    let ((interval, (dix, cd)), (iterated, tauberian)) = rayon::join(
        || {
            rayon::join(
                || sucheston_bounds_with(&phi, &tol.sucheston(n)),
                || {
                    let c1 = cesaro(&phi);
                    let c2 = cesaro(&c1);
                    (
                        convergence_probe(&c1, tol.tail_fraction, tol.verdict),
                        convergence_probe(&c2, tol.tail_fraction, tol.verdict),
                    )
                },
            )
        },
        || {
            rayon::join(
                || iterated_cesaro_gap(&phi, tol.m_max, tol.tail_fraction),
                || tauberian_check(&phi),
            )
        },
    );
    let interval = interval?;
    let iterated = iterated?;
    Ok(ComponentDiagnostics {
        pt: lorentz_verdict(&interval, tol.verdict),
        dm: dm_verdict(&iterated, tol.verdict),
        phi,
        interval,
        dixmier: dix,
        connes_dixmier: cd,
        iterated,
        tauberian,
    })
}

/// Full classification record.
#[derive(Debug, Clone)]
pub struct TraceDiagnostics {
    pub label: String,
    pub n_blocks: usize,
    pub re: ComponentDiagnostics,
    pub im: Option<ComponentDiagnostics>,
    pub pt: Verdict,
    pub dixmier: Verdict,
    pub connes_dixmier: Verdict,
    pub dm: Verdict,
    pub flags: Vec<String>,
}

/// Trace interval over all positive normalised traces, as a rectangle for
/// complex input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceInterval {
    pub re: BanachInterval,
    pub im: Option<BanachInterval>,
    pub warning: Option<String>,
}

fn phis(op: &OperatorModel, n_blocks: usize) -> Result<(Truncation, Option<Truncation>)> {
    match &op.eigen {
        EigenSequence::Real(s) => Ok((block_sums_phi(s.as_ref(), n_blocks)?, None)),
        EigenSequence::Complex { re, im } => Ok((
            block_sums_phi(re.as_ref(), n_blocks)?,
            Some(block_sums_phi(im.as_ref(), n_blocks)?),
        )),
    }
}

const COMPLEX_WARNING: &str =
    "complex eigenvalues: real and imaginary parts bounded separately (rectangle)";

/// `[inf, sup]` of `tau(A)` over all positive normalised traces.
pub fn trace_interval(op: &OperatorModel, n_blocks: usize, tol: &Tolerances) -> Result<TraceInterval> {
    let (re, im) = phis(op, n_blocks)?;
    let cfg = tol.sucheston(n_blocks);
    Ok(TraceInterval {
        re: sucheston_bounds_with(&re, &cfg)?,
        im: im.as_ref().map(|p| sucheston_bounds_with(p, &cfg)).transpose()?,
        warning: op.is_complex().then(|| COMPLEX_WARNING.to_string()),
    })
}

/// `Phi(mu_+) - Phi(mu_-)` for a self-adjoint operator given by the singular
/// values of its positive and negative parts.
pub fn self_adjoint_phi(
    plus: &dyn BlockSequence,
    minus: &dyn BlockSequence,
    n_blocks: usize,
) -> Result<Truncation> {
    let p = block_sums_phi(plus, n_blocks)?;
    let m = block_sums_phi(minus, n_blocks)?;
    Truncation::new(p.values().iter().zip(m.values()).map(|(a, b)| a - b).collect())
}

/// Runs every class test on `Phi` of the eigenvalues.
pub fn classify(op: &OperatorModel, n_blocks: usize, tol: &Tolerances) -> Result<TraceDiagnostics> {
    if n_blocks < 64 {
        return Err(Error::Precondition(format!(
            "classification needs at least 64 blocks, got {n_blocks}"
        )));
    }
    let (phi_re, phi_im) = phis(op, n_blocks)?;
    let (re, im) = rayon::join(
        || analyse(phi_re, tol),
        || phi_im.map(|p| analyse(p, tol)).transpose(),
    );
    let (re, im) = (re?, im?);
    let im_ref = im.as_ref();
    let pt = Verdict::from_parts(&re.pt, im_ref.map(|c| &c.pt));
    let dixmier = Verdict::from_parts(&re.dixmier, im_ref.map(|c| &c.dixmier));
    let connes_dixmier = Verdict::from_parts(&re.connes_dixmier, im_ref.map(|c| &c.connes_dixmier));
    let dm = Verdict::from_parts(&re.dm, im_ref.map(|c| &c.dm));

    let mut flags = op.validate(n_blocks);
    if op.is_complex() {
        flags.push(COMPLEX_WARNING.into());
    }
    let chain = [
        ("pt", pt),
        ("dixmier", dixmier),
        ("connes-dixmier", connes_dixmier),
        ("dm", dm),
    ];
    for w in chain.windows(2) {
        let ((a, va), (b, vb)) = (w[0], w[1]);
        if va.status == ClassStatus::Measurable && vb.status == ClassStatus::NotMeasurable {
            flags.push(format!("inclusion violated: {a} measurable but {b} not"));
        }
        if let (Some(x), Some(y)) = (va.value, vb.value) {
            if (x - y).abs() > 2.0 * tol.verdict {
                flags.push(format!("{a} value {x:.6} differs from {b} value {y:.6}"));
            }
        }
    }
    if dixmier.status != connes_dixmier.status {
        flags.push(format!(
            "dixmier ({:?}) and connes-dixmier ({:?}) verdicts differ",
            dixmier.status, connes_dixmier.status
        ));
    }
    for c in std::iter::once(&re).chain(im_ref) {
        if !c.tauberian.pass {
            flags.push("tauberian slope bound violated".into());
        }
        if c.interval.reliability != Reliability::Stable {
            flags.push(format!("trace interval {:?}", c.interval.reliability));
        }
    }
    Ok(TraceDiagnostics {
        label: op.label.clone(),
        n_blocks,
        re,
        im,
        pt,
        dixmier,
        connes_dixmier,
        dm,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalReport {
    pub inf: f64,
    pub sup: f64,
    pub reliability: Reliability,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inf_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_im: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauberianReport {
    pub slope_min: f64,
    pub bound: f64,
    pub pass: bool,
}

/// The serialised form of [`TraceDiagnostics`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub label: String,
    pub n_blocks: usize,
    pub phi_tail: Vec<f64>,
    pub trace_interval: IntervalReport,
    pub pt: Verdict,
    pub dixmier: Verdict,
    pub connes_dixmier: Verdict,
    pub dm: Verdict,
    pub tauberian: TauberianReport,
    pub flags: Vec<String>,
}

impl TraceDiagnostics {
    pub fn trace_interval(&self) -> &BanachInterval {
        &self.re.interval
    }

    pub fn report(&self) -> TraceReport {
        let tail_of = |t: &Truncation| t.values()[t.len().saturating_sub(PHI_TAIL_LEN)..].to_vec();
        let worst = std::iter::once(&self.re)
            .chain(self.im.as_ref())
            .map(|c| c.tauberian)
            .min_by(|a, b| (a.slope_min - a.bound).total_cmp(&(b.slope_min - b.bound)))
            .unwrap();
        let reliability = match &self.im {
            Some(im) if im.interval.reliability != Reliability::Stable => im.interval.reliability,
            _ => self.re.interval.reliability,
        };
        TraceReport {
            label: self.label.clone(),
            n_blocks: self.n_blocks,
            phi_tail: tail_of(&self.re.phi),
            trace_interval: IntervalReport {
                inf: self.re.interval.inf_est,
                sup: self.re.interval.sup_est,
                reliability,
                inf_im: self.im.as_ref().map(|c| c.interval.inf_est),
                sup_im: self.im.as_ref().map(|c| c.interval.sup_est),
            },
            pt: self.pt,
            dixmier: self.dixmier,
            connes_dixmier: self.connes_dixmier,
            dm: self.dm,
            tauberian: TauberianReport {
                slope_min: worst.slope_min,
                bound: worst.bound,
                pass: worst.pass,
            },
            flags: self.flags.clone(),
        }
    }
}
