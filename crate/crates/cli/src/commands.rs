//! `classify`, `bounds`, `transform` and `residue`.

use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;
use tracelab::bounds::{convergence_probe, lorentz_verdict, sucheston_bounds_with, BanachInterval, ConvergenceVerdict};
use tracelab::generators::{gen_diag_of_d, gen_harmonic, gen_x_alt_dyadic, gen_y_dif1, gen_y_dif2, AnSequence};
use tracelab::measurability::{classify, ClassStatus, EigenSequence, ModelKind, OperatorModel, Verdict};
use tracelab::residue::{
    inverse_power, q_example, res_dyadic, residue_report, BlockIntegralSequence, RadialProfile, RadialSymbol,
    ResidueConfig, R_CUTOFF,
};
use tracelab::sequence::{decreasing_rearrangement, CsvSequence};
use tracelab::transforms::{block_sums_phi, cesaro, cesaro_iter, dilate2, pietsch_d_truncation, shift_left, shift_right};
use tracelab::{BlockSequence, Truncation};

use crate::config::{Command, Example, RunConfig, Source, SymbolKind, TraceClass, TransformOp, DEFAULT_BLOCKS, DEFAULT_LEN};
use crate::output::Output;

/// Pointwise sequence behind a source, before any operator is applied.
pub fn base_sequence(source: &Source, horizon: usize) -> Result<Arc<dyn BlockSequence>> {
    Ok(match source {
        Source::Example { example, param } => match example {
            Example::Harmonic => Arc::new(gen_harmonic()),
            Example::ANSeq => Arc::new(AnSequence::new(*param, horizon.max(1))?),
            Example::YDif1 => Arc::new(gen_y_dif1()),
            Example::YDif2 => Arc::new(gen_y_dif2()),
            Example::XAltDyadic => Arc::new(gen_x_alt_dyadic()),
            Example::QExample => Arc::new(BlockIntegralSequence::new(q_example(*param as u32)?)),
        },
        Source::Csv { path } => {
            let c = CsvSequence::from_path(path).with_context(|| format!("reading {}", path.display()))?;
            if c.is_complex() {
                bail!("{}: complex input; transforms act on real sequences", path.display());
            }
            Arc::new(c.real_part(&source.label()))
        }
    })
}

/// Operator under study: `diag(D y)` for the bounded examples `y`, otherwise
/// the diagonal operator with the source as eigenvalues.
pub fn operator(source: &Source, n_blocks: usize) -> Result<OperatorModel> {
    let label = source.label();
    Ok(match source {
        Source::Example { example: Example::YDif1 | Example::YDif2 | Example::XAltDyadic, .. } => {
            gen_diag_of_d(base_sequence(source, n_blocks)?, format!("D({label})"))?
        }
        Source::Example { .. } => OperatorModel::diagonal(base_sequence(source, n_blocks)?, label),
        Source::Csv { path } => {
            let c = CsvSequence::from_path(path).with_context(|| format!("reading {}", path.display()))?;
            let re: Arc<dyn BlockSequence> = Arc::new(c.real_part(&label));
            match c.imag_part(&label) {
                Some(im) => OperatorModel::new(
                    EigenSequence::Complex { re, im: Arc::new(im) },
                    ModelKind::General,
                    label,
                ),
                None => OperatorModel::diagonal(re, label),
            }
        }
    })
}

/// Requested block horizon, or everything a CSV provides.
fn block_horizon(cfg: &RunConfig, source: &Source) -> Result<usize> {
    if let Some(n) = cfg.horizons.n_blocks {
        return Ok(n);
    }
    match source {
        Source::Csv { .. } => {
            let op = operator(source, DEFAULT_BLOCKS)?;
            let seqs: Vec<&Arc<dyn BlockSequence>> = match &op.eigen {
                EigenSequence::Real(s) => vec![s],
                EigenSequence::Complex { re, im } => vec![re, im],
            };
            Ok(seqs
                .iter()
                .filter_map(|s| s.available_blocks())
                .min()
                .unwrap_or(DEFAULT_BLOCKS))
        }
        _ => Ok(DEFAULT_BLOCKS),
    }
}

/// Exit status of a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// A verdict marked critical is undecided.
    UndecidedCritical,
    /// `verify` found a failing criterion.
    Failed,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Failed => 1,
            Outcome::UndecidedCritical => 2,
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<(Output, Outcome)> {
    cfg.validate()?;
    match &cfg.command {
        Command::Classify { source, critical } => cmd_classify(cfg, source, critical),
        Command::Bounds { source } => cmd_bounds(cfg, source).map(|o| (o, Outcome::Ok)),
        Command::Transform { source, op, m } => cmd_transform(cfg, source, *op, *m).map(|o| (o, Outcome::Ok)),
        Command::Residue { .. } => cmd_residue(cfg).map(|o| (o, Outcome::Ok)),
        Command::Verify { only } => {
            let report = crate::verify::run_suite(cfg.seed, only)?;
            let outcome = if report.passed { Outcome::Ok } else { Outcome::Failed };
            Ok((report.output()?, outcome))
        }
    }
}

fn cmd_classify(cfg: &RunConfig, source: &Source, critical: &[TraceClass]) -> Result<(Output, Outcome)> {
    let n_blocks = block_horizon(cfg, source)?;
    let op = operator(source, n_blocks)?;
    let diag = classify(&op, n_blocks, &cfg.tolerances())?;
    let report = diag.report();
    let verdict = |c: TraceClass| -> Verdict {
        match c {
            TraceClass::Pt => report.pt,
            TraceClass::Dixmier => report.dixmier,
            TraceClass::ConnesDixmier => report.connes_dixmier,
            TraceClass::Dm => report.dm,
        }
    };
    let outcome = if critical.iter().any(|&c| verdict(c).status == ClassStatus::Undecided) {
        Outcome::UndecidedCritical
    } else {
        Outcome::Ok
    };
    let mut rows = vec![
        vec!["label".into(), report.label.clone()],
        vec!["n_blocks".into(), report.n_blocks.to_string()],
        vec!["interval_inf".into(), report.trace_interval.inf.to_string()],
        vec!["interval_sup".into(), report.trace_interval.sup.to_string()],
    ];
    for (name, v) in [
        ("pt", report.pt),
        ("dixmier", report.dixmier),
        ("connes_dixmier", report.connes_dixmier),
        ("dm", report.dm),
    ] {
        rows.push(vec![format!("{name}_status"), status_name(v.status).into()]);
        rows.push(vec![format!("{name}_value"), v.value.map_or(String::new(), |x| x.to_string())]);
    }
    let out = Output {
        json: serde_json::to_value(&report)?,
        header: vec!["field".into(), "value".into()],
        rows,
        series: enumerate(diag.re.phi.values()),
    };
    Ok((out, outcome))
}

fn status_name(s: ClassStatus) -> &'static str {
    match s {
        ClassStatus::Measurable => "measurable",
        ClassStatus::NotMeasurable => "not-measurable",
        ClassStatus::Undecided => "undecided",
    }
}

fn enumerate(v: &[f64]) -> Vec<(f64, f64)> {
    v.iter().enumerate().map(|(i, &x)| (i as f64, x)).collect()
}

#[derive(Serialize)]
struct BoundsReport<'a> {
    label: String,
    n_blocks: usize,
    interval: &'a BanachInterval,
    almost_convergence: ConvergenceVerdict,
    convergence: ConvergenceVerdict,
}

fn cmd_bounds(cfg: &RunConfig, source: &Source) -> Result<Output> {
    let n_blocks = block_horizon(cfg, source)?;
    let op = operator(source, n_blocks)?;
    let EigenSequence::Real(seq) = &op.eigen else {
        bail!("bounds needs a real sequence; classify reports complex rectangles");
    };
    let phi = block_sums_phi(seq.as_ref(), n_blocks)?;
    let tol = cfg.tolerances();
    let iv = sucheston_bounds_with(
        &phi,
        &tracelab::bounds::SuchestonConfig {
            k_max: tol.k_max,
            burn_in: (n_blocks as f64 * tol.burn_in_fraction) as usize,
            tol: tol.verdict,
        },
    )?;
    let report = BoundsReport {
        label: op.label.clone(),
        n_blocks,
        interval: &iv,
        almost_convergence: lorentz_verdict(&iv, tol.verdict),
        convergence: convergence_probe(&phi, tol.tail_fraction, tol.verdict),
    };
    let rows = iv
        .monotone_envelope
        .iter()
        .map(|p| vec![p.k.to_string(), p.sup.to_string(), p.inf.to_string()])
        .collect();
    let mut series: Vec<(f64, f64)> = iv.monotone_envelope.iter().map(|p| (p.k as f64, p.sup)).collect();
    series.extend(iv.monotone_envelope.iter().map(|p| (p.k as f64, p.inf)));
    Ok(Output {
        json: serde_json::to_value(&report)?,
        header: vec!["k".into(), "sup".into(), "inf".into()],
        rows,
        series,
    })
}

fn cmd_transform(cfg: &RunConfig, source: &Source, op: TransformOp, m: usize) -> Result<Output> {
    let seq = base_sequence(source, cfg.horizons.n_blocks.unwrap_or(DEFAULT_BLOCKS))?;
    let values = match op {
        TransformOp::Phi => {
            let n = cfg.horizons.n_blocks.or(cfg.horizons.len).unwrap_or(DEFAULT_LEN);
            block_sums_phi(seq.as_ref(), n)?
        }
        _ => {
            let len = cfg.horizons.len.unwrap_or(DEFAULT_LEN);
            let x = pointwise_prefix(seq.as_ref(), len)?;
            match op {
                TransformOp::Cesaro => cesaro(&x),
                TransformOp::CesaroIter => cesaro_iter(&x, m)?,
                TransformOp::D => {
                    pietsch_d_truncation(&x).materialize(len)?
                }
                TransformOp::ShiftRight => shift_right(&x),
                TransformOp::ShiftLeft => shift_left(&x)?,
                TransformOp::Dilate2 => dilate2(&x),
                TransformOp::Rearrange => decreasing_rearrangement(&x),
                TransformOp::Phi => unreachable!(),
            }
        }
    };
    let series = enumerate(values.values());
    Ok(Output {
        json: json!({
            "op": op,
            "source": source.label(),
            "m": (op == TransformOp::CesaroIter).then_some(m),
            "values": values.values(),
        }),
        header: vec!["index".into(), "value".into()],
        rows: series.iter().map(|(i, v)| vec![i.to_string(), v.to_string()]).collect(),
        series,
    })
}

fn pointwise_prefix(seq: &dyn BlockSequence, len: usize) -> Result<Truncation> {
    if let Some(avail) = seq.pointwise_len() {
        if (len as u64) > avail {
            bail!("{} has {avail} values, {len} requested", seq.label());
        }
    }
    let v = (0..len as u64)
        .map(|i| {
            seq.value_at(i)
                .with_context(|| format!("{} has no pointwise value at index {i}", seq.label()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Truncation::new(v)?)
}

/// 61 points geometric from `min(1e3, n_max/10)` to `n_max`.
pub fn n_grid(n_max: f64) -> Vec<f64> {
    let lo = 1e3f64.min(n_max / 10.0).log10();
    let hi = n_max.log10();
    (0..=60).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / 60.0)).collect()
}

fn cmd_residue(cfg: &RunConfig) -> Result<Output> {
    let Command::Residue { symbol, dim, power, profile, n_max, anchors, dump } = &cfg.command else {
        unreachable!()
    };
    let sym = match symbol {
        SymbolKind::QExample => q_example(*dim)?,
        SymbolKind::InversePower => inverse_power(*dim, power.unwrap_or(f64::from(*dim)))?,
        SymbolKind::CsvProfile => {
            let path = profile.as_ref().context("--symbol csv-profile needs --profile <path>")?;
            let p = RadialProfile::from_csv_path(path).with_context(|| format!("reading {}", path.display()))?;
            let r_min = match &p {
                RadialProfile::Tabulated { z, .. } => z[0].exp(),
                _ => R_CUTOFF,
            };
            RadialSymbol::new(*dim, p, r_min, format!("csv-profile({})", path.display()))?
        }
    };
    let rc = ResidueConfig {
        n_blocks: cfg.horizons.n_blocks.unwrap_or(ResidueConfig::default().n_blocks),
        n_grid: n_grid(*n_max),
        anchors: anchors.clone(),
        tol: cfg.tol,
        ..ResidueConfig::default()
    };
    let report = residue_report(&sym, &rc)?;
    if let Some(path) = dump {
        let dyadic = res_dyadic(&report.block_integrals)?;
        let mut s = String::from("n,I_n,Res_2^(n+1)\n");
        for (n, (i, r)) in report.block_integrals.values().iter().zip(dyadic.values()).enumerate() {
            s.push_str(&format!("{n},{i},{r}\n"));
        }
        std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
    }
    let series: Vec<(f64, f64)> = report.n_grid.iter().copied().zip(report.res_seq.values().iter().copied()).collect();
    Ok(Output {
        json: serde_json::to_value(&report)?,
        header: vec!["n".into(), "res_n".into()],
        rows: series.iter().map(|(n, r)| vec![n.to_string(), r.to_string()]).collect(),
        series,
    })
}
