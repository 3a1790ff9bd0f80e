//! The acceptance suite behind `tracelab verify`.
//!
//! Every criterion draws its random inputs from its own ChaCha8 stream, so a
//! subset run (`--only`) reproduces the numbers of a full run with the same
//! seed. Reports carry no timings and are byte-stable.

use std::f64::consts::LN_2;
use std::sync::Arc;

use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tracelab::bounds::{anchored_window_bounds, iterated_cesaro_gap, AnchoredWindow, Status, DEFAULT_TAIL_FRACTION};
use tracelab::generators::{
    gen_diag_of_d, gen_harmonic, gen_x_alt_dyadic, gen_y_dif1, gen_y_dif2, AnSequence, DEFAULT_BLOCK_HORIZON,
};
use tracelab::measurability::{classify, OperatorModel, Tolerances, TraceDiagnostics};
use tracelab::residue::{block_integrals, integrate_pieces, q_example, residue_report, ResidueConfig};
use tracelab::sequence::{
    block_end, block_start, decreasing_rearrangement, norm_m1inf_blocks, pointwise_block_sum,
    quasi_norm_l1inf, quasi_norm_l1inf_blocks, TabulatedSequence,
};
use tracelab::transforms::{aux1_decomposition, block_sums_phi, cesaro, embed_pi, hardy_h, pietsch_d_truncation};
use tracelab::{BlockSequence, Granularity, Truncation};

use crate::output::Output;

/// Block horizon of the corpus criteria.
pub const CORPUS_BLOCKS: usize = 1 << 20;

/// `(id, name)` of every criterion, in run order.
pub const CRITERIA: [(u32, &str); 10] = [
    (1, "normalisation"),
    (2, "d-left-inverse"),
    (3, "dixmier-not-pt"),
    (4, "dm-not-dixmier"),
    (5, "d-equals-cd"),
    (6, "a-n"),
    (7, "aux"),
    (8, "residue"),
    (9, "log-primitive"),
    (10, "hardy"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One measured quantity against its limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: Relation::AtMost,
            limit,
            pass: value <= limit,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: Relation::AtLeast,
            limit,
            pass: value >= limit,
        }
    }

    /// A yes/no condition as `value >= 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn output(&self) -> Result<Output> {
        let mut rows = Vec::new();
        for c in &self.criteria {
            for k in &c.checks {
                let rel = match k.relation {
                    Relation::AtMost => "<=",
                    Relation::AtLeast => ">=",
                };
                rows.push(vec![
                    c.id.to_string(),
                    c.name.clone(),
                    k.name.clone(),
                    k.value.to_string(),
                    rel.into(),
                    k.limit.to_string(),
                    k.pass.to_string(),
                ]);
            }
        }
        Ok(Output {
            json: serde_json::to_value(self)?,
            header: ["id", "criterion", "check", "value", "relation", "limit", "pass"]
                .map(String::from)
                .to_vec(),
            rows,
            series: self
                .criteria
                .iter()
                .map(|c| (f64::from(c.id), if c.pass { 1.0 } else { 0.0 }))
                .collect(),
        })
    }
}

/// Resolves `--only` entries (ids or names) to criterion ids.
pub fn select(only: &[String]) -> Result<Vec<u32>> {
    if only.is_empty() {
        return Ok(CRITERIA.iter().map(|c| c.0).collect());
    }
    let mut ids = Vec::new();
    for o in only {
        let o = o.trim();
        let Some(&(id, _)) = CRITERIA.iter().find(|(id, name)| *name == o || id.to_string() == o) else {
            let names: Vec<&str> = CRITERIA.iter().map(|c| c.1).collect();
            bail!("unknown criterion `{o}`; expected an id 1-10 or one of {}", names.join(", "));
        };
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    ids.sort_unstable();
    Ok(ids)
}

pub fn run_suite(seed: u64, only: &[String]) -> Result<VerifyReport> {
    let criteria = select(only)?
        .into_iter()
        .map(|id| run_criterion(id, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        seed,
        passed: criteria.iter().all(|c| c.pass),
        criteria,
    })
}

fn rng_for(seed: u64, id: u32) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(u64::from(id));
    r
}

pub fn run_criterion(id: u32, seed: u64) -> Result<CriterionResult> {
    let mut rng = rng_for(seed, id);
    let checks = match id {
        1 => normalisation()?,
        2 => d_left_inverse(&mut rng)?,
        3 => dixmier_not_pt()?,
        4 => dm_not_dixmier()?,
        5 => d_equals_cd()?,
        6 => a_n()?,
        7 => aux(&mut rng)?,
        8 => residue()?,
        9 => log_primitive()?,
        10 => hardy(&mut rng)?,
        _ => bail!("no criterion {id}"),
    };
    let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or_default();
    Ok(CriterionResult {
        id,
        name: name.to_string(),
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}

/// `len` draws from `U(-1, 1)`.
fn uniform(rng: &mut ChaCha8Rng, len: usize) -> Result<Truncation> {
    Ok(Truncation::new((0..len).map(|_| rng.gen_range(-1.0..1.0)).collect())?)
}

fn classify_default(op: &OperatorModel) -> Result<TraceDiagnostics> {
    Ok(classify(op, CORPUS_BLOCKS, &Tolerances::default())?)
}

fn normalisation() -> Result<Vec<Check>> {
    let h = Arc::new(gen_harmonic());
    let phi = block_sums_phi(h.as_ref(), CORPUS_BLOCKS)?;
    // |Phi_n - 1| / (2 * 2^-n); a zero deviation passes even where 2^-n underflows
    let worst = phi.values()[10..]
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let dev = (p - 1.0).abs();
            if dev == 0.0 {
                0.0
            } else {
                dev / (2.0 * (-((i + 10) as f64)).exp2())
            }
        })
        .fold(0.0, f64::max);
    let d = classify_default(&OperatorModel::diagonal(h, "harmonic"))?;
    let iv = d.trace_interval();
    Ok(vec![
        Check::at_most("max_n>=10 |phi_n - 1| / (2 * 2^-n)", worst, 1.0),
        Check::at_least("trace interval inf", iv.inf_est, 0.99),
        Check::at_most("trace interval sup", iv.sup_est, 1.01),
    ])
}

fn d_left_inverse(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut block_err: f64 = 0.0;
    let mut pointwise_err: f64 = 0.0;
    for _ in 0..10 {
        let y = uniform(rng, 1 << 10)?;
        let d = pietsch_d_truncation(&y);
        let phi = block_sums_phi(&d, y.len())?;
        for (a, b) in phi.values().iter().zip(y.values()) {
            block_err = block_err.max((a - b).abs() / b.abs());
        }
        // blocks small enough to sum entry by entry
        for n in 0..16 {
            let s = pointwise_block_sum(&d, n)? / LN_2;
            let b = y.values()[n];
            pointwise_err = pointwise_err.max((s - b).abs() / b.abs());
        }
    }
    Ok(vec![
        Check::at_most("max relative error of Phi(Dy) vs y", block_err, 1e-12),
        Check::at_most("max relative error of pointwise block sums, blocks < 16", pointwise_err, 1e-12),
    ])
}

fn dixmier_not_pt() -> Result<Vec<Check>> {
    let d = classify_default(&gen_diag_of_d(Arc::new(gen_y_dif1()), "D(y-dif1)")?)?;
    let dix = &d.re.dixmier;
    let iv = d.trace_interval();
    Ok(vec![
        Check::holds("C Phi convergent", dix.status == Status::Convergent),
        Check::at_most("|lim C Phi - 1|", dix.limit_est.map_or(f64::INFINITY, |l| (l - 1.0).abs()), 0.02),
        Check::at_least("lorentz gap", iv.gap(), 0.9),
        Check::at_most("|interval inf - 1|", (iv.inf_est - 1.0).abs(), 0.05),
        Check::at_most("|interval sup - 2|", (iv.sup_est - 2.0).abs(), 0.05),
    ])
}

fn dm_not_dixmier() -> Result<Vec<Check>> {
    let y = Arc::new(gen_y_dif2());
    let d = classify_default(&gen_diag_of_d(y, "D(y-dif2)")?)?;
    let dix = &d.re.dixmier;
    let gaps = iterated_cesaro_gap(&d.re.phi, 8, DEFAULT_TAIL_FRACTION)?;
    let g8 = gaps.last().expect("m = 0..=8");
    Ok(vec![
        Check::at_most("|liminf C Phi - 4/3|", (dix.tail_min - 4.0 / 3.0).abs(), 0.03),
        Check::at_most("|limsup C Phi - 5/3|", (dix.tail_max - 5.0 / 3.0).abs(), 0.03),
        Check::at_most("iterated gap at m = 8", g8.gap(), 0.1),
        Check::at_most("|iterated midpoint at m = 8 - 3/2|", (g8.midpoint() - 1.5).abs(), 0.03),
    ])
}

/// The example corpus as operator models at [`CORPUS_BLOCKS`].
pub fn corpus() -> Result<Vec<OperatorModel>> {
    let an = |n| -> Result<OperatorModel> {
        Ok(OperatorModel::diagonal(Arc::new(AnSequence::new(n, CORPUS_BLOCKS)?), format!("a-n({n})")))
    };
    let (q, _) = block_integrals(&q_example(1)?, CORPUS_BLOCKS)?;
    let q_seq = TabulatedSequence::new(q.into_values(), Granularity::BlockOnly, "q-block-integrals");
    Ok(vec![
        OperatorModel::diagonal(Arc::new(gen_harmonic()), "harmonic"),
        gen_diag_of_d(Arc::new(gen_y_dif1()), "D(y-dif1)")?,
        gen_diag_of_d(Arc::new(gen_y_dif2()), "D(y-dif2)")?,
        gen_diag_of_d(Arc::new(gen_x_alt_dyadic()), "D(x-alt-dyadic)")?,
        an(1)?,
        an(2)?,
        OperatorModel::diagonal(Arc::new(q_seq), "q-block-integrals"),
    ])
}

fn d_equals_cd() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for op in corpus()? {
        let d = classify_default(&op)?;
        checks.push(Check::holds(
            format!("{}: dixmier and connes-dixmier verdicts agree", d.label),
            d.dixmier.status == d.connes_dixmier.status,
        ));
        checks.push(Check::at_most(
            format!("{}: tauberian identity residual", d.label),
            d.re.tauberian.identity_residual,
            1e-12,
        ));
        checks.push(Check::holds(format!("{}: tauberian slope bound", d.label), d.re.tauberian.pass));
    }
    Ok(checks)
}

fn a_n() -> Result<Vec<Check>> {
    const NORM_BLOCKS: usize = 1 << 16;
    let mut checks = Vec::new();
    for n in [1u64, 2, 4] {
        let a = AnSequence::new(n, DEFAULT_BLOCK_HORIZON)?;
        let q = quasi_norm_l1inf_blocks(&a, NORM_BLOCKS)?;
        checks.push(Check::at_most(format!("n={n}: |block quasi-norm - 1|"), (q.value - 1.0).abs(), 0.0));
        let (_, ratios) = norm_m1inf_blocks(&a, NORM_BLOCKS)?;
        let worst = ratios.iter().copied().fold(0.0, f64::max);
        checks.push(Check::at_most(format!("n={n}: max prefix M1inf ratio"), worst, 2.0 / n as f64));
        let windows: Vec<AnchoredWindow> = (1..=30u64)
            .map(|k| AnchoredWindow {
                start: a.run_start(k) as usize,
                len: k as usize,
            })
            .collect();
        let iv = anchored_window_bounds(&windows, 0.02, |m| Ok(a.block_sum_at(m)? / LN_2))?;
        checks.push(Check::at_least(
            format!("n={n}: anchored Sucheston sup"),
            iv.sup_est,
            1.0 / (2.0 * LN_2) - 0.05,
        ));
    }
    Ok(checks)
}

fn aux(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    // rearrangement prefix defect, x_n <= alpha/(n+1)
    let mut defect: f64 = 0.0;
    for trial in 0..100 {
        let alpha = if trial % 2 == 0 { 1.0 } else { 5.0 };
        let len = rng.gen_range(1..=10_000);
        let x = Truncation::new((0..len).map(|n| alpha * rng.gen_range(0.0..1.0) / (n as f64 + 1.0)).collect())?;
        let xs = decreasing_rearrangement(&x);
        let mut acc = 0.0;
        for (a, b) in xs.values().iter().zip(x.values()) {
            acc += a - b;
            defect = defect.max(acc.abs() / alpha);
        }
    }
    // running-sum decomposition on 6 blocks
    let (mut identity, mut end_values, mut bound_ratio) = (0.0f64, 0.0f64, 0.0f64);
    let mut negative = false;
    let mut permutation = true;
    for _ in 0..100 {
        let mut v: Vec<f64> = (0..63).map(|k| rng.gen_range(0.0..1.0) / (k as f64 + 1.0)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        let x = Truncation::new(v)?;
        let q = quasi_norm_l1inf(&x).value;
        let a = aux1_decomposition(&x)?;
        let (u, w, z) = (a.u.values(), a.v.values(), a.z.values());
        for k in 0..x.len() {
            identity = identity.max((u[k] - w[k] - z[k]).abs() / q);
            negative |= u[k] < 0.0 || w[k] < 0.0;
            bound_ratio = bound_ratio.max(u[k] / (2.0 * q));
        }
        for b in 0..6 {
            end_values = end_values.max(u[block_end(b) as usize] / q);
            let (s, e) = (block_start(b) as usize, block_end(b) as usize + 1);
            let (mut su, mut sv) = (u[s..e].to_vec(), w[s..e].to_vec());
            su.sort_by(f64::total_cmp);
            sv.sort_by(f64::total_cmp);
            permutation &= su == sv;
        }
    }
    Ok(vec![
        Check::at_most("max prefix |sum(x* - x)| / alpha", defect, 1.0),
        Check::at_most("max |u - v - z| / quasi-norm", identity, 1e-12),
        Check::holds("v is a blockwise permutation of u", permutation),
        Check::holds("u, v nonnegative", !negative),
        Check::at_most("max u at block ends / quasi-norm", end_values, 1e-12),
        Check::at_most("max u / (2 quasi-norm)", bound_ratio, 1.0),
    ])
}

fn residue() -> Result<Vec<Check>> {
    let grid: Vec<f64> = (0..=120).map(|i| 10f64.powf(3.0 + 3.0 * f64::from(i) / 120.0)).collect();
    let mut checks = Vec::new();
    for d in [1u32, 2, 4] {
        let sym = q_example(d)?;
        let cfg = ResidueConfig {
            n_blocks: 1 << 16,
            n_grid: grid.clone(),
            anchors: vec![3, 4],
            ..ResidueConfig::default()
        };
        let r = residue_report(&sym, &cfg)?;
        let ratio = grid
            .iter()
            .zip(r.res_seq.values())
            .map(|(n, v)| v.abs() / (6.0 * n.ln().ln() / n.ln()))
            .fold(0.0, f64::max);
        checks.push(Check::at_most(format!("d={d}: max |Res_n| / (6 loglog n / log n)"), ratio, 1.0));
        let c = &r.cesaro_block_integrals;
        checks.push(Check::at_most(
            format!("d={d}: max |tail of C(block integrals)|"),
            c.tail_min.abs().max(c.tail_max.abs()),
            0.05,
        ));
        let sup = r.anchor_interval.as_ref().map_or(f64::NEG_INFINITY, |iv| iv.sup_est);
        checks.push(Check::at_least(
            format!("d={d}: anchored sup of block integrals"),
            sup,
            LN_2 / f64::from(d) - 0.1,
        ));
        checks.push(Check::at_most(
            format!("d={d}: max quadrature error per block"),
            r.quadrature_error_bound,
            1e-9,
        ));
    }
    Ok(checks)
}

fn log_primitive() -> Result<Vec<Check>> {
    let f = |z: f64| (z / z.ln()).sin();
    let (mut acc, mut lo, mut worst) = (0.0, 4f64.ln(), 0.0f64);
    for i in 0..=400 {
        let l = 10f64.powf(1.0 + 4.0 * f64::from(i) / 400.0);
        acc += integrate_pieces(&f, lo, l, 1.0, 1e-10)?.value;
        lo = l;
        worst = worst.max(acc.abs() / (6.0 * l.ln()));
    }
    Ok(vec![Check::at_most("max |int_{log 4}^L sin(z/log z) dz| / (6 log L)", worst, 1.0)])
}

fn hardy(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let ts: Vec<f64> = (0..=500).map(|i| 10f64.powf(1.0 + 3.0 * f64::from(i) / 500.0)).collect();
    let (mut hardy_gap, mut d_gap) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let x = uniform(rng, 10_000)?;
        let f = embed_pi(&x);
        let c = cesaro(&x);
        let norm = x.sup_norm();
        for &t in &ts {
            let d = hardy_h(&f, t)? - c.values()[t.ceil() as usize - 1];
            hardy_gap = hardy_gap.max(d.abs() * t / (4.0 * norm));
        }
        let y = uniform(rng, 15)?;
        let dy = embed_pi(&pietsch_d_truncation(&y).materialize(15)?);
        let py = embed_pi(&y);
        for &t in std::iter::once(&1.0).chain(&ts) {
            let gap = dy.integral_to(t)? - LN_2 * py.integral_to(t.log2())?;
            d_gap = d_gap.max(gap.abs() / (2.0 * LN_2 * y.sup_norm()));
        }
    }
    Ok(vec![
        Check::at_most("max t |H pi(x)(t) - (Cx)_{ceil t - 1}| / (4 ||x||)", hardy_gap, 1.0),
        Check::at_most("max |int pi(Dx) - log 2 int pi(x)| / (2 log 2 ||x||)", d_gap, 1.0),
    ])
}
