//! Classification of the example corpus at 2^20 blocks.

use std::sync::Arc;
use std::time::Instant;

use tracelab::generators::{gen_diag_of_d, gen_harmonic, gen_x_alt_dyadic, gen_y_dif1, gen_y_dif2, AnSequence};
use tracelab::measurability::{classify, ClassStatus, OperatorModel, Tolerances, TraceDiagnostics};
use tracelab::residue::{block_integrals, q_example};
use tracelab::sequence::TabulatedSequence;
use tracelab::{BlockSequence, Granularity};

const NB: usize = 1 << 20;

fn run(op: OperatorModel) -> TraceDiagnostics {
    let t = Instant::now();
    let d = classify(&op, NB, &Tolerances::default()).unwrap();
    eprintln!(
        "{:<24} {:>6.2}s pt={:?} d={:?} cd={:?} dm={:?} iv=[{:.4}, {:.4}] taub={:.2e} flags={:?}",
        d.label,
        t.elapsed().as_secs_f64(),
        d.pt,
        d.dixmier,
        d.connes_dixmier,
        d.dm,
        d.re.interval.inf_est,
        d.re.interval.sup_est,
        d.re.tauberian.identity_residual,
        d.flags
    );
    d
}

fn corpus() -> Vec<TraceDiagnostics> {
    let an = |n| -> Arc<dyn BlockSequence> { Arc::new(AnSequence::new(n, NB).unwrap()) };
    let (q, _) = block_integrals(&q_example(1).unwrap(), NB).unwrap();
    let q_seq: Arc<dyn BlockSequence> = Arc::new(TabulatedSequence::new(
        q.into_values(),
        Granularity::BlockOnly,
        "q-block-integrals",
    ));
    vec![
        run(OperatorModel::diagonal(Arc::new(gen_harmonic()), "harmonic")),
        run(gen_diag_of_d(Arc::new(gen_y_dif1()), "D(y-dif1)").unwrap()),
        run(gen_diag_of_d(Arc::new(gen_y_dif2()), "D(y-dif2)").unwrap()),
        run(gen_diag_of_d(Arc::new(gen_x_alt_dyadic()), "D(x-alt-dyadic)").unwrap()),
        run(OperatorModel::diagonal(an(1), "a-n(1)")),
        run(OperatorModel::diagonal(an(2), "a-n(2)")),
        run(OperatorModel::diagonal(q_seq, "q-block-integrals")),
    ]
}

fn value(v: tracelab::measurability::Verdict) -> f64 {
    v.value.expect("measurable verdict carries a value")
}

#[test]
fn corpus_verdicts() {
    use ClassStatus::*;
    let c = corpus();
    for d in &c {
        // one-sided inclusion chain and D = CD on every input
        assert!(d.flags.iter().all(|f| !f.starts_with("inclusion")), "{}: {:?}", d.label, d.flags);
        assert_eq!(d.dixmier.status, d.connes_dixmier.status, "{}", d.label);
        assert!(d.re.tauberian.pass, "{}", d.label);
        assert!(d.re.tauberian.identity_residual <= 1e-12, "{}", d.label);
    }
    let by = |l: &str| c.iter().find(|d| d.label == l).unwrap();

    let h = by("harmonic");
    for v in [h.pt, h.dixmier, h.connes_dixmier, h.dm] {
        assert_eq!(v.status, Measurable);
        assert!((value(v) - 1.0).abs() < 0.01);
    }
    assert!(h.re.interval.inf_est >= 0.99 && h.re.interval.sup_est <= 1.01);

    let y1 = by("D(y-dif1)");
    assert_eq!(y1.pt.status, NotMeasurable);
    assert_eq!(y1.dixmier.status, Measurable);
    assert!((value(y1.dixmier) - 1.0).abs() <= 0.02);
    assert!((value(y1.dm) - 1.0).abs() <= 0.02);
    assert!((y1.re.interval.inf_est - 1.0).abs() < 0.05 && (y1.re.interval.sup_est - 2.0).abs() < 0.05);

    let y2 = by("D(y-dif2)");
    assert_eq!(y2.dixmier.status, NotMeasurable);
    assert_eq!(y2.dm.status, Measurable);
    assert!((value(y2.dm) - 1.5).abs() <= 0.03);

    let x = by("D(x-alt-dyadic)");
    assert_eq!(x.dixmier.status, NotMeasurable);
    assert_eq!(x.dm.status, Measurable);
    assert!(value(x.dm).abs() <= 0.03);

    for l in ["a-n(1)", "a-n(2)"] {
        let a = by(l);
        assert_eq!(a.pt.status, NotMeasurable, "{l}");
        assert!(a.re.interval.sup_est >= 1.0 / (2.0 * std::f64::consts::LN_2) - 0.05, "{l}");
    }

    let q = by("q-block-integrals");
    assert_eq!(q.dixmier.status, Measurable);
    assert!(value(q.dixmier).abs() < 0.05);
}
