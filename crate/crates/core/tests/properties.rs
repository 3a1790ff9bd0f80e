//! Inequalities with pinned constants, checked on random inputs.

use std::f64::consts::LN_2;

use proptest::prelude::*;
use tracelab::residue::{integrate_pieces, q_example, res_sequence};
use tracelab::sequence::{block_end, block_start, decreasing_rearrangement, quasi_norm_l1inf};
use tracelab::transforms::{cesaro, embed_pi, hardy_h, pietsch_d_truncation};
use tracelab::Truncation;

fn weak_l1(alpha: f64, u: &[f64]) -> Truncation {
    Truncation::from_fn(u.len(), |n| alpha * u[n] / (n as f64 + 1.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Prefix sums of `x* - x` stay within `alpha` when `x_n <= alpha/(n+1)`.
    #[test]
    fn rearrangement_prefix_defect(
        alpha in prop::sample::select(vec![1.0, 5.0]),
        u in prop::collection::vec(0.0f64..1.0, 1..10_000),
    ) {
        let x = weak_l1(alpha, &u);
        let xs = decreasing_rearrangement(&x);
        let mut acc = 0.0;
        for (a, b) in xs.values().iter().zip(x.values()) {
            acc += a - b;
            prop_assert!(acc.abs() <= alpha * (1.0 + 1e-12));
        }
    }

    /// Block sums of a decreasing sequence are bounded by its quasi-norm.
    #[test]
    fn block_sums_below_quasi_norm(u in prop::collection::vec(0.0f64..1.0, 1023)) {
        let x = decreasing_rearrangement(&weak_l1(3.0, &u));
        let q = quasi_norm_l1inf(&x).value;
        for n in 0..10 {
            let s: f64 = x.values()[block_start(n) as usize..=block_end(n) as usize].iter().sum();
            prop_assert!(s <= q * (1.0 + 1e-12));
        }
    }

    /// `|H pi(x)(t) - (Cx)_{ceil(t)-1}| <= 4 ||x|| / t`.
    #[test]
    fn hardy_matches_cesaro(
        x in prop::collection::vec(-1.0f64..1.0, 10_000),
        ts in prop::collection::vec(10.0f64..10_000.0, 50),
    ) {
        let x = Truncation::new(x).unwrap();
        let f = embed_pi(&x);
        let c = cesaro(&x);
        let norm = x.sup_norm();
        for t in ts {
            let d = hardy_h(&f, t).unwrap() - c.values()[t.ceil() as usize - 1];
            prop_assert!(d.abs() <= 4.0 * norm / t);
        }
    }

    /// `|int_0^t pi(Dx) - log 2 int_0^{log2 t} pi(x)| <= 2 log 2 ||x||`.
    #[test]
    fn d_integral_is_log_rescaled(
        x in prop::collection::vec(-1.0f64..1.0, 15),
        ts in prop::collection::vec(1.0f64..10_000.0, 50),
    ) {
        let x = Truncation::new(x).unwrap();
        let dx = embed_pi(&pietsch_d_truncation(&x).materialize(15).unwrap());
        let px = embed_pi(&x);
        for t in ts {
            let lhs = dx.integral_to(t).unwrap();
            let rhs = LN_2 * px.integral_to(t.log2()).unwrap();
            prop_assert!((lhs - rhs).abs() <= 2.0 * LN_2 * x.sup_norm());
        }
    }
}

#[test]
fn sine_of_z_over_log_z_has_logarithmic_primitive() {
    let f = |z: f64| (z / z.ln()).sin();
    let grid: Vec<f64> = (0..=400).map(|i| 10f64.powf(1.0 + 4.0 * i as f64 / 400.0)).collect();
    let mut acc = 0.0;
    let mut lo = 4f64.ln();
    for l in grid {
        acc += integrate_pieces(&f, lo, l, 1.0, 1e-10).unwrap().value;
        lo = l;
        assert!(acc.abs() <= 6.0 * l.ln(), "L={l}: {acc}");
    }
}

#[test]
fn q_residue_decays_like_loglog_over_log() {
    let grid: Vec<f64> = (0..=120).map(|i| 10f64.powf(3.0 + 3.0 * i as f64 / 120.0)).collect();
    for d in [1, 2, 4] {
        let (r, err) = res_sequence(&q_example(d).unwrap(), &grid).unwrap();
        assert!(err <= 1e-8);
        for (n, v) in grid.iter().zip(r.values()) {
            let b = 6.0 * n.ln().ln() / n.ln();
            assert!(v.abs() <= b, "d={d} n={n}: {v} > {b}");
        }
    }
}
