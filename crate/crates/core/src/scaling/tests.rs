use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::corpus::{hall_violator_edges, skew3_operator};
use crate::cp_operator::CpOperator;
use crate::exact_linalg::float::symmetric_eigenvalues;
use crate::exact_linalg::rational::{rat, to_f64};
use crate::exact_linalg::RationalMatrix;

fn modes() -> Vec<NumericMode> {
    vec![NumericMode::Float64, NumericMode::ExactCapped(256), NumericMode::ExactCertified]
}

fn e(n: usize, i: usize, j: usize) -> RationalMatrix {
    RationalMatrix::unit(n, n, i, j)
}

fn op(kraus: &[&[&[i64]]]) -> CpOperator {
    CpOperator::new(kraus.iter().map(|k| RationalMatrix::from_i64_rows(k)).collect()).unwrap()
}

#[test]
fn identity_is_full_at_first_step() {
    for mode in modes() {
        let t = CpOperator::new(vec![RationalMatrix::identity(3)]).unwrap();
        let run = run_fullness_test(&t, &ScalingConfig::new(mode)).unwrap();
        assert_eq!(run.verdict, Verdict::RankNonDecreasing, "{mode:?}");
        assert_eq!(run.first_hit, Some(1));
        assert_eq!(run.records[0].eps, 0.0);
    }
}

#[test]
fn singular_start_is_reported() {
    let t = CpOperator::new(vec![e(2, 0, 0), e(2, 0, 1)]).unwrap();
    let run = run_fullness_test(&t, &ScalingConfig::decision()).unwrap();
    assert_eq!(run.verdict, Verdict::RankDecreasing { reason: DecreasingReason::SingularStart });
    assert_eq!(run.iterations(), 0);
}

#[test]
fn skew_pencil_is_full_in_every_mode() {
    for mode in modes() {
        let run = run_fullness_test(&skew3_operator(), &ScalingConfig::new(mode)).unwrap();
        assert_eq!(run.verdict, Verdict::RankNonDecreasing, "{mode:?}");
    }
}

#[test]
fn hall_violator_is_rank_decreasing_in_every_mode() {
    let t = CpOperator::from_edges(3, &hall_violator_edges()).unwrap();
    for mode in modes() {
        let run = run_fullness_test(&t, &ScalingConfig::new(mode)).unwrap();
        assert!(run.verdict.is_rank_decreasing(), "{mode:?}: {:?}", run.verdict);
    }
}

#[test]
fn exhausted_steps_without_certificate() {
    let t = CpOperator::from_edges(3, &hall_violator_edges()).unwrap();
    let mut cfg = ScalingConfig::decision().with_max_iterations(40);
    cfg.early_certificate = false;
    let run = run_fullness_test(&t, &cfg).unwrap();
    assert_eq!(run.verdict, Verdict::RankDecreasing { reason: DecreasingReason::IterationsExhausted });
    assert_eq!(run.iterations(), 40);
    assert!(run.min_eps().unwrap() > 1.0 / 18.0);
}

#[test]
fn scalar_operators_short_circuit() {
    let zero = op(&[&[&[0]], &[&[0]]]);
    let run = run_fullness_test(&zero, &ScalingConfig::decision()).unwrap();
    assert_eq!(run.verdict, Verdict::RankDecreasing { reason: DecreasingReason::ZeroScalar });
    let two = op(&[&[&[2]], &[&[3]]]);
    let run = run_fullness_test(&two, &ScalingConfig::decision()).unwrap();
    assert_eq!(run.verdict, Verdict::RankNonDecreasing);
    let cap = approx_capacity(&two, 0.1, &ScalingConfig::capacity()).unwrap();
    assert_eq!(cap.exact_value, Some(rat(13)));
}

#[test]
fn capacity_of_identity_is_one() {
    for mode in modes() {
        let t = CpOperator::new(vec![RationalMatrix::identity(2)]).unwrap();
        let c = approx_capacity(&t, 0.1, &ScalingConfig::new(mode)).unwrap();
        assert_eq!(c.value, 1.0, "{mode:?}");
        let b = c.bracket.unwrap();
        assert_eq!((b.lower, b.upper), (rat(1), rat(1)));
    }
}

#[test]
fn capacity_of_diagonal_units() {
    let t = CpOperator::new(vec![e(2, 0, 0), e(2, 1, 1)]).unwrap();
    let c = approx_capacity(&t, 0.1, &ScalingConfig::capacity()).unwrap();
    assert!((c.value - 1.0).abs() <= 0.1);
}

#[test]
fn capacity_rescales_by_integerization() {
    let half = RationalMatrix::identity(2).scale(&crate::exact_linalg::rational::ratio(1, 2));
    let t = CpOperator::new(vec![half]).unwrap();
    for mode in modes() {
        let c = approx_capacity(&t, 0.1, &ScalingConfig::new(mode)).unwrap();
        assert!((c.value - 1.0 / 16.0).abs() < 1e-12, "{mode:?}: {}", c.value);
        assert_eq!(c.gamma, BigInt::from(2));
    }
}

#[test]
fn capacity_of_rank_decreasing_is_zero() {
    let t = CpOperator::from_edges(3, &hall_violator_edges()).unwrap();
    let c = approx_capacity(&t, 0.2, &ScalingConfig::capacity()).unwrap();
    assert_eq!(c.value, 0.0);
    assert!(c.run.verdict.is_rank_decreasing());
}

#[test]
fn capacity_bracket_contains_value() {
    let t = op(&[&[&[1, 2], &[0, 1]], &[&[0, 1], &[3, -1]]]);
    for mode in modes() {
        let c = approx_capacity(&t, 0.1, &ScalingConfig::new(mode)).unwrap();
        let b = c.bracket.expect("bracket at the crossing");
        let (lo, hi) = (to_f64(&b.lower), to_f64(&b.upper));
        assert!(lo <= hi);
        assert!(lo <= c.value * 1.1 && c.value * 0.9 <= hi, "{mode:?}: {lo} {} {hi}", c.value);
        assert!(lo >= 0.9 * hi, "{mode:?}: [{lo}, {hi}]");
    }
}

#[test]
fn dyadic_matches_rational_truncation() {
    let t = op(&[&[&[1, 2, 0], &[0, 1, 1], &[1, 0, 0]], &[&[0, 1, 0], &[3, -1, 0], &[0, 0, 2]]]);
    let dy = run_scaling(&t, &ScalingConfig::new(NumericMode::ExactCapped(96)), 12).unwrap();
    let mut cfg = ScalingConfig::new(NumericMode::ExactCertified);
    cfg.truncation_bits = Some(96);
    cfg.always_truncate = true;
    let ra = run_scaling(&t, &cfg, 12).unwrap();
    let a: Vec<_> = dy.records.iter().map(|r| r.eps_exact.clone()).collect();
    let b: Vec<_> = ra.records.iter().map(|r| r.eps_exact.clone()).collect();
    assert_eq!(a, b);
}

#[test]
fn exact_iterates_follow_recursion() {
    let t = op(&[&[&[1, 2], &[0, 1]], &[&[0, 1], &[1, -1]]]);
    let mut cfg = ScalingConfig::new(NumericMode::ExactCertified);
    cfg.keep_sequence = true;
    let run = run_scaling(&t, &cfg, 6).unwrap();
    let s = &run.sequence;
    // s[k] holds U_{k−1}.
    assert_eq!(s[1], t.dual_apply(&RationalMatrix::identity(2)).unwrap());
    for k in 2..s.len() {
        let j = k - 1;
        let inv = s[k - 1].invert().unwrap();
        let want = if j % 2 == 1 { t.apply(&inv) } else { t.dual_apply(&inv) }.unwrap();
        assert_eq!(s[k], want);
    }
    // Telescoping: Π_{j=2..r} Det(U_{j−3})/Det(U_{j−1}) = Det(U_{−1})Det(U_0)/(Det(U_{r−2})Det(U_{r−1})).
    let dets: Vec<_> = s.iter().map(|u| u.det().unwrap()).collect();
    let r = s.len() - 2;
    let mut prod = rat(1);
    for j in 2..=r {
        prod = prod * &dets[j - 2] / &dets[j];
    }
    assert_eq!(prod * &dets[r - 1] * &dets[r], &dets[0] * &dets[1]);
}

#[test]
fn eigenvalue_envelope() {
    let t = op(&[&[&[1, 2], &[0, 1]], &[&[0, 1], &[1, -1]]]);
    let mut cfg = ScalingConfig::new(NumericMode::ExactCertified);
    cfg.keep_sequence = true;
    let run = run_scaling(&t, &cfg, 8).unwrap();
    let meta = t.meta();
    let (n, m) = (2f64, meta.m as f64);
    let big_m = to_f64(&crate::exact_linalg::Rational::from_integer(meta.max_entry));
    let alpha = (big_m * big_m * n * n * m).powf(n - 1.0);
    for (k, u) in run.sequence.iter().enumerate().skip(1) {
        let j = (k - 1) as i32;
        for ev in symmetric_eigenvalues(&u.to_f64()) {
            assert!(ev >= alpha.powi(-(j + 1)) / 2.0 && ev <= 2.0 * alpha.powi(j + 1), "U_{j}: {ev}");
        }
    }
}

#[test]
fn coarse_truncation_drift_stays_in_envelope() {
    let t = op(&[&[&[1, 2], &[0, 1]], &[&[0, 1], &[1, -1]]]);
    let steps = 6;
    let mut exact_cfg = ScalingConfig::new(NumericMode::ExactCertified);
    exact_cfg.keep_sequence = true;
    let exact = run_scaling(&t, &exact_cfg, steps).unwrap();
    let mut coarse_cfg = exact_cfg.clone();
    coarse_cfg.truncation_bits = Some(8);
    coarse_cfg.always_truncate = true;
    let coarse = run_scaling(&t, &coarse_cfg, steps).unwrap();
    let meta = t.meta();
    let alpha = to_f64(&crate::exact_linalg::Rational::from_integer(meta.max_entry.pow(2) * 4 * meta.m));
    let delta = 2f64.powi(-8);
    for (k, (s, u)) in exact.sequence.iter().zip(&coarse.sequence).enumerate().skip(1) {
        let j = (k - 1) as f64;
        let drift = to_f64(&s.sub(u).unwrap().max_abs());
        let envelope = (2.0 * alpha).powf((2.0 * j + 1.0) * (j + 1.0)) * delta;
        assert!(drift <= envelope, "U_{j}: {drift} > {envelope}");
    }
}

#[test]
fn trace_export_has_one_line_per_step() {
    let t = op(&[&[&[1, 2], &[0, 1]], &[&[0, 1], &[1, -1]]]);
    let run = run_scaling(&t, &ScalingConfig::decision(), 5).unwrap();
    let text = run.to_jsonl();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first["j"], 1);
    assert!(first["eps_j"].is_string());
    assert!(first["log_det_accumulator"].is_number());
}

fn small_operator() -> impl Strategy<Value = CpOperator> {
    (2usize..=3, 1usize..=3).prop_flat_map(|(n, m)| {
        proptest::collection::vec(proptest::collection::vec(-3i64..=3, n * n), m).prop_map(move |ks| {
            CpOperator::new(
                ks.iter()
                    .map(|k| RationalMatrix::from_fn(n, n, |i, j| rat(k[i * n + j])))
                    .collect(),
            )
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn progress_and_normalized_upper_bound(t in small_operator()) {
        let cfg = ScalingConfig::capacity().with_max_iterations(60);
        let Ok(run) = run_scaling(&t, &cfg, 60) else { return Ok(()) };
        for r in &run.records {
            let p = r.progress.unwrap();
            // Right or left normalized operators have Det(T_j(I)) ≤ 1.
            prop_assert!(p.ln_det <= 1e-9 * (1.0 + p.gap));
            if p.gap <= 1.0 && (p.trace - t.n() as f64).abs() < 1e-9 {
                prop_assert!(p.ln_det.exp() <= (-p.gap / 6.0).exp() * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn capped_and_float_verdicts_agree(t in small_operator()) {
        let a = run_fullness_test(&t, &ScalingConfig::decision()).unwrap();
        let b = run_fullness_test(&t, &ScalingConfig::new(NumericMode::Float64));
        if let Ok(b) = b {
            prop_assert_eq!(a.verdict.is_rank_decreasing(), b.verdict.is_rank_decreasing());
        }
    }
}
