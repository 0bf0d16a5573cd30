mod common;

use opscale::cp_operator::CpOperator;
use opscale::exact_linalg::rational::rat;
use opscale::exact_linalg::RationalMatrix;
use opscale::matrix_scaling::{permanent_positive, NonnegMatrix};
use opscale::ncrank::{commutative_rank_estimate, fullness, ncrank_classical, ncrank_quantum, symbolic_rank_estimate};
use opscale::oracles::{
    blowup_singularity_oracle, brute_force_capacity, brute_force_permanent, maximum_matching, perfect_matching_exists,
    BipartiteGraph, BlowupVerdict,
};
use opscale::scaling::{
    approx_capacity, capacity_lower_bound, decide_fullness, run_fullness_test, verify_shrunk, DecreasingReason,
    ScalingConfig, Verdict,
};
use opscale::symbolic::{higman_linearize, LinearMatrixPencil};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pencil_of(op: &CpOperator) -> LinearMatrixPencil {
    LinearMatrixPencil::from_coefficients(op.kraus().to_vec()).unwrap()
}

fn small_operator() -> impl Strategy<Value = CpOperator> {
    (2usize..=3, 1usize..=3, any::<u64>()).prop_map(|(n, m, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if seed % 3 == 0 {
            common::rank_one_operator(&mut rng, n, m)
        } else {
            common::random_operator(&mut rng, n, m, -2, 2)
        }
    })
}

fn support_operator(n: usize, mask: u32) -> CpOperator {
    let edges: Vec<_> = (0..n * n).filter(|k| mask >> k & 1 == 1).map(|k| (k / n, k % n)).collect();
    if edges.is_empty() {
        CpOperator::new(vec![RationalMatrix::zeros(n, n)]).unwrap()
    } else {
        CpOperator::from_edges(n, &edges).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn guided_decision_matches_plain_iteration(op in small_operator()) {
        let cfg = ScalingConfig::decision();
        let plain = run_fullness_test(&op, &cfg).unwrap();
        let guided = decide_fullness(&op, &cfg).unwrap();
        prop_assert_eq!(plain.verdict.is_rank_decreasing(), guided.verdict.is_rank_decreasing());
    }

    #[test]
    fn scaling_agrees_with_blowup_oracle(op in small_operator()) {
        let cfg = ScalingConfig::decision();
        let full = !run_fullness_test(&op, &cfg).unwrap().verdict.is_rank_decreasing();
        let oracle = blowup_singularity_oracle(&pencil_of(&op), 7, 1).unwrap();
        prop_assert_eq!(full, oracle == BlowupVerdict::Nonsingular);
    }

    #[test]
    fn ncrank_methods_agree_and_sandwich(op in small_operator(), cols in 1usize..=3) {
        let cfg = ScalingConfig::decision();
        let n = op.n();
        let kraus: Vec<_> = op.kraus().iter().map(|a| a.submatrix(0..n, 0..cols.min(n))).collect();
        let p = LinearMatrixPencil::from_coefficients(kraus).unwrap();
        let q = ncrank_quantum(&p, &cfg, 5, 3).unwrap();
        let c = ncrank_classical(&opscale::symbolic::SymbolicMatrix::from_pencil(&p), &cfg, 5, 3).unwrap();
        prop_assert_eq!(q.ncrank, c.ncrank);
        let comm = commutative_rank_estimate(&p, 5, 3);
        prop_assert!(comm <= q.ncrank);
        prop_assert!(q.ncrank <= 2 * comm);
        prop_assert!(q.ncrank <= p.rows().min(p.cols()));
    }

    #[test]
    fn capacity_respects_oracle_and_lower_bound(op in small_operator()) {
        prop_assume!(op.n() == 2);
        let cfg = ScalingConfig::decision();
        prop_assume!(!run_fullness_test(&op, &cfg).unwrap().verdict.is_rank_decreasing());
        let meta = op.meta();
        let lb = opscale::exact_linalg::rational::to_f64(&capacity_lower_bound(meta.n, meta.m, &meta.max_entry));
        let oracle = brute_force_capacity(&op, 7).unwrap();
        prop_assert!(oracle >= lb);
        let approx = approx_capacity(&op, 0.1, &ScalingConfig::capacity()).unwrap();
        if let Some(b) = &approx.bracket {
            let (lo, hi) = (opscale::exact_linalg::rational::to_f64(&b.lower), opscale::exact_linalg::rational::to_f64(&b.upper));
            prop_assert!(lo <= oracle * (1.0 + 1e-6) && oracle <= hi * (1.0 + 1e-6), "{lo} {oracle} {hi}");
        }
    }
}

#[test]
fn matching_family_up_to_three_is_exhaustive() {
    let cfg = ScalingConfig::decision();
    for n in 1..=3usize {
        for mask in 0u32..(1 << (n * n)) {
            let op = support_operator(n, mask);
            let edges: Vec<_> = (0..n * n).filter(|k| mask >> k & 1 == 1).map(|k| (k / n, k % n)).collect();
            let graph = BipartiteGraph::new(n, edges).unwrap();
            let full = !decide_fullness(&op, &cfg).unwrap().verdict.is_rank_decreasing();
            assert_eq!(full, perfect_matching_exists(&graph), "n={n} mask={mask:b}");
        }
    }
}

#[test]
fn ncrank_of_unit_pencils_is_matching_number() {
    let cfg = ScalingConfig::decision();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..12 {
        let n = rng.gen_range(2..=4usize);
        let edges: Vec<_> = (0..n * n).filter(|_| rng.gen_bool(0.3)).map(|k| (k / n, k % n)).collect();
        if edges.is_empty() {
            continue;
        }
        let p = pencil_of(&CpOperator::from_edges(n, &edges).unwrap());
        let graph = BipartiteGraph::new(n, edges).unwrap();
        assert_eq!(ncrank_quantum(&p, &cfg, 5, 1).unwrap().ncrank, maximum_matching(&graph));
    }
}

#[test]
fn permanent_positivity_matches_matching() {
    for n in 1..=3usize {
        for mask in 0u32..(1 << (n * n)) {
            let a = NonnegMatrix::new(RationalMatrix::from_fn(n, n, |i, j| rat(i64::from(mask >> (i * n + j) & 1)))).unwrap();
            let graph = BipartiteGraph::new(n, a.support()).unwrap();
            let per = brute_force_permanent(&a).unwrap();
            assert_eq!(per > rat(0), perfect_matching_exists(&graph));
            assert_eq!(permanent_positive(&a), perfect_matching_exists(&graph));
        }
    }
}

#[test]
fn higman_shifts_ncrank_by_added_rows() {
    let cfg = ScalingConfig::decision();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..8 {
        let m = common::random_symbolic_matrix(&mut rng);
        let (lin, k) = higman_linearize(&m).unwrap();
        let direct = ncrank_classical(&m, &cfg, 5, 2).unwrap().ncrank;
        let linear = ncrank_quantum(&lin, &cfg, 5, 2).unwrap().ncrank;
        assert_eq!(linear, direct + k, "{m:?}");
        assert_eq!(symbolic_rank_estimate(&m, 5, 2) + k, commutative_rank_estimate(&lin, 5, 2));
    }
}

/// `I + N` with `N` strictly upper triangular in `{−1, 0, 1}`.
fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> RationalMatrix {
    RationalMatrix::from_fn(n, n, |i, j| rat(if i == j { 1 } else if i < j { rng.gen_range(-1..=1) } else { 0 }))
}

#[test]
fn hidden_shrunk_subspaces_are_found() {
    let cfg = ScalingConfig::decision();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut witnessed = 0;
    for _ in 0..12 {
        let n = rng.gen_range(3..=5);
        // Columns 1.. land in the first n − 2 rows, so span(e₁, …) shrinks.
        let (p, q) = (unimodular(&mut rng, n), unimodular(&mut rng, n));
        let kraus = (0..3)
            .map(|_| {
                let a = RationalMatrix::from_fn(n, n, |r, c| rat(if c >= 1 && r >= n - 2 { 0 } else { rng.gen_range(-2..=2) }));
                p.mul(&a).unwrap().mul(&q).unwrap()
            })
            .collect();
        let op = CpOperator::new(kraus).unwrap();
        let run = decide_fullness(&op, &cfg).unwrap();
        assert!(run.verdict.is_rank_decreasing());
        witnessed += usize::from(run.verdict == Verdict::RankDecreasing { reason: DecreasingReason::ShrunkSubspace });
    }
    assert!(witnessed >= 6, "{witnessed}/12 witnessed");
    let op = CpOperator::from_edges(3, &[(0, 0), (1, 0), (2, 1), (2, 2)]).unwrap();
    let v = RationalMatrix::from_fn(3, 2, |i, c| rat(i64::from(i == c + 1)));
    assert_eq!(verify_shrunk(&op, &v, false).unwrap().image_dim, 1);
    assert!(!fullness(&pencil_of(&op), &cfg).unwrap());
}
