#![allow(dead_code)]

use opscale::cp_operator::CpOperator;
use opscale::exact_linalg::rational::rat;
use opscale::exact_linalg::RationalMatrix;
use opscale::symbolic::{Formula, SymbolicMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> RationalMatrix {
    RationalMatrix::from_fn(n, n, |_, _| rat(rng.gen_range(lo..=hi)))
}

pub fn random_operator(rng: &mut ChaCha8Rng, n: usize, m: usize, lo: i64, hi: i64) -> CpOperator {
    CpOperator::new((0..m).map(|_| random_matrix(rng, n, lo, hi)).collect()).unwrap()
}

/// Rank-one family `{u_k v_kᵀ}`; rank-decreasing whenever `m < n`.
pub fn rank_one_operator(rng: &mut ChaCha8Rng, n: usize, m: usize) -> CpOperator {
    let kraus = (0..m)
        .map(|_| {
            let u: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
            let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
            RationalMatrix::from_fn(n, n, |i, j| rat(u[i] * v[j]))
        })
        .collect();
    CpOperator::new(kraus).unwrap()
}

fn leaf(rng: &mut ChaCha8Rng, vars: usize) -> Formula {
    if rng.gen_bool(0.75) {
        Formula::var(rng.gen_range(1..=vars))
    } else {
        Formula::int(rng.gen_range(-3..=3))
    }
}

/// Division-free formula with at most `muls` products.
pub fn random_polynomial(rng: &mut ChaCha8Rng, vars: usize, depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng, vars);
    }
    let a = random_polynomial(rng, vars, depth - 1);
    let b = random_polynomial(rng, vars, depth - 1);
    match rng.gen_range(0..3) {
        0 => Formula::add(a, b),
        1 => Formula::sub(a, b),
        _ => Formula::mul(a, b),
    }
}

pub fn random_symbolic_matrix(rng: &mut ChaCha8Rng) -> SymbolicMatrix {
    let n = rng.gen_range(2..=3);
    let vars = rng.gen_range(1..=3);
    let entries = (0..n * n)
        .map(|_| if rng.gen_bool(0.2) { Formula::int(0) } else { random_polynomial(rng, vars, 2) })
        .collect();
    SymbolicMatrix::new(n, n, entries).unwrap()
}

/// Rational formula that is generically defined.
pub fn random_rational(rng: &mut ChaCha8Rng, vars: usize, depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, vars);
    }
    match rng.gen_range(0..4) {
        0 => Formula::add(random_rational(rng, vars, depth - 1), random_rational(rng, vars, depth - 1)),
        1 => Formula::sub(random_rational(rng, vars, depth - 1), random_rational(rng, vars, depth - 1)),
        2 => Formula::mul(random_rational(rng, vars, depth - 1), random_rational(rng, vars, depth - 1)),
        _ => Formula::inv(Formula::add(Formula::var(rng.gen_range(1..=vars)), random_rational(rng, vars, depth - 1))),
    }
}

/// Formula that is zero as a rational function, built from a random identity.
pub fn random_identity(rng: &mut ChaCha8Rng, vars: usize) -> Formula {
    let g = random_rational(rng, vars, 1);
    let h = random_rational(rng, vars, 1);
    let x = Formula::var(rng.gen_range(1..=vars));
    match rng.gen_range(0..4) {
        0 => Formula::sub(
            Formula::mul(g.clone(), Formula::add(h.clone(), x.clone())),
            Formula::add(Formula::mul(g.clone(), h), Formula::mul(g, x)),
        ),
        1 => {
            let a = Formula::add(x.clone(), Formula::int(2));
            Formula::sub(
                Formula::inv(Formula::mul(a.clone(), x.clone())),
                Formula::mul(Formula::inv(x), Formula::inv(a)),
            )
        }
        2 => Formula::sub(Formula::inv(Formula::inv(Formula::add(g.clone(), x.clone()))), Formula::add(g, x)),
        _ => Formula::sub(Formula::add(g.clone(), h.clone()), Formula::add(h, g)),
    }
}

/// Random formula that is usually nonzero.
pub fn random_nonzero_candidate(rng: &mut ChaCha8Rng, vars: usize) -> Formula {
    match rng.gen_range(0..3) {
        0 => {
            let g = random_rational(rng, vars, 1);
            let h = random_rational(rng, vars, 1);
            Formula::sub(Formula::mul(g.clone(), h.clone()), Formula::mul(h, g))
        }
        _ => random_rational(rng, vars, 3),
    }
}
