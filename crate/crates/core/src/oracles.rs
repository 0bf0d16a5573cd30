//! Brute-force ground truth used by tests and by `--verify`.
//!
//! Nothing here calls into the scaling code or the fraction-free linear algebra.

use std::collections::BTreeSet;

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cp_operator::CpOperator;
use crate::error::{Error, Result};
use crate::exact_linalg::rational::rat;
use crate::exact_linalg::{Rational, RationalMatrix};
use crate::matrix_scaling::NonnegMatrix;
use crate::symbolic::{Formula, LinearMatrixPencil};

/// Bipartite graph on `n + n` vertices, edges zero-based `(row, col)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= n || j >= n) {
            return Err(Error::OutOfRange(format!("edge ({i}, {j}) outside a side of size {n}")));
        }
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }
}

/// Maximum matching size by repeated augmenting paths.
pub fn maximum_matching(g: &BipartiteGraph) -> usize {
    let mut adj = vec![Vec::new(); g.n];
    for (i, j) in g.edges() {
        adj[i].push(j);
    }
    let mut owner: Vec<Option<usize>> = vec![None; g.n];
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].map_or(true, |k| augment(k, adj, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    (0..g.n)
        .filter(|&i| augment(i, &adj, &mut vec![false; g.n], &mut owner))
        .count()
}

pub fn perfect_matching_exists(g: &BipartiteGraph) -> bool {
    maximum_matching(g) == g.n
}

/// Largest size accepted by [`brute_force_permanent`].
pub const PERMANENT_MAX_N: usize = 8;

/// Exact permanent by Ryser's inclusion–exclusion formula.
pub fn brute_force_permanent(a: &NonnegMatrix) -> Result<Rational> {
    let n = a.n();
    if n > PERMANENT_MAX_N {
        return Err(Error::OutOfRange(format!("permanent oracle is capped at n = {PERMANENT_MAX_N}, got {n}")));
    }
    if n == 0 {
        return Ok(Rational::one());
    }
    let m = a.entries();
    let mut total = Rational::zero();
    for subset in 1u32..(1 << n) {
        let mut prod = Rational::one();
        for i in 0..n {
            let row: Rational = (0..n).filter(|j| subset >> j & 1 == 1).map(|j| m[(i, j)].clone()).sum();
            prod *= row;
            if prod.is_zero() {
                break;
            }
        }
        if (n - subset.count_ones() as usize) % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    Ok(total)
}

/// Largest dimension accepted by [`brute_force_capacity`].
pub const CAPACITY_MAX_N: usize = 4;
/// Number of random starts of the local search.
pub const CAPACITY_STARTS: usize = 32;

struct LogCapacity {
    n: usize,
    kraus: Vec<Vec<f64>>,
}

/// Bound on every search coordinate; keeps `X` well conditioned in double precision.
const THETA_BOUND: f64 = 16.0;

impl LogCapacity {
    /// `X = U·diag(e^θ)·Uᵀ` with `U` unit lower triangular; the diagonal parameters come first.
    fn factors(&self, theta: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut u = vec![0.0; n * n];
        let mut k = n;
        for i in 0..n {
            u[i * n + i] = 1.0;
            for j in 0..i {
                u[i * n + j] = theta[k];
                k += 1;
            }
        }
        (theta[..n].to_vec(), u)
    }

    /// `ln det T(X) − ln det X`.
    ///
    /// `T(X) = BᵀB` where `B` stacks the blocks `D^{1/2}·Uᵀ·Aₖᵀ`; the rows are strongly
    /// graded, so the QR factorization sorts them and pivots columns.
    fn value(&self, theta: &[f64]) -> f64 {
        if theta.iter().any(|t| t.abs() > THETA_BOUND) {
            return f64::INFINITY;
        }
        let n = self.n;
        let (logd, u) = self.factors(theta);
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(self.kraus.len() * n);
        for a in &self.kraus {
            for i in 0..n {
                let scale = (logd[i] / 2.0).exp();
                // row i of Uᵀ Aᵀ is (A·U[:, i])ᵀ
                rows.push((0..n).map(|c| scale * (0..n).map(|t| a[c * n + t] * u[t * n + i]).sum::<f64>()).collect());
            }
        }
        match log_gram_det(&mut rows, n) {
            Some(v) => v - logd.iter().sum::<f64>(),
            None => f64::INFINITY,
        }
    }

    /// The same quantity evaluated in exact rational arithmetic.
    fn exact_value(&self, op: &CpOperator, theta: &[f64]) -> Option<f64> {
        let n = self.n;
        let (logd, u) = self.factors(theta);
        let conv = |x: f64| crate::exact_linalg::rational::from_f64(x).ok();
        let u = RationalMatrix::from_vec(n, n, u.into_iter().map(conv).collect::<Option<Vec<_>>>()?).ok()?;
        let d: Vec<Rational> = logd.iter().map(|t| conv(t.exp())).collect::<Option<_>>()?;
        let mut dm = RationalMatrix::zeros(n, n);
        for (i, v) in d.iter().enumerate() {
            dm[(i, i)] = v.clone();
        }
        let x = u.mul(&dm).ok()?.mul(&u.transpose()).ok()?;
        let mut tx = RationalMatrix::zeros(n, n);
        for a in op.kraus() {
            tx = tx.add(&a.mul(&x).ok()?.mul(&a.transpose()).ok()?).ok()?;
        }
        let det_x: Rational = d.iter().product();
        let ratio = gauss_det(&tx).ok()? / det_x;
        Some(crate::exact_linalg::rational::to_f64(&ratio))
    }
}

/// `ln det(BᵀB)` for a tall matrix `B` given by rows, via Householder QR with rows sorted
/// by decreasing norm and column pivoting.
fn log_gram_det(b: &mut [Vec<f64>], n: usize) -> Option<f64> {
    let rows = b.len();
    let inf_norm = |r: &Vec<f64>| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    b.sort_by(|x, y| inf_norm(y).total_cmp(&inf_norm(x)));
    let mut acc = 0.0;
    for k in 0..n {
        let col_norm = |j: usize, b: &[Vec<f64>]| (k..rows).map(|i| b[i][j] * b[i][j]).sum::<f64>();
        let p = (k..n).max_by(|&x, &y| col_norm(x, b).total_cmp(&col_norm(y, b)))?;
        if p != k {
            for r in b.iter_mut() {
                r.swap(p, k);
            }
        }
        let norm = col_norm(k, b).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return None;
        }
        let alpha = if b[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|i| b[i][k]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv > 0.0 {
            for j in k..n {
                let dot: f64 = (k..rows).map(|i| v[i - k] * b[i][j]).sum();
                let f = 2.0 * dot / vv;
                for i in k..rows {
                    b[i][j] -= f * v[i - k];
                }
            }
        }
        acc += 2.0 * alpha.abs().ln();
    }
    Some(acc)
}

impl CostFunction for LogCapacity {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.value(p))
    }
}

fn nelder_mead(problem: &LogCapacity, start: Vec<f64>, step: f64, iters: u64) -> (Vec<f64>, f64) {
    let mut simplex = vec![start.clone()];
    for k in 0..start.len() {
        let mut v = start.clone();
        v[k] += step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex).with_sd_tolerance(1e-13).expect("valid tolerance");
    let problem = LogCapacity { n: problem.n, kraus: problem.kraus.clone() };
    match Executor::new(problem, solver).configure(|s| s.max_iters(iters)).run() {
        Ok(res) => {
            let state = res.state();
            let best = state.get_best_param().cloned().unwrap_or(start);
            (best, state.get_best_cost())
        }
        Err(_) => (start, f64::INFINITY),
    }
}

/// `inf det T(X)` over `X ≻ 0` with `det X = 1`, by multi-start Nelder–Mead.
///
/// Returns the best value found; an upper estimate of the capacity.
pub fn brute_force_capacity(t: &CpOperator, seed: u64) -> Result<f64> {
    let n = t.n();
    if n > CAPACITY_MAX_N {
        return Err(Error::OutOfRange(format!("capacity oracle is capped at n = {CAPACITY_MAX_N}, got {n}")));
    }
    let kraus: Vec<Vec<f64>> = t
        .kraus()
        .iter()
        .map(|a| a.entries().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
        .collect();
    let problem = LogCapacity { n, kraus };
    let dim = n * (n + 1) / 2;
    let origin = vec![0.0; dim];
    if !problem.value(&origin).is_finite() {
        return Err(Error::Precondition("T(I) is singular".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = problem.exact_value(t, &origin).unwrap_or(f64::INFINITY);
    for s in 0..CAPACITY_STARTS {
        let start: Vec<f64> = if s == 0 { origin.clone() } else { (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect() };
        let (mut p, mut v) = nelder_mead(&problem, start, 0.5, 4000);
        for step in [0.5, 0.1, 0.02] {
            let (q, w) = nelder_mead(&problem, p.clone(), step, 4000);
            if w < v {
                (p, v) = (q, w);
            }
        }
        if let Some(exact) = problem.exact_value(t, &p) {
            best = best.min(exact);
        }
    }
    Ok(best)
}

/// Determinant by Gaussian elimination with rational pivots.
pub fn gauss_det(a: &RationalMatrix) -> Result<Rational> {
    let n = a.ensure_square("determinant")?;
    let mut m: Vec<Vec<Rational>> = a.to_rows();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else { return Ok(Rational::zero()) };
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        let pivot = m[k][k].clone();
        det *= &pivot;
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &pivot;
            for j in k..n {
                let d = &f * &m[k][j];
                m[i][j] -= d;
            }
        }
    }
    Ok(det)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlowupVerdict {
    Singular,
    Nonsingular,
}

/// Random blow-up test at dimension `max(1, n − 1)`.
pub fn blowup_singularity_oracle(p: &LinearMatrixPencil, trials: usize, seed: u64) -> Result<BlowupVerdict> {
    let d = p.rows().saturating_sub(1).max(1);
    blowup_at_dimension(p, d, trials, seed)
}

/// Nonsingular iff some trial has `det(Σ Bᵢ ⊗ Aᵢ) ≠ 0` with random integer `d×d` matrices `Bᵢ`.
pub fn blowup_at_dimension(p: &LinearMatrixPencil, d: usize, trials: usize, seed: u64) -> Result<BlowupVerdict> {
    if !p.is_square() {
        return Err(Error::Dimension("blow-up test needs a square pencil".into()));
    }
    let lifted = p.affine_to_linear();
    let n = p.rows();
    let bound = 2 * (n.max(1) as i64).pow(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials.max(1) {
        let mut sum = RationalMatrix::zeros(n * d, n * d);
        for a in lifted.coeffs() {
            let b = RationalMatrix::from_fn(d, d, |_, _| rat(rng.gen_range(-bound..=bound)));
            sum = sum.add(&b.kron(a))?;
        }
        if !gauss_det(&sum)?.is_zero() {
            return Ok(BlowupVerdict::Nonsingular);
        }
    }
    Ok(BlowupVerdict::Singular)
}

/// Prime modulus of the evaluation oracle.
pub const EVAL_PRIME: u64 = (1 << 61) - 1;

type Mat = Vec<Vec<u64>>;

fn mulmod(a: u64, b: u64) -> u64 {
    (a as u128 * b as u128 % EVAL_PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reduce(x: &Rational) -> Option<u64> {
    let p = num_bigint::BigInt::from(EVAL_PRIME);
    let num = (x.numer() % &p + &p) % &p;
    let den = (x.denom() % &p + &p) % &p;
    let (num, den) = (num.to_u64()?, den.to_u64()?);
    (den != 0).then(|| mulmod(num, powmod(den, EVAL_PRIME - 2)))
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).fold(0, |acc, k| (acc + mulmod(a[i][k], b[k][j])) % EVAL_PRIME))
                .collect()
        })
        .collect()
}

fn mat_inv(a: &Mat) -> Option<Mat> {
    let d = a.len();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    for k in 0..d {
        let p = (k..d).find(|&i| m[i][k] != 0)?;
        m.swap(p, k);
        let inv = powmod(m[k][k], EVAL_PRIME - 2);
        for v in m[k].iter_mut() {
            *v = mulmod(*v, inv);
        }
        for i in 0..d {
            if i != k && m[i][k] != 0 {
                let f = m[i][k];
                for j in 0..2 * d {
                    let sub = mulmod(f, m[k][j]);
                    m[i][j] = (m[i][j] + EVAL_PRIME - sub) % EVAL_PRIME;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[d..].to_vec()).collect())
}

fn eval_mod(f: &Formula, xs: &[Mat], d: usize) -> Option<Mat> {
    let scalar = |c: u64| (0..d).map(|i| (0..d).map(|j| if i == j { c } else { 0 }).collect()).collect::<Mat>();
    let zip = |a: Mat, b: Mat, neg: bool| -> Mat {
        a.into_iter()
            .zip(b)
            .map(|(r, s)| {
                r.into_iter()
                    .zip(s)
                    .map(|(x, y)| if neg { (x + EVAL_PRIME - y) % EVAL_PRIME } else { (x + y) % EVAL_PRIME })
                    .collect()
            })
            .collect()
    };
    Some(match f {
        Formula::Var(i) => xs.get(i.checked_sub(1)?)?.clone(),
        Formula::Const(c) => scalar(reduce(c)?),
        Formula::Add(a, b) => zip(eval_mod(a, xs, d)?, eval_mod(b, xs, d)?, false),
        Formula::Sub(a, b) => zip(eval_mod(a, xs, d)?, eval_mod(b, xs, d)?, true),
        Formula::Mul(a, b) => mat_mul(&eval_mod(a, xs, d)?, &eval_mod(b, xs, d)?),
        Formula::Inv(a) => mat_inv(&eval_mod(a, xs, d)?)?,
    })
}

/// Outcome of random matrix evaluation of a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalVerdict {
    Zero,
    Nonzero,
    /// No sampled point was inside the domain.
    NoPointInDomain,
}

/// Evaluates `Φ` at `trials` random `d×d` matrices over `F_p` with `p = 2⁶¹ − 1`.
///
/// Points where an inner inversion fails are skipped.
pub fn rit_matrix_evaluation(phi: &Formula, d: usize, trials: usize, seed: u64) -> EvalVerdict {
    let d = d.max(1);
    let q = phi.max_var();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_domain = 0;
    for _ in 0..trials {
        let xs: Vec<Mat> = (0..q)
            .map(|_| (0..d).map(|_| (0..d).map(|_| rng.gen_range(0..EVAL_PRIME)).collect()).collect())
            .collect();
        let Some(value) = eval_mod(phi, &xs, d) else { continue };
        in_domain += 1;
        if value.iter().flatten().any(|&x| x != 0) {
            return EvalVerdict::Nonzero;
        }
    }
    if in_domain == 0 {
        EvalVerdict::NoPointInDomain
    } else {
        EvalVerdict::Zero
    }
}
