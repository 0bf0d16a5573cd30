//! Non-commutative rank of pencils and polynomial-entry matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_linalg::rational::rat;
use crate::scaling::{decide_fullness, ScalingConfig, ScalingRun};
use crate::symbolic::{higman_linearize, Formula, LinearMatrixPencil, SymbolicMatrix};

/// Number of random substitutions behind a commutative rank estimate.
pub const DEFAULT_TRIALS: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankMethod {
    ClassicalBorders,
    QuantumPadding,
}

/// Verdict of one scaling run inside a rank search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubVerdict {
    /// `r` for the classical search, `c` for the quantum one.
    pub parameter: usize,
    pub dim: usize,
    pub kraus: usize,
    pub rank_decreasing: bool,
    pub iterations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub ncrank: usize,
    pub method: RankMethod,
    pub commutative_rank_estimate: usize,
    pub trials: usize,
    pub subverdicts: Vec<SubVerdict>,
}

impl RankReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Scaling run of the operator attached to a square pencil.
pub fn fullness_run(p: &LinearMatrixPencil, cfg: &ScalingConfig) -> Result<ScalingRun> {
    decide_fullness(&p.to_operator()?, cfg)
}

/// Whether a square pencil is invertible over the free skew field.
pub fn fullness(p: &LinearMatrixPencil, cfg: &ScalingConfig) -> Result<bool> {
    Ok(!fullness_run(p, cfg)?.verdict.is_rank_decreasing())
}

/// Largest rank of `Σ βᵢ Aᵢ` over random integer points of the homogeneous lift.
pub fn commutative_rank_estimate(p: &LinearMatrixPencil, trials: usize, seed: u64) -> usize {
    let lifted = p.affine_to_linear();
    let bound = substitution_bound(p.rows().max(p.cols()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials.max(1))
        .map(|_| {
            let beta: Vec<_> = (0..lifted.var_count()).map(|_| rat(rng.gen_range(-bound..=bound))).collect();
            lifted.eval_scalar(&beta).expect("one scalar per variable").rank()
        })
        .max()
        .unwrap_or(0)
}

/// Commutative rank estimate for a matrix of formulas.
pub fn symbolic_rank_estimate(m: &SymbolicMatrix, trials: usize, seed: u64) -> usize {
    let bound = substitution_bound(m.rows().max(m.cols()));
    let q = m.max_var();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials.max(1))
        .filter_map(|_| {
            let beta: Vec<_> = (0..q).map(|_| rat(rng.gen_range(-bound..=bound))).collect();
            m.eval_scalar(&beta).ok().map(|x| x.rank())
        })
        .max()
        .unwrap_or(0)
}

fn substitution_bound(n: usize) -> i64 {
    2 * (n.max(1) as i64).pow(2)
}

/// Binary search for the largest `c` such that the operator is `c`-rank-decreasing.
///
/// Rectangular pencils are padded with zero rows or columns first: a zero row or
/// column leaves the nc-rank unchanged, so the padded co-rank `n − ncrank` is what
/// the search finds.
pub fn ncrank_quantum(p: &LinearMatrixPencil, cfg: &ScalingConfig, trials: usize, seed: u64) -> Result<RankReport> {
    let square = p.pad_to_square();
    let t = square.to_operator()?;
    let n = t.n();
    let mut subverdicts = Vec::new();
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let c = (lo + hi + 1) / 2;
        let padded = t.pad_bar(c)?;
        let run = decide_fullness(&padded, cfg)?;
        let decreasing = run.verdict.is_rank_decreasing();
        subverdicts.push(SubVerdict {
            parameter: c,
            dim: padded.n(),
            kraus: padded.m(),
            rank_decreasing: decreasing,
            iterations: run.iterations(),
        });
        if decreasing {
            lo = c;
        } else {
            hi = c - 1;
        }
    }
    Ok(RankReport {
        ncrank: n - lo,
        method: RankMethod::QuantumPadding,
        commutative_rank_estimate: commutative_rank_estimate(p, trials, seed),
        trials: trials.max(1),
        subverdicts,
    })
}

/// `[[0, U, 0], [0, I, −M], [−V, 0, I]]` with generic `U` (`r×rows`) and `V` (`cols×r`).
///
/// Its Schur complement is `U·M·V`, so it is full exactly when `U·M·V` is. Returns the
/// matrix together with the names of all variables in index order.
pub fn bordered_product(m: &SymbolicMatrix, r: usize) -> Result<(SymbolicMatrix, Vec<String>)> {
    let (rows, cols) = (m.rows(), m.cols());
    let q = m.max_var();
    let dim = r + rows + cols;
    let mut names: Vec<String> = (1..=q).map(|i| format!("x{i}")).collect();
    let mut grid = vec![Formula::int(0); dim * dim];
    let mut set = |i: usize, j: usize, f: Formula| grid[i * dim + j] = f;
    for i in 0..r {
        for j in 0..rows {
            names.push(format!("u_{}_{}", i + 1, j + 1));
            set(i, r + j, Formula::var(names.len()));
        }
    }
    for i in 0..rows {
        set(r + i, r + i, Formula::int(1));
        for j in 0..cols {
            let f = m.entry(i, j);
            if !f.is_zero_const() {
                set(r + i, r + rows + j, Formula::sub(Formula::int(0), f.clone()));
            }
        }
    }
    for i in 0..cols {
        for j in 0..r {
            names.push(format!("v_{}_{}", i + 1, j + 1));
            set(r + rows + i, j, Formula::sub(Formula::int(0), Formula::var(names.len())));
        }
        set(r + rows + i, r + rows + i, Formula::int(1));
    }
    Ok((SymbolicMatrix::new(dim, dim, grid)?, names))
}

/// Tests `r = 1, 2, …` and stops at the first `r` whose bordered product is not full.
pub fn ncrank_classical(m: &SymbolicMatrix, cfg: &ScalingConfig, trials: usize, seed: u64) -> Result<RankReport> {
    if m.entries().iter().any(Formula::has_inverse) {
        return Err(Error::Unsupported("classical nc-rank needs division-free entries".into()));
    }
    let mut subverdicts = Vec::new();
    let mut ncrank = 0;
    for r in 1..=m.rows().min(m.cols()) {
        let (bordered, names) = bordered_product(m, r)?;
        let (pencil, _) = higman_linearize(&bordered)?;
        let pencil = LinearMatrixPencil::new(
            pencil.rows(),
            pencil.cols(),
            names[..pencil.var_count()].to_vec(),
            pencil.a0().cloned(),
            pencil.coeffs().to_vec(),
        )?;
        let t = pencil.to_operator()?;
        let run = decide_fullness(&t, cfg)?;
        let decreasing = run.verdict.is_rank_decreasing();
        subverdicts.push(SubVerdict {
            parameter: r,
            dim: t.n(),
            kraus: t.m(),
            rank_decreasing: decreasing,
            iterations: run.iterations(),
        });
        if decreasing {
            break;
        }
        ncrank = r;
    }
    Ok(RankReport {
        ncrank,
        method: RankMethod::ClassicalBorders,
        commutative_rank_estimate: symbolic_rank_estimate(m, trials, seed),
        trials: trials.max(1),
        subverdicts,
    })
}
