//! Shrunk subspace witnesses recovered from scaling iterates.
//!
//! A subspace `V` with `dim Σ AᵢV < dim V` proves that `T` is rank decreasing.
//! Candidates come from eigenvectors of a floating point iterate and are snapped
//! to small rationals; the witness itself is always checked exactly.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::Zero;

use crate::cp_operator::CpOperator;
use crate::exact_linalg::float::FloatMatrix;
use crate::exact_linalg::{Rational, RationalMatrix};

/// `(largest denominator, tolerance)` pairs tried in order: a strict pass with
/// general rationals, then a loose pass for slowly separating eigenspaces.
const SNAP_PASSES: [(i64, f64); 2] = [(1 << 12, 1e-6), (12, 1e-3)];

/// Witness that `dim Σ AᵢV < dim V` (or the same for the transposes).
#[derive(Clone, Debug, PartialEq)]
pub struct ShrunkSubspace {
    /// Columns span `V`.
    pub basis: RationalMatrix,
    /// Whether `V` shrinks under the transposed Kraus operators.
    pub dual: bool,
    /// `dim Σ AᵢV`.
    pub image_dim: usize,
}

/// `dim Σ AᵢV` for `V` spanned by the columns of `basis`.
pub fn image_dimension(op: &CpOperator, basis: &RationalMatrix, dual: bool) -> usize {
    let n = op.n();
    let k = basis.cols();
    let m = op.m();
    let mut stacked = RationalMatrix::zeros(n, m * k);
    for (t, a) in op.kraus().iter().enumerate() {
        let a = if dual { a.transpose() } else { a.clone() };
        let image = a.mul(basis).expect("basis has n rows");
        for i in 0..n {
            for c in 0..k {
                stacked[(i, t * k + c)] = image[(i, c)].clone();
            }
        }
    }
    stacked.rank()
}

/// Exactly checks a candidate; `None` unless it has full column rank and shrinks.
pub fn verify_shrunk(op: &CpOperator, basis: &RationalMatrix, dual: bool) -> Option<ShrunkSubspace> {
    let k = basis.cols();
    if k == 0 || basis.rank() < k {
        return None;
    }
    let image_dim = image_dimension(op, basis, dual);
    (image_dim < k).then(|| ShrunkSubspace { basis: basis.clone(), dual, image_dim })
}

/// Searches eigenspaces of a symmetric iterate for a shrunk subspace of `T` or `T*`.
pub fn find_shrunk_subspace(op: &CpOperator, iterate: &FloatMatrix) -> Option<ShrunkSubspace> {
    let n = op.n();
    if iterate.rows() != n || n < 2 {
        return None;
    }
    let scale = iterate.entries().iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if !scale.is_finite() || scale == 0.0 {
        return None;
    }
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (iterate[(i, j)] + iterate[(j, i)]) / scale);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut tried = Vec::new();
    for k in 1..n {
        for chosen in [&order[..k], &order[n - k..]] {
            let vectors: Vec<Vec<f64>> = chosen.iter().map(|&c| eig.eigenvectors.column(c).iter().copied().collect()).collect();
            for (max_den, tol) in SNAP_PASSES {
                let Some(basis) = snap_span(&vectors, n, max_den, tol) else { continue };
                if tried.contains(&basis) {
                    continue;
                }
                for dual in [false, true] {
                    if let Some(w) = verify_shrunk(op, &basis, dual) {
                        return Some(w);
                    }
                }
                tried.push(basis);
            }
        }
    }
    None
}

/// Reduced row echelon form of the spanning vectors, snapped to small rationals.
/// Returns the basis as columns.
fn snap_span(vectors: &[Vec<f64>], n: usize, max_den: i64, tol: f64) -> Option<RationalMatrix> {
    let k = vectors.len();
    let mut rows: Vec<Vec<f64>> = vectors.to_vec();
    let mut used = vec![false; n];
    for r in 0..k {
        let (row, col) = (r..k)
            .flat_map(|i| (0..n).filter(|&c| !used[c]).map(move |c| (i, c)))
            .max_by(|&(a, x), &(b, y)| rows[a][x].abs().total_cmp(&rows[b][y].abs()))?;
        let pivot = rows[row][col];
        if pivot.abs() < 1e-9 {
            return None;
        }
        rows.swap(r, row);
        used[col] = true;
        for v in rows[r].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = rows[r].clone();
        for (i, other) in rows.iter_mut().enumerate() {
            if i != r {
                let f = other[col];
                for (x, p) in other.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
    }
    let mut basis = RationalMatrix::zeros(n, k);
    for (c, row) in rows.iter().enumerate() {
        for (i, &x) in row.iter().enumerate() {
            basis[(i, c)] = snap(x, max_den, tol)?;
        }
    }
    Some(basis)
}

/// Continued fraction convergent of `x` within `tol`, with denominator at most `max_den`.
fn snap(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut y = x;
    for _ in 0..40 {
        let a = y.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a as f64;
        if (x - h1 as f64 / k1 as f64).abs() <= tol || frac.abs() < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    if k1 == 0 || (x - h1 as f64 / k1 as f64).abs() > tol {
        return None;
    }
    let r = Rational::new(BigInt::from(h1), BigInt::from(k1));
    Some(if r.is_zero() { Rational::zero() } else { r })
}
