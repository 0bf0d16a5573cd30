//! Fraction-free elimination over the integers.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matrix::Matrix;
use crate::error::{Error, Result};

pub type IntMatrix = Matrix<BigInt>;

/// Determinant by Bareiss elimination. Every division is exact.
pub fn bareiss_det(a: &IntMatrix) -> Result<BigInt> {
    let n = a.ensure_square("determinant")?;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut m = a.to_rows();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Ok(if negate { -prev } else { prev })
}

/// Whether a symmetric integer matrix is positive definite: Bareiss elimination
/// without pivoting yields the leading principal minors as pivots.
pub fn is_positive_definite_int(a: &IntMatrix) -> bool {
    let n = a.rows();
    if !a.is_square() || (0..n).any(|i| (0..i).any(|j| a[(i, j)] != a[(j, i)])) {
        return false;
    }
    let mut m = a.to_rows();
    let mut prev = BigInt::one();
    for k in 0..n {
        if !m[k][k].is_positive() {
            return false;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    true
}

/// Adjugate and determinant by fraction-free Gauss-Jordan elimination.
///
/// Returns `(adj A, det A)` with `A·adj A = det A·I`; fails when `A` is singular.
pub fn adjugate_det(a: &IntMatrix) -> Result<(IntMatrix, BigInt)> {
    let n = a.ensure_square("inverse")?;
    let w = 2 * n;
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return Err(Error::Singular { column: k }),
            }
        }
        let pivot_row = m[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let factor = row[k].clone();
            for j in k + 1..w {
                let mut v = &pivot_row[k] * &row[j];
                if !factor.is_zero() && !pivot_row[j].is_zero() {
                    v -= &factor * &pivot_row[j];
                }
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = pivot_row[k].clone();
    }
    // The row operations G satisfy G·A = prev·I, so the right block is prev·A⁻¹.
    let adj = Matrix::from_fn(n, n, |i, j| {
        let v = m[i][n + j].clone();
        if negate {
            -v
        } else {
            v
        }
    });
    Ok((adj, if negate { -prev } else { prev }))
}

/// Returns `(R, d)` with `A·R = d·I` and `d = |det A| > 0`.
pub fn fraction_free_inverse(a: &IntMatrix) -> Result<(IntMatrix, BigInt)> {
    let (adj, det) = adjugate_det(a)?;
    if det.is_negative() {
        Ok((adj.neg(), -det))
    } else {
        Ok((adj, det))
    }
}

/// Rank by fraction-free row reduction.
pub fn integer_rank(a: &IntMatrix) -> usize {
    let mut m = a.to_rows();
    let (rows, cols) = (a.rows(), a.cols());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = &m[rank][c] * &m[i][j] - &m[i][c] * &m[rank][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(rows: &[&[i64]]) -> IntMatrix {
        let n = rows.len();
        let c = rows[0].len();
        Matrix::from_fn(n, c, |i, j| BigInt::from(rows[i][j]))
    }

    #[test]
    fn positive_definite_by_minors() {
        assert!(is_positive_definite_int(&int(&[&[2, -1], &[-1, 2]])));
        assert!(!is_positive_definite_int(&int(&[&[1, 2], &[2, 1]])));
        assert!(!is_positive_definite_int(&int(&[&[0, 0], &[0, 1]])));
        assert!(!is_positive_definite_int(&int(&[&[2, 1], &[0, 2]])));
    }

    #[test]
    fn bareiss_small() {
        assert_eq!(bareiss_det(&int(&[&[1, 2], &[3, 4]])).unwrap(), BigInt::from(-2));
        assert_eq!(bareiss_det(&int(&[&[0, 1, 1], &[-1, 0, 1], &[-1, -1, 0]])).unwrap(), BigInt::zero());
        assert_eq!(bareiss_det(&int(&[&[0, 1], &[1, 0]])).unwrap(), BigInt::from(-1));
        assert_eq!(bareiss_det(&int(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]])).unwrap(), BigInt::from(6));
    }

    #[test]
    fn inverse_identity_relation() {
        let a = int(&[&[0, 2, 1], &[3, 1, 0], &[1, 1, 5]]);
        let (r, d) = fraction_free_inverse(&a).unwrap();
        assert!(d.is_positive());
        let prod = a.mul(&r).unwrap();
        assert_eq!(prod, IntMatrix::identity(3).scale(&d));
        assert_eq!(d, bareiss_det(&a).unwrap().abs());
    }

    #[test]
    fn adjugate_with_swaps() {
        let a = int(&[&[0, 1, 0], &[0, 0, 2], &[3, 0, 0]]);
        let (adj, det) = adjugate_det(&a).unwrap();
        assert_eq!(det, bareiss_det(&a).unwrap());
        assert_eq!(a.mul(&adj).unwrap(), IntMatrix::identity(3).scale(&det));
        let b = int(&[&[0, 1], &[1, 0]]);
        let (adj, det) = adjugate_det(&b).unwrap();
        assert_eq!(det, BigInt::from(-1));
        assert_eq!(b.mul(&adj).unwrap(), IntMatrix::identity(2).scale(&det));
    }

    #[test]
    fn singular_inverse_reports_column() {
        let a = int(&[&[1, 2], &[2, 4]]);
        assert_eq!(fraction_free_inverse(&a), Err(Error::Singular { column: 1 }));
    }

    #[test]
    fn rank_counts() {
        assert_eq!(integer_rank(&int(&[&[1, 2, 3], &[2, 4, 6]])), 1);
        assert_eq!(integer_rank(&int(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(integer_rank(&int(&[&[0, 1], &[1, 0], &[1, 1]])), 2);
    }
}
