//! Double precision routines for the practical mode and the oracles.

use super::matrix::Matrix;
use crate::error::{Error, Result};

pub type FloatMatrix = Matrix<f64>;

/// Determinant by LU with partial pivoting.
pub fn det_f64(a: &FloatMatrix) -> Result<f64> {
    let n = a.ensure_square("determinant")?;
    let mut m = a.to_rows();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| m[x][k].abs().total_cmp(&m[y][k].abs()))
            .unwrap();
        if m[p][k] == 0.0 {
            return Ok(0.0);
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k + 1..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    Ok(det)
}

/// Inverse by Gauss-Jordan with partial pivoting.
pub fn invert_f64(a: &FloatMatrix) -> Result<FloatMatrix> {
    let n = a.ensure_square("inverse")?;
    let mut m = a.to_rows();
    let mut inv = FloatMatrix::identity(n).to_rows();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| m[x][k].abs().total_cmp(&m[y][k].abs()))
            .unwrap();
        if !m[p][k].is_finite() || m[p][k].abs() <= scale * 1e-300 {
            return Err(Error::Singular { column: k });
        }
        m.swap(p, k);
        inv.swap(p, k);
        let piv = m[k][k];
        for j in 0..n {
            m[k][j] /= piv;
            inv[k][j] /= piv;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m[i][k];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                m[i][j] -= f * m[k][j];
                inv[i][j] -= f * inv[k][j];
            }
        }
    }
    Ok(Matrix::from_fn(n, n, |i, j| inv[i][j]))
}

/// Lower Cholesky factor, or `None` when a pivot is not positive.
pub fn cholesky(a: &FloatMatrix) -> Option<FloatMatrix> {
    let n = a.rows();
    if !a.is_square() {
        return None;
    }
    let mut l = FloatMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// `ln det` of a symmetric positive definite matrix.
pub fn log_det_spd(a: &FloatMatrix) -> Option<f64> {
    let l = cholesky(a)?;
    Some((0..a.rows()).map(|i| 2.0 * l[(i, i)].ln()).sum())
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &FloatMatrix) -> Vec<f64> {
    let n = a.rows();
    let mut m = a.symmetrize();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off <= 1e-30 * m.frobenius_sq().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[(p, q)] == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * m[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}
