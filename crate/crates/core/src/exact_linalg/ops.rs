//! Exact operations on rational matrices.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::float::FloatMatrix;
use super::integer::{bareiss_det, fraction_free_inverse, integer_rank, IntMatrix};
use super::matrix::Matrix;
use super::rational::{format_rational, lcm_of_denominators, parse_rational, to_f64, truncate_rational, Rational};
use crate::error::{Error, Result};

pub type RationalMatrix = Matrix<Rational>;

impl RationalMatrix {
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let c = rows.first().map_or(0, |r| r.len());
        Matrix::from_fn(rows.len(), c, |i, j| Rational::from_integer(BigInt::from(rows[i][j])))
    }

    pub fn from_ints(a: &IntMatrix) -> Self {
        a.map(|x| Rational::from_integer(x.clone()))
    }

    pub fn from_strings(rows: &[Vec<String>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        let data = rows
            .iter()
            .flatten()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_vec(r, c, data)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.to_rows()
            .iter()
            .map(|row| row.iter().map(format_rational).collect())
            .collect()
    }

    pub fn to_f64(&self) -> FloatMatrix {
        self.map(to_f64)
    }

    pub fn is_integral(&self) -> bool {
        self.entries().iter().all(|x| x.is_integer())
    }

    /// Splits `A = Ã / g` with `Ã` integral and `g > 0` the lcm of the denominators.
    pub fn integerize(&self) -> (IntMatrix, BigInt) {
        let g = lcm_of_denominators(self.entries());
        let gi = Rational::from_integer(g.clone());
        (self.map(|x| (x * &gi).to_integer()), g)
    }

    pub fn det(&self) -> Result<Rational> {
        let n = self.ensure_square("determinant")?;
        // Scale each row to integers separately to keep entries small.
        let mut scale = BigInt::one();
        let mut rows = Vec::with_capacity(n * n);
        for i in 0..n {
            let g = lcm_of_denominators(self.row(i));
            let gi = Rational::from_integer(g.clone());
            rows.extend(self.row(i).iter().map(|x| (x * &gi).to_integer()));
            scale *= g;
        }
        let d = bareiss_det(&Matrix::from_vec(n, n, rows)?)?;
        Ok(Rational::new(d, scale))
    }

    pub fn invert(&self) -> Result<Self> {
        self.ensure_square("inverse")?;
        let (a, g) = self.integerize();
        let (r, d) = fraction_free_inverse(&a)?;
        Ok(r.map(|x| Rational::new(x * &g, d.clone())))
    }

    pub fn rank(&self) -> usize {
        let mut rows = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            let g = Rational::from_integer(lcm_of_denominators(self.row(i)));
            rows.extend(self.row(i).iter().map(|x| (x * &g).to_integer()));
        }
        integer_rank(&Matrix::from_vec(self.rows(), self.cols(), rows).expect("shape"))
    }

    /// Entrywise truncation toward zero to `bits` fractional bits.
    pub fn truncate(&self, bits: u64) -> Self {
        self.map(|x| truncate_rational(x, bits))
    }

    /// Exact positive definiteness test through the pivots of `LDLᵀ`.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let n = self.rows();
        let mut m = self.to_rows();
        for k in 0..n {
            if !m[k][k].is_positive() {
                return false;
            }
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let f = &m[i][k] / &m[k][k];
                for j in k + 1..n {
                    let v = &f * &m[k][j];
                    m[i][j] -= v;
                }
            }
        }
        true
    }

    /// Largest bit size of any entry.
    pub fn max_bits(&self) -> u64 {
        self.entries().iter().map(super::rational::bit_size).max().unwrap_or(0)
    }
}

impl Matrix<BigInt> {
    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Result<Self> {
        Matrix::from_vec(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect())
    }
}

/// `|a − b|∞` as a rational.
pub fn max_abs_diff(a: &RationalMatrix, b: &RationalMatrix) -> Result<Rational> {
    Ok(a.sub(b)?.max_abs())
}

pub fn zero_rational() -> Rational {
    Rational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rational::{rat, ratio};

    #[test]
    fn det_examples() {
        assert_eq!(RationalMatrix::identity(2).det().unwrap(), rat(1));
        assert_eq!(RationalMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]).det().unwrap(), rat(-2));
        let skew = RationalMatrix::from_i64_rows(&[&[0, 1, 1], &[-1, 0, 1], &[-1, -1, 0]]);
        assert_eq!(skew.det().unwrap(), rat(0));
        assert!(RationalMatrix::zeros(2, 3).det().is_err());
        let mut half = RationalMatrix::identity(2);
        half[(0, 0)] = ratio(1, 2);
        half[(1, 0)] = ratio(1, 3);
        assert_eq!(half.det().unwrap(), ratio(1, 2));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(RationalMatrix::identity(3).invert().unwrap(), RationalMatrix::identity(3));
        let d = RationalMatrix::from_i64_rows(&[&[2, 0], &[0, 4]]);
        let mut want = RationalMatrix::zeros(2, 2);
        want[(0, 0)] = ratio(1, 2);
        want[(1, 1)] = ratio(1, 4);
        assert_eq!(d.invert().unwrap(), want);
        let a = RationalMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.invert().unwrap(), RationalMatrix::from_i64_rows(&[&[1, -1], &[-1, 2]]));
        let s = RationalMatrix::from_i64_rows(&[&[1, 1], &[1, 1]]);
        assert!(matches!(s.invert(), Err(Error::Singular { .. })));
    }

    #[test]
    fn kron_examples() {
        let b = RationalMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(RationalMatrix::identity(1).kron(&b), b);
        let k = RationalMatrix::identity(2).kron(&RationalMatrix::identity(3));
        assert_eq!((k.rows(), k.cols()), (6, 6));
        let e11 = RationalMatrix::unit(2, 2, 0, 0);
        let e22 = RationalMatrix::unit(2, 2, 1, 1);
        assert_eq!(e11.kron(&e22), RationalMatrix::unit(4, 4, 1, 1));
    }

    #[test]
    fn truncate_examples() {
        let mut a = RationalMatrix::zeros(1, 3);
        a[(0, 0)] = ratio(1, 3);
        a[(0, 1)] = ratio(3, 4);
        a[(0, 2)] = ratio(-1, 3);
        let t = a.truncate(4);
        assert_eq!(t.entries(), &[ratio(5, 16), ratio(3, 4), ratio(-5, 16)]);
    }

    #[test]
    fn positive_definite() {
        assert!(RationalMatrix::from_i64_rows(&[&[2, 1], &[1, 2]]).is_positive_definite());
        assert!(!RationalMatrix::from_i64_rows(&[&[1, 2], &[2, 1]]).is_positive_definite());
        assert!(!RationalMatrix::from_i64_rows(&[&[1, 0], &[0, 0]]).is_positive_definite());
    }

    #[test]
    fn rank_of_rational() {
        let mut a = RationalMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.rank(), 1);
        a[(1, 1)] = ratio(9, 2);
        assert_eq!(a.rank(), 2);
    }
}
