//! Completely positive operators given by Kraus lists.

pub(crate) mod json;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::rational::{bit_size, lcm_of_denominators};
use crate::exact_linalg::{FloatMatrix, IntMatrix, Matrix, Rational, RationalMatrix, Scalar};

pub use json::{operator_from_json, operator_to_json};

/// `T(X) = Σ Aᵢ X Aᵢᵀ` over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpOperator {
    n: usize,
    kraus: Vec<RationalMatrix>,
}

/// Size parameters entering the iteration and precision bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMeta {
    pub n: usize,
    pub m: usize,
    /// Largest absolute entry after integerization.
    pub max_entry: BigInt,
    /// Largest entry bit size of the original Kraus list.
    pub bits: u64,
    /// Integerization factor.
    pub gamma: BigInt,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DsReport<T> {
    pub ds_value: T,
    pub row_gap: T,
    pub col_gap: T,
}

impl CpOperator {
    pub fn new(kraus: Vec<RationalMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::Dimension("an operator needs at least one Kraus matrix".into()))?;
        let n = first.rows();
        if n == 0 {
            return Err(Error::Dimension("Kraus matrices must be at least 1x1".into()));
        }
        for (i, a) in kraus.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(Error::Dimension(format!(
                    "Kraus matrix {i} is {}x{}, expected {n}x{n}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(Self { n, kraus })
    }

    /// Rank-one family `{E_ij : (i, j) ∈ edges}` with zero-based indices.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if edges.is_empty() {
            return Self::new(vec![RationalMatrix::zeros(n, n)]);
        }
        if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= n || j >= n) {
            return Err(Error::Dimension(format!("edge ({i}, {j}) outside a graph of size {n}")));
        }
        Self::new(edges.iter().map(|&(i, j)| RationalMatrix::unit(n, n, i, j)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.kraus.len()
    }

    pub fn kraus(&self) -> &[RationalMatrix] {
        &self.kraus
    }

    pub fn is_integral(&self) -> bool {
        self.kraus.iter().all(|a| a.is_integral())
    }

    pub fn meta(&self) -> OperatorMeta {
        let gamma = lcm_of_denominators(self.kraus.iter().flat_map(|a| a.entries()));
        let g = Rational::from_integer(gamma.clone());
        let max_entry = self
            .kraus
            .iter()
            .flat_map(|a| a.entries())
            .map(|x| (x * &g).to_integer().abs())
            .max()
            .unwrap_or_default();
        let bits = self.kraus.iter().map(|a| a.max_bits()).max().unwrap_or(0);
        OperatorMeta { n: self.n, m: self.m(), max_entry, bits, gamma }
    }

    pub fn apply(&self, x: &RationalMatrix) -> Result<RationalMatrix> {
        self.check_arg(x)?;
        Ok(SparseKraus::from_operator(self).apply(x))
    }

    pub fn dual_apply(&self, x: &RationalMatrix) -> Result<RationalMatrix> {
        self.check_arg(x)?;
        Ok(SparseKraus::from_operator(self).dual_apply(x))
    }

    fn check_arg<T>(&self, x: &Matrix<T>) -> Result<()> {
        if x.rows() != self.n || x.cols() != self.n {
            return Err(Error::Dimension(format!(
                "operator acts on {0}x{0} matrices, got {1}x{2}",
                self.n,
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }

    /// The dual operator, with transposed Kraus matrices.
    pub fn dual(&self) -> Self {
        Self { n: self.n, kraus: self.kraus.iter().map(|a| a.transpose()).collect() }
    }

    pub fn ds(&self) -> DsReport<Rational> {
        let id = RationalMatrix::identity(self.n);
        let sk = SparseKraus::from_operator(self);
        let gap = |y: RationalMatrix| {
            let d = y.sub(&id).expect("square");
            d.trace_of_product(&d).expect("square")
        };
        let row_gap = gap(sk.apply(&id));
        let col_gap = gap(sk.dual_apply(&id));
        DsReport { ds_value: &row_gap + &col_gap, row_gap, col_gap }
    }

    pub fn ds_f64(&self) -> DsReport<f64> {
        let id = FloatMatrix::identity(self.n);
        let sk = SparseKraus::from_operator(self).to_f64();
        let gap = |y: FloatMatrix| {
            let d = y.sub(&id).expect("square");
            d.trace_of_product(&d).expect("square")
        };
        let row_gap = gap(sk.apply(&id));
        let col_gap = gap(sk.dual_apply(&id));
        DsReport { ds_value: row_gap + col_gap, row_gap, col_gap }
    }

    /// Kraus list `{Aᵢ ⊗ Dⱼ}` of `T₁ ⊗ T₂`.
    pub fn tensor(&self, other: &Self) -> Self {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |d| a.kron(d)))
            .collect();
        Self { n: self.n * other.n, kraus }
    }

    /// Keeps a maximal linearly independent subfamily, in input order.
    ///
    /// Only the rank-decreasing verdict survives this; the operator itself changes.
    pub fn reduce_kraus_basis(&self) -> Self {
        let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
        let mut kept = Vec::new();
        for a in &self.kraus {
            let mut v = a.entries().to_vec();
            for (p, row) in &echelon {
                if v[*p].is_zero() {
                    continue;
                }
                let f = &v[*p] / &row[*p];
                for (x, r) in v.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *x -= &f * r;
                    }
                }
            }
            if let Some(p) = v.iter().position(|x| !x.is_zero()) {
                echelon.push((p, v));
                kept.push(a.clone());
            }
        }
        if kept.is_empty() {
            kept.push(RationalMatrix::zeros(self.n, self.n));
        }
        Self { n: self.n, kraus: kept }
    }

    /// Scales every Kraus matrix by the lcm `γ` of all denominators.
    ///
    /// `cap(out) = γ^{2n}·cap(self)`.
    pub fn integerize(&self) -> (Self, BigInt) {
        let gamma = lcm_of_denominators(self.kraus.iter().flat_map(|a| a.entries()));
        let g = Rational::from_integer(gamma.clone());
        let kraus = self.kraus.iter().map(|a| a.scale(&g)).collect();
        (Self { n: self.n, kraus }, gamma)
    }

    /// Integer Kraus matrices; fails unless the operator is integral.
    pub fn integer_kraus(&self) -> Result<Vec<IntMatrix>> {
        if !self.is_integral() {
            return Err(Error::Precondition("operator is not integral; integerize first".into()));
        }
        Ok(self.kraus.iter().map(|a| a.map(|x| x.to_integer())).collect())
    }

    /// Operator on dimension `n + c − 1` that is rank-decreasing iff `self` is `c`-rank-decreasing.
    ///
    /// Acts as `X ↦ blockdiag(T(X₁₁) + tr(X₂₂)·I_n, tr(X₁₁)·I_{c−1})`.
    pub fn pad_bar(&self, c: usize) -> Result<Self> {
        let n = self.n;
        if c < 1 || c > n {
            return Err(Error::OutOfRange(format!("padding parameter c = {c} outside [1, {n}]")));
        }
        let dim = n + c - 1;
        let mut kraus: Vec<RationalMatrix> =
            self.kraus.iter().map(|a| a.pad_to(dim, dim)).collect();
        for k in 0..n {
            for l in 0..c - 1 {
                kraus.push(RationalMatrix::unit(dim, dim, k, n + l));
            }
        }
        for k in 0..n {
            for l in 0..c - 1 {
                kraus.push(RationalMatrix::unit(dim, dim, n + l, k));
            }
        }
        Ok(Self { n: dim, kraus })
    }

    pub fn max_entry_bits(&self) -> u64 {
        self.kraus.iter().flat_map(|a| a.entries()).map(bit_size).max().unwrap_or(0)
    }
}

/// Kraus list stored as nonzero triples, over any scalar type.
#[derive(Clone, Debug)]
pub struct SparseKraus<T> {
    n: usize,
    ops: Vec<Vec<(usize, usize, T)>>,
}

impl SparseKraus<Rational> {
    pub fn from_operator(op: &CpOperator) -> Self {
        Self { n: op.n, ops: op.kraus.iter().map(|a| a.nonzeros()).collect() }
    }

    pub fn to_f64(&self) -> SparseKraus<f64> {
        self.map(crate::exact_linalg::rational::to_f64)
    }

    pub fn to_integer(&self) -> Result<SparseKraus<BigInt>> {
        if self.ops.iter().flatten().any(|(_, _, v)| !v.is_integer()) {
            return Err(Error::Precondition("operator is not integral; integerize first".into()));
        }
        Ok(self.map(|x| x.to_integer()))
    }
}

impl<T: Scalar> SparseKraus<T> {
    pub fn from_matrices(n: usize, kraus: &[Matrix<T>]) -> Self {
        Self { n, ops: kraus.iter().map(|a| a.nonzeros()).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> SparseKraus<U> {
        SparseKraus {
            n: self.n,
            ops: self
                .ops
                .iter()
                .map(|op| op.iter().map(|(i, j, v)| (*i, *j, f(v))).collect())
                .collect(),
        }
    }

    fn sandwich(&self, x: &Matrix<T>, transpose: bool) -> Matrix<T> {
        let n = self.n;
        let mut out = Matrix::<T>::zeros(n, n);
        for op in &self.ops {
            // y = A·X (or Aᵀ·X), then out += y·Aᵀ (or y·A).
            let mut y = Matrix::<T>::zeros(n, n);
            for (i, k, a) in op {
                let (r, c) = if transpose { (*k, *i) } else { (*i, *k) };
                for j in 0..n {
                    let xv = &x[(c, j)];
                    if !xv.is_zero() {
                        y[(r, j)] = y[(r, j)].clone() + a.clone() * xv.clone();
                    }
                }
            }
            for (i, k, a) in op {
                let (r, c) = if transpose { (*k, *i) } else { (*i, *k) };
                for p in 0..n {
                    let yv = &y[(p, c)];
                    if !yv.is_zero() {
                        out[(p, r)] = out[(p, r)].clone() + yv.clone() * a.clone();
                    }
                }
            }
        }
        out
    }

    /// `Σ Aᵢ X Aᵢᵀ`.
    pub fn apply(&self, x: &Matrix<T>) -> Matrix<T> {
        self.sandwich(x, false)
    }

    /// `Σ Aᵢᵀ X Aᵢ`.
    pub fn dual_apply(&self, x: &Matrix<T>) -> Matrix<T> {
        self.sandwich(x, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rational::{rat, ratio};

    fn e(n: usize, i: usize, j: usize) -> RationalMatrix {
        RationalMatrix::unit(n, n, i, j)
    }

    #[test]
    fn apply_examples() {
        let id = CpOperator::new(vec![RationalMatrix::identity(2)]).unwrap();
        let x = RationalMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(id.apply(&x).unwrap(), x);
        let t = CpOperator::new(vec![e(2, 0, 0), e(2, 0, 1)]).unwrap();
        assert_eq!(t.apply(&RationalMatrix::identity(2)).unwrap(), e(2, 0, 0).scale(&rat(2)));
        let d = CpOperator::new(vec![e(2, 0, 0), e(2, 1, 1)]).unwrap();
        let x = RationalMatrix::from_i64_rows(&[&[5, 7], &[7, 9]]);
        assert_eq!(d.apply(&x).unwrap(), RationalMatrix::from_i64_rows(&[&[5, 0], &[0, 9]]));
        assert!(d.apply(&RationalMatrix::identity(3)).is_err());
    }

    #[test]
    fn dual_examples() {
        let t = CpOperator::new(vec![e(2, 0, 0), e(2, 0, 1)]).unwrap();
        assert_eq!(t.dual_apply(&RationalMatrix::identity(2)).unwrap(), RationalMatrix::identity(2));
        let x = RationalMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let id = CpOperator::new(vec![RationalMatrix::identity(2)]).unwrap();
        assert_eq!(id.dual_apply(&x).unwrap(), x);
    }

    #[test]
    fn dense_agrees_with_sparse() {
        let a = RationalMatrix::from_i64_rows(&[&[1, -2, 0], &[0, 3, 1], &[2, 0, -1]]);
        let b = RationalMatrix::from_i64_rows(&[&[0, 1, 1], &[1, 0, 0], &[0, 0, 2]]);
        let x = RationalMatrix::from_i64_rows(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let t = CpOperator::new(vec![a.clone(), b.clone()]).unwrap();
        let dense = |p: &RationalMatrix, q: &RationalMatrix| p.mul(&x).unwrap().mul(q).unwrap();
        let want = dense(&a, &a.transpose()).add(&dense(&b, &b.transpose())).unwrap();
        assert_eq!(t.apply(&x).unwrap(), want);
        let dense_t = |p: &RationalMatrix| p.transpose().mul(&x).unwrap().mul(p).unwrap();
        assert_eq!(t.dual_apply(&x).unwrap(), dense_t(&a).add(&dense_t(&b)).unwrap());
    }

    #[test]
    fn ds_examples() {
        let id = CpOperator::new(vec![RationalMatrix::identity(3)]).unwrap();
        assert_eq!(id.ds().ds_value, rat(0));
        let t = CpOperator::new(vec![e(2, 0, 0), e(2, 0, 1)]).unwrap();
        let r = t.ds();
        assert_eq!((r.row_gap, r.col_gap, r.ds_value), (rat(2), rat(0), rat(2)));
        let one = CpOperator::new(vec![RationalMatrix::identity(1)]).unwrap();
        assert_eq!(one.ds().ds_value, rat(0));
    }

    #[test]
    fn tensor_shapes() {
        let a = CpOperator::new(vec![RationalMatrix::identity(2)]).unwrap();
        let b = CpOperator::new(vec![RationalMatrix::identity(3)]).unwrap();
        let t = a.tensor(&b);
        assert_eq!(t.kraus(), &[RationalMatrix::identity(6)]);
        let a2 = CpOperator::new(vec![e(2, 0, 0), e(2, 1, 1)]).unwrap();
        let b3 = CpOperator::new(vec![e(2, 0, 0), e(2, 1, 0), e(2, 0, 1)]).unwrap();
        assert_eq!(a2.tensor(&b3).m(), 6);
    }

    #[test]
    fn reduce_basis_examples() {
        let i2 = RationalMatrix::identity(2);
        let t = CpOperator::new(vec![i2.clone(), i2.scale(&rat(2))]).unwrap();
        assert_eq!(t.reduce_kraus_basis().kraus(), &[i2]);
        let sum = e(2, 0, 0).add(&e(2, 0, 1)).unwrap();
        let t = CpOperator::new(vec![e(2, 0, 0), e(2, 0, 1), sum]).unwrap();
        assert_eq!(t.reduce_kraus_basis().kraus(), &[e(2, 0, 0), e(2, 0, 1)]);
        let t = CpOperator::new(vec![e(2, 0, 0), e(2, 1, 1)]).unwrap();
        assert_eq!(t.reduce_kraus_basis(), t);
    }

    #[test]
    fn integerize_examples() {
        let t = CpOperator::new(vec![e(2, 0, 1)]).unwrap();
        let (u, g) = t.integerize();
        assert_eq!((u, g), (t, BigInt::from(1)));
        let mut half = RationalMatrix::zeros(1, 1);
        half[(0, 0)] = ratio(1, 2);
        let (u, g) = CpOperator::new(vec![half]).unwrap().integerize();
        assert_eq!(g, BigInt::from(2));
        assert_eq!(u.kraus(), &[RationalMatrix::identity(1)]);
        let mut a = RationalMatrix::zeros(1, 1);
        a[(0, 0)] = ratio(1, 2);
        let mut b = RationalMatrix::zeros(1, 1);
        b[(0, 0)] = ratio(2, 3);
        assert_eq!(CpOperator::new(vec![a, b]).unwrap().integerize().1, BigInt::from(6));
    }

    #[test]
    fn pad_bar_shapes() {
        let t = CpOperator::new(vec![e(2, 0, 0), e(2, 1, 1)]).unwrap();
        assert_eq!(t.pad_bar(1).unwrap(), t);
        let p = t.pad_bar(2).unwrap();
        assert_eq!((p.n(), p.m()), (3, 2 + 2 * 2));
        assert!(t.pad_bar(0).is_err());
        assert!(t.pad_bar(3).is_err());
    }

    #[test]
    fn pad_bar_block_formula() {
        let a = RationalMatrix::from_i64_rows(&[&[1, 2], &[0, -1]]);
        let t = CpOperator::new(vec![a, e(2, 1, 0)]).unwrap();
        let p = t.pad_bar(2).unwrap();
        let x = RationalMatrix::from_i64_rows(&[&[3, 1, 2], &[1, 5, -1], &[2, -1, 7]]);
        let x11 = x.submatrix(0..2, 0..2);
        let x22 = x.submatrix(2..3, 2..3);
        let top = t.apply(&x11).unwrap().add(&RationalMatrix::identity(2).scale(&x22.trace())).unwrap();
        let bottom = RationalMatrix::identity(1).scale(&x11.trace());
        assert_eq!(p.apply(&x).unwrap(), top.direct_sum(&bottom));
    }

    #[test]
    fn meta_after_integerization() {
        let mut a = RationalMatrix::zeros(2, 2);
        a[(0, 0)] = ratio(3, 2);
        a[(1, 0)] = ratio(-5, 3);
        let m = CpOperator::new(vec![a]).unwrap().meta();
        assert_eq!(m.gamma, BigInt::from(6));
        assert_eq!(m.max_entry, BigInt::from(10));
    }
}
