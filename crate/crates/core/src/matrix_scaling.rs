//! Classical Sinkhorn scaling of nonnegative matrices.

use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::cp_operator::json::{matrix_from_value, usize_field};
use crate::error::{Error, Result};
use crate::exact_linalg::rational::{ln_rational, to_f64};
use crate::exact_linalg::{FloatMatrix, Rational, RationalMatrix, Scalar};

/// Square matrix with nonnegative rational entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonnegMatrix {
    entries: RationalMatrix,
}

impl NonnegMatrix {
    pub fn new(entries: RationalMatrix) -> Result<Self> {
        entries.ensure_square("Sinkhorn scaling")?;
        if entries.entries().iter().any(|x| x.is_negative()) {
            return Err(Error::Precondition("entries must be nonnegative".into()));
        }
        Ok(Self { entries })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::new(RationalMatrix::from_i64_rows(rows))
    }

    /// Parses `{"n": int, "entries": [[rational-string, ...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        let n = usize_field(&doc, "n")?.ok_or_else(|| Error::Document("missing field `n`".into()))?;
        let entries = doc.get("entries").ok_or_else(|| Error::Document("missing field `entries`".into()))?;
        Self::new(matrix_from_value(entries, n, n, "entries")?)
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &RationalMatrix {
        &self.entries
    }

    /// No row or column is entirely zero.
    pub fn is_nontrivial(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).any(|j| !self.entries[(i, j)].is_zero()))
            && (0..n).all(|j| (0..n).any(|i| !self.entries[(i, j)].is_zero()))
    }

    /// Zero-one support pattern.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.entries.nonzeros().into_iter().map(|(i, j, _)| (i, j)).collect()
    }

    /// Default step count `⌈2 + 6n(n ln n + ln Σ entries)⌉`, computed after clearing denominators.
    pub fn default_iterations(&self) -> u64 {
        let (ints, _) = self.entries.integerize();
        let total: num_bigint::BigInt = ints.entries().iter().sum();
        let n = self.n() as f64;
        let l = if total.is_positive() { ln_rational(&Rational::from_integer(total)) } else { 0.0 };
        (2.0 + 6.0 * n * (n * n.ln() + l)).ceil().max(2.0) as u64
    }
}

fn row_sums<T: Scalar>(a: &crate::exact_linalg::Matrix<T>) -> Vec<T> {
    (0..a.rows()).map(|i| a.row(i).iter().fold(T::zero(), |s, x| s + x.clone())).collect()
}

fn col_sums<T: Scalar>(a: &crate::exact_linalg::Matrix<T>) -> Vec<T> {
    (0..a.cols())
        .map(|j| (0..a.rows()).fold(T::zero(), |s, i| s + a[(i, j)].clone()))
        .collect()
}

/// `‖R(A) − I‖² + ‖C(A) − I‖²`, where `R(A)` and `C(A)` hold the inverse row and column sums.
pub fn sinkhorn_ds<T: Scalar>(a: &crate::exact_linalg::Matrix<T>) -> T {
    let gap = |sums: Vec<T>| {
        sums.into_iter().fold(T::zero(), |acc, s| {
            let d = T::one() / s - T::one();
            acc + d.clone() * d
        })
    };
    gap(row_sums(a)) + gap(col_sums(a))
}

fn normalize_step<T: Scalar>(a: &mut crate::exact_linalg::Matrix<T>, rows: bool) {
    let n = a.rows();
    if rows {
        let sums = row_sums(a);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = a[(i, j)].clone() / sums[i].clone();
            }
        }
    } else {
        let sums = col_sums(a);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = a[(i, j)].clone() / sums[j].clone();
            }
        }
    }
}

fn scale_generic<T: Scalar>(mut a: crate::exact_linalg::Matrix<T>, t: u64) -> (crate::exact_linalg::Matrix<T>, Vec<T>) {
    let mut trace = Vec::with_capacity(t as usize);
    for step in 0..t {
        normalize_step(&mut a, step % 2 == 0);
        trace.push(sinkhorn_ds(&a));
    }
    (a, trace)
}

/// `t` alternating row and column normalizations, rows first, in exact arithmetic.
///
/// Returns the final matrix and `ds` after every step.
pub fn sinkhorn_scale(a: &NonnegMatrix, t: u64) -> Result<(RationalMatrix, Vec<Rational>)> {
    if !a.is_nontrivial() {
        return Err(Error::Precondition("a row or column is entirely zero".into()));
    }
    Ok(scale_generic(a.entries.clone(), t))
}

/// Double precision variant of [`sinkhorn_scale`].
pub fn sinkhorn_scale_f64(a: &NonnegMatrix, t: u64) -> Result<(FloatMatrix, Vec<f64>)> {
    if !a.is_nontrivial() {
        return Err(Error::Precondition("a row or column is entirely zero".into()));
    }
    Ok(scale_generic(a.entries.to_f64(), t))
}

/// Decides `Per(A) > 0` by checking whether `ds` drops below `1/n` within the default budget.
///
/// Runs in double precision; the comparison keeps a relative margin of `1e−9`.
pub fn permanent_positive(a: &NonnegMatrix) -> bool {
    permanent_positive_with(a, a.default_iterations())
}

pub fn permanent_positive_with(a: &NonnegMatrix, t: u64) -> bool {
    if !a.is_nontrivial() {
        return false;
    }
    let n = a.n() as f64;
    let threshold = (1.0 / n) * (1.0 - 1e-9);
    let mut m = a.entries.to_f64();
    if sinkhorn_ds(&m) < threshold {
        return true;
    }
    for step in 0..t {
        normalize_step(&mut m, step % 2 == 0);
        if sinkhorn_ds(&m) < threshold {
            return true;
        }
    }
    false
}

/// Exact variant of [`permanent_positive_with`].
pub fn permanent_positive_exact(a: &NonnegMatrix, t: u64) -> bool {
    if !a.is_nontrivial() {
        return false;
    }
    let threshold = Rational::new(One::one(), (a.n() as i64).into());
    let mut m = a.entries.clone();
    if sinkhorn_ds(&m) < threshold {
        return true;
    }
    for step in 0..t {
        normalize_step(&mut m, step % 2 == 0);
        if sinkhorn_ds(&m) < threshold {
            return true;
        }
    }
    false
}

/// `ds` values of a trace as doubles.
pub fn trace_to_f64(trace: &[Rational]) -> Vec<f64> {
    trace.iter().map(to_f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rational::{rat, ratio};

    #[test]
    fn doubly_stochastic_is_fixed() {
        let mut a = RationalMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                a[(i, j)] = ratio(1, 2);
            }
        }
        let m = NonnegMatrix::new(a.clone()).unwrap();
        let (out, trace) = sinkhorn_scale(&m, 4).unwrap();
        assert_eq!(out, a);
        assert!(trace.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn first_row_step() {
        let m = NonnegMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]).unwrap();
        let (out, _) = sinkhorn_scale(&m, 1).unwrap();
        assert_eq!(out.entries(), &[ratio(1, 2), ratio(1, 2), rat(0), rat(1)]);
    }

    #[test]
    fn sums_are_exact_after_each_step() {
        let m = NonnegMatrix::from_i64_rows(&[&[3, 1, 0], &[1, 2, 5], &[0, 4, 1]]).unwrap();
        for t in 1..6 {
            let (out, _) = sinkhorn_scale(&m, t).unwrap();
            let sums = if t % 2 == 1 { row_sums(&out) } else { col_sums(&out) };
            assert!(sums.iter().all(|s| *s == rat(1)));
        }
    }

    #[test]
    fn no_matching_stays_far() {
        let m = NonnegMatrix::from_i64_rows(&[&[1, 0, 0], &[1, 0, 0], &[1, 1, 1]]).unwrap();
        let (_, trace) = sinkhorn_scale_f64(&m, 27).unwrap();
        assert!(trace.iter().all(|&d| d >= 1.0 / 3.0));
        assert!(!permanent_positive(&m));
        assert!(!permanent_positive_exact(&m, 27));
    }

    #[test]
    fn permanent_examples() {
        assert!(permanent_positive(&NonnegMatrix::new(RationalMatrix::identity(3)).unwrap()));
        assert!(permanent_positive(&NonnegMatrix::from_i64_rows(&[&[1, 1], &[1, 1]]).unwrap()));
        assert!(!permanent_positive(&NonnegMatrix::from_i64_rows(&[&[1, 1], &[0, 0]]).unwrap()));
    }

    #[test]
    fn rejects_invalid() {
        assert!(NonnegMatrix::from_i64_rows(&[&[1, -1], &[0, 1]]).is_err());
        let zero_col = NonnegMatrix::from_i64_rows(&[&[1, 0], &[1, 0]]).unwrap();
        assert!(sinkhorn_scale(&zero_col, 2).is_err());
    }

    #[test]
    fn json_document() {
        let m = NonnegMatrix::from_json(r#"{"n": 2, "entries": [["1", "1/2"], [0, "3"]]}"#).unwrap();
        assert_eq!(m.entries()[(0, 1)], ratio(1, 2));
        assert!(NonnegMatrix::from_json(r#"{"n": 2, "entries": [["1"]]}"#).is_err());
    }
}
