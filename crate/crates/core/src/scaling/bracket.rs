//! Capacity bracket from an approximate fixed point.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cp_operator::CpOperator;
use crate::error::{Error, Result};
use crate::exact_linalg::rational::{from_f64, to_f64};
use crate::exact_linalg::{Rational, RationalMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct Bracket {
    pub lower: Rational,
    pub upper: Rational,
    /// `ε = tr[(C·T*(T(C)⁻¹) − I)²]`.
    pub eps: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BracketOutcome {
    Accepted(Bracket),
    /// `ε > 1/(n+1)`.
    Rejected { eps: Rational },
    /// `T(C)` is singular.
    SingularImage,
}

#[derive(Serialize)]
struct BracketView {
    lower: f64,
    upper: f64,
}

impl Bracket {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(BracketView { lower: to_f64(&self.lower), upper: to_f64(&self.upper) })
            .expect("plain floats")
    }
}

/// A rational `s ≥ √x` close to the square root.
fn sqrt_upper(x: &Rational) -> Rational {
    if !x.is_positive() {
        return Rational::zero();
    }
    let mut s = from_f64(to_f64(x).sqrt() * (1.0 + 1e-12)).unwrap_or_else(|_| x + Rational::one());
    let step = Rational::new(BigInt::one(), BigInt::from(1u64 << 40));
    while &s * &s < *x {
        s += &step;
    }
    s
}

/// Brackets `cap(T)` given a positive definite `C` close to a fixed point of
/// `X ↦ T(T*(X)⁻¹)⁻¹`.
///
/// When `ε ≤ 1/(n+1)`, `(1 − √(nε))ⁿ·Det(T(C))/Det(C) ≤ cap(T) ≤ Det(T(C))/Det(C)`.
/// The lower end uses a rational upper bound for the square root.
pub fn capacity_bracket_from_fixed_point(t: &CpOperator, c: &RationalMatrix) -> Result<BracketOutcome> {
    let n = t.n();
    if c.rows() != n || !c.is_positive_definite() {
        return Err(Error::Precondition("C must be a symmetric positive definite n×n matrix".into()));
    }
    let y = t.apply(c)?;
    let y_inv = match y.invert() {
        Ok(inv) => inv,
        Err(Error::Singular { .. }) => return Ok(BracketOutcome::SingularImage),
        Err(e) => return Err(e),
    };
    let e = c.mul(&t.dual_apply(&y_inv)?)?.sub(&RationalMatrix::identity(n))?;
    let eps = e.trace_of_product(&e)?;
    if eps > Rational::new(BigInt::one(), BigInt::from(n + 1)) {
        return Ok(BracketOutcome::Rejected { eps });
    }
    let upper = y.det()? / c.det()?;
    let root = sqrt_upper(&(&eps * Rational::from_integer(BigInt::from(n))));
    let base = Rational::one() - root;
    let lower = if base.is_positive() {
        num_traits::pow(base, n) * &upper
    } else {
        Rational::zero()
    };
    Ok(BracketOutcome::Accepted(Bracket { lower, upper, eps }))
}
