//! Non-commutative rational formulas.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::rational::{bit_size, format_rational};
use crate::exact_linalg::{Rational, RationalMatrix};

/// Formula over non-commuting variables `x1, x2, …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `Var(i)` is the variable `xi`.
    Var(usize),
    Const(Rational),
    Add(Box<Formula>, Box<Formula>),
    Sub(Box<Formula>, Box<Formula>),
    Mul(Box<Formula>, Box<Formula>),
    Inv(Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn var(i: usize) -> Self {
        Var(i)
    }

    pub fn constant(c: Rational) -> Self {
        Const(c)
    }

    pub fn int(c: i64) -> Self {
        Const(Rational::from_integer(c.into()))
    }

    pub fn add(a: Formula, b: Formula) -> Self {
        Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Formula, b: Formula) -> Self {
        Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Formula, b: Formula) -> Self {
        Mul(Box::new(a), Box::new(b))
    }

    pub fn inv(a: Formula) -> Self {
        Inv(Box::new(a))
    }

    /// Node count: every leaf and every gate counts once.
    pub fn size(&self) -> usize {
        match self {
            Var(_) | Const(_) => 1,
            Add(a, b) | Sub(a, b) | Mul(a, b) => 1 + a.size() + b.size(),
            Inv(a) => 1 + a.size(),
        }
    }

    /// Largest bit size of a constant, 0 when there are none.
    pub fn bits(&self) -> u64 {
        match self {
            Var(_) => 0,
            Const(c) => bit_size(c),
            Add(a, b) | Sub(a, b) | Mul(a, b) => a.bits().max(b.bits()),
            Inv(a) => a.bits(),
        }
    }

    pub fn mul_count(&self) -> usize {
        match self {
            Var(_) | Const(_) => 0,
            Add(a, b) | Sub(a, b) => a.mul_count() + b.mul_count(),
            Mul(a, b) => 1 + a.mul_count() + b.mul_count(),
            Inv(a) => a.mul_count(),
        }
    }

    pub fn has_inverse(&self) -> bool {
        match self {
            Var(_) | Const(_) => false,
            Add(a, b) | Sub(a, b) | Mul(a, b) => a.has_inverse() || b.has_inverse(),
            Inv(_) => true,
        }
    }

    /// Largest variable index, 0 when no variable occurs.
    pub fn max_var(&self) -> usize {
        match self {
            Var(i) => *i,
            Const(_) => 0,
            Add(a, b) | Sub(a, b) | Mul(a, b) => a.max_var().max(b.max_var()),
            Inv(a) => a.max_var(),
        }
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Const(c) if c.is_zero())
    }

    /// Evaluates at square rational matrices; `vars[i − 1]` substitutes `xi`.
    pub fn eval(&self, vars: &[RationalMatrix]) -> Result<RationalMatrix> {
        let d = vars.first().map_or(1, |v| v.rows());
        match self {
            Var(i) => vars
                .get(i.wrapping_sub(1))
                .cloned()
                .ok_or_else(|| Error::UnknownIdentifier(format!("x{i}"))),
            Const(c) => Ok(RationalMatrix::identity(d).scale(c)),
            Add(a, b) => a.eval(vars)?.add(&b.eval(vars)?),
            Sub(a, b) => a.eval(vars)?.sub(&b.eval(vars)?),
            Mul(a, b) => a.eval(vars)?.mul(&b.eval(vars)?),
            Inv(a) => a.eval(vars)?.invert().map_err(|_| {
                Error::EmptyDomain("an inverted subformula is singular at this point".into())
            }),
        }
    }

    /// Affine form `c₀ + Σ cᵢ xᵢ` of a formula built from `+`, `−`, constants,
    /// variables and scalar multiples. Returns `(c₀, [(i, cᵢ)])` or `None`.
    pub fn affine_form(&self) -> Option<(Rational, Vec<(usize, Rational)>)> {
        let mut terms = std::collections::BTreeMap::new();
        let mut c0 = Rational::zero();
        self.collect_affine(&Rational::one(), &mut c0, &mut terms)?;
        Some((c0, terms.into_iter().filter(|(_, c): &(usize, Rational)| !c.is_zero()).collect()))
    }

    fn collect_affine(
        &self,
        scale: &Rational,
        c0: &mut Rational,
        terms: &mut std::collections::BTreeMap<usize, Rational>,
    ) -> Option<()> {
        match self {
            Var(i) => {
                *terms.entry(*i).or_insert_with(Rational::zero) += scale;
            }
            Const(c) => *c0 += scale * c,
            Add(a, b) => {
                a.collect_affine(scale, c0, terms)?;
                b.collect_affine(scale, c0, terms)?;
            }
            Sub(a, b) => {
                a.collect_affine(scale, c0, terms)?;
                b.collect_affine(&-scale, c0, terms)?;
            }
            Mul(a, b) => match (&**a, &**b) {
                (Const(c), other) | (other, Const(c)) => other.collect_affine(&(scale * c), c0, terms)?,
                _ => return None,
            },
            Inv(_) => return None,
        }
        Some(())
    }
}

const ADD_PREC: u8 = 1;
const MUL_PREC: u8 = 2;
const ATOM_PREC: u8 = 3;

impl Formula {
    fn prec(&self) -> u8 {
        match self {
            Add(..) | Sub(..) => ADD_PREC,
            Mul(..) => MUL_PREC,
            Const(c) if c.is_negative() => ADD_PREC,
            _ => ATOM_PREC,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.prec() < min_prec {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Var(i) => write!(f, "x{i}"),
            Const(c) => write!(f, "{}", format_rational(c)),
            Add(a, b) => {
                a.fmt_at(f, ADD_PREC)?;
                write!(f, " + ")?;
                b.fmt_at(f, MUL_PREC)
            }
            Sub(a, b) => {
                a.fmt_at(f, ADD_PREC)?;
                write!(f, " - ")?;
                b.fmt_at(f, MUL_PREC)
            }
            Mul(a, b) => {
                a.fmt_at(f, MUL_PREC)?;
                write!(f, "*")?;
                b.fmt_at(f, ATOM_PREC)
            }
            Inv(a) => {
                write!(f, "inv(")?;
                a.fmt_at(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
