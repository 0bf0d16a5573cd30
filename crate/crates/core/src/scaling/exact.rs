//! Exact rational backend with optional truncation.

use crate::cp_operator::SparseKraus;
use crate::error::{Error, Result};
use crate::exact_linalg::rational::{ln_rational, to_f64};
use crate::exact_linalg::{Rational, RationalMatrix};

use super::engine::{exact_upper_below, uses_dual, Engine};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Truncation {
    /// Truncate to `P` fractional bits only once an entry needs more than `P` bits.
    Lazy(u64),
    /// Truncate to `P` fractional bits on every step.
    Always(u64),
}

struct Slot {
    u: RationalMatrix,
    inv: RationalMatrix,
    det: Rational,
}

pub(crate) struct ExactEngine {
    kraus: SparseKraus<Rational>,
    truncation: Truncation,
    budget: u64,
    prev2: Option<Slot>,
    prev1: Slot,
    cur: Slot,
}

impl ExactEngine {
    pub(crate) fn new(kraus: SparseKraus<Rational>, truncation: Truncation, budget: u64) -> Result<Self> {
        let n = kraus.n();
        let id = RationalMatrix::identity(n);
        let u0 = kraus.dual_apply(&id);
        let mut engine = Self {
            prev2: None,
            prev1: Slot { u: id.clone(), inv: id, det: Rational::from_integer(1.into()) },
            cur: Slot {
                u: RationalMatrix::zeros(n, n),
                inv: RationalMatrix::zeros(n, n),
                det: Rational::from_integer(0.into()),
            },
            kraus,
            truncation,
            budget,
        };
        engine.cur = engine.slot(u0, 0)?;
        Ok(engine)
    }

    fn truncate(&self, u: RationalMatrix) -> RationalMatrix {
        match self.truncation {
            Truncation::Always(p) => u.truncate(p),
            Truncation::Lazy(p) if u.max_bits() > p => u.truncate(p),
            Truncation::Lazy(_) => u,
        }
    }

    fn slot(&self, u: RationalMatrix, j: u64) -> Result<Slot> {
        let u = self.truncate(u);
        let bits = u.max_bits();
        if bits > self.budget {
            return Err(Error::BudgetExceeded {
                iteration: j,
                detail: format!("entries need {bits} bits, budget is {}", self.budget),
            });
        }
        let exhausted = || Error::PrecisionExhausted {
            iteration: j,
            detail: "truncated iterate is singular or indefinite".into(),
        };
        let det = u.det()?;
        if det <= Rational::from_integer(0.into()) {
            return Err(exhausted());
        }
        let inv = u.invert().map_err(|_| exhausted())?;
        Ok(Slot { u, inv, det })
    }

    fn prev2(&self) -> &Slot {
        self.prev2.as_ref().expect("advance called")
    }

    fn eps(&self) -> Rational {
        let n = self.cur.u.rows();
        let e = self.prev2().inv.mul(&self.cur.u).expect("square").sub(&RationalMatrix::identity(n)).expect("square");
        e.trace_of_product(&e).expect("square")
    }
}

impl Engine for ExactEngine {
    fn advance(&mut self, j: u64) -> Result<()> {
        let x = &self.cur.inv;
        let next = if uses_dual(j) { self.kraus.dual_apply(x) } else { self.kraus.apply(x) };
        let slot = self.slot(next, j)?;
        let old_cur = std::mem::replace(&mut self.cur, slot);
        let old_prev1 = std::mem::replace(&mut self.prev1, old_cur);
        self.prev2 = Some(old_prev1);
        Ok(())
    }

    fn eps_f64(&self) -> f64 {
        to_f64(&self.eps())
    }

    fn eps_exact(&self) -> Option<Rational> {
        Some(self.eps())
    }

    fn eps_at_most(&self, threshold: &Rational) -> bool {
        self.eps() <= *threshold
    }

    fn log_det_pair(&self) -> f64 {
        ln_rational(&self.prev1.det) + ln_rational(&self.prev2().det)
    }

    fn log_upper_estimate(&self) -> f64 {
        ln_rational(&self.cur.det) + ln_rational(&self.prev1.det)
    }

    fn confirm_upper_below(&self, j: u64, bound: &Rational) -> Result<bool> {
        exact_upper_below(&self.kraus, uses_dual(j), &self.prev1.inv, bound)
    }

    fn det_pair_exact(&self) -> Option<Rational> {
        Some(&self.prev1.det * &self.prev2().det)
    }

    fn window_inverses(&self) -> Vec<RationalMatrix> {
        vec![self.prev2().inv.clone(), self.prev1.inv.clone()]
    }

    fn current(&self) -> RationalMatrix {
        self.cur.u.clone()
    }

    fn max_bits(&self) -> u64 {
        self.cur.u.max_bits()
    }
}
