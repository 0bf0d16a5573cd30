use num_traits::Zero;

use crate::cp_operator::SparseKraus;
use crate::error::{Error, Result};
use crate::exact_linalg::float::{invert_f64, log_det_spd};
use crate::exact_linalg::rational::{from_f64, to_f64};
use crate::exact_linalg::{FloatMatrix, Rational, RationalMatrix};

use super::engine::{exact_upper_below, uses_dual, Engine};
use super::ProgressSample;

struct Slot {
    u: FloatMatrix,
    inv: FloatMatrix,
    ln_det: f64,
}

impl Slot {
    fn new(u: FloatMatrix, j: i64) -> Result<Self> {
        let u = u.symmetrize();
        let exhausted = |detail: &str| Error::PrecisionExhausted {
            iteration: j.max(0) as u64,
            detail: format!("double precision iterate {detail}"),
        };
        let ln_det = log_det_spd(&u).ok_or_else(|| exhausted("lost positive definiteness"))?;
        let inv = invert_f64(&u).map_err(|_| exhausted("became numerically singular"))?.symmetrize();
        if u.entries().iter().chain(inv.entries()).any(|x| !x.is_finite()) {
            return Err(exhausted("overflowed"));
        }
        Ok(Self { u, inv, ln_det })
    }
}

pub(crate) struct FloatEngine {
    kraus: SparseKraus<f64>,
    exact: SparseKraus<Rational>,
    prev2: Option<Slot>,
    prev1: Slot,
    cur: Slot,
}

impl FloatEngine {
    pub(crate) fn new(exact: SparseKraus<Rational>) -> Result<Self> {
        let kraus = exact.to_f64();
        let n = kraus.n();
        let id = FloatMatrix::identity(n);
        let u0 = kraus.dual_apply(&id);
        Ok(Self {
            prev2: None,
            prev1: Slot::new(id, -1)?,
            cur: Slot::new(u0, 0)?,
            kraus,
            exact,
        })
    }

    fn prev2(&self) -> &Slot {
        self.prev2.as_ref().expect("advance called")
    }

    /// `U_{j−2}⁻¹` and `U_{j−1}⁻¹` in double precision.
    pub(crate) fn window_inverses_f64(&self) -> Vec<FloatMatrix> {
        vec![self.prev2().inv.clone(), self.prev1.inv.clone()]
    }

    fn normalized(&self) -> FloatMatrix {
        self.prev2().inv.mul(&self.cur.u).expect("square")
    }
}

fn rational_matrix(a: &FloatMatrix) -> RationalMatrix {
    a.map(|&x| from_f64(x).unwrap_or_else(|_| Rational::zero()))
}

impl Engine for FloatEngine {
    fn advance(&mut self, j: u64) -> Result<()> {
        let x = &self.cur.inv;
        let next = if uses_dual(j) { self.kraus.dual_apply(x) } else { self.kraus.apply(x) };
        let slot = Slot::new(next, j as i64)?;
        let old_cur = std::mem::replace(&mut self.cur, slot);
        let old_prev1 = std::mem::replace(&mut self.prev1, old_cur);
        self.prev2 = Some(old_prev1);
        Ok(())
    }

    fn eps_f64(&self) -> f64 {
        let n = self.cur.u.rows();
        let e = self.normalized().sub(&FloatMatrix::identity(n)).expect("square");
        e.trace_of_product(&e).expect("square").max(0.0)
    }

    fn eps_exact(&self) -> Option<Rational> {
        None
    }

    fn eps_at_most(&self, threshold: &Rational) -> bool {
        self.eps_f64() <= to_f64(threshold) * (1.0 + 1e-12)
    }

    fn log_det_pair(&self) -> f64 {
        self.prev1.ln_det + self.prev2().ln_det
    }

    fn log_upper_estimate(&self) -> f64 {
        self.cur.ln_det + self.prev1.ln_det
    }

    fn confirm_upper_below(&self, j: u64, bound: &Rational) -> Result<bool> {
        let c = rational_matrix(&self.prev1.inv).symmetrize();
        exact_upper_below(&self.exact, uses_dual(j), &c, bound)
    }

    fn det_pair_exact(&self) -> Option<Rational> {
        None
    }

    fn progress(&self) -> Option<ProgressSample> {
        let w = self.normalized();
        Some(ProgressSample {
            trace: w.trace(),
            gap: self.eps_f64(),
            ln_det: self.cur.ln_det - self.prev2().ln_det,
        })
    }

    fn window_inverses(&self) -> Vec<RationalMatrix> {
        vec![
            rational_matrix(&self.prev2().inv).symmetrize(),
            rational_matrix(&self.prev1.inv).symmetrize(),
        ]
    }

    fn current(&self) -> RationalMatrix {
        rational_matrix(&self.cur.u)
    }
}
