//! Fixed-point backend: every iterate is an integer matrix over `2^P`.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::cp_operator::SparseKraus;
use crate::error::{Error, Result};
use crate::exact_linalg::integer::{adjugate_det, bareiss_det, IntMatrix};
use crate::exact_linalg::rational::{ln_bigint, to_f64};
use crate::exact_linalg::{Rational, RationalMatrix};

use super::engine::{uses_dual, Engine};

/// `U = Ũ / 2^P` together with `R = adj Ũ` and `d = det Ũ > 0`.
struct Slot {
    u: IntMatrix,
    r: IntMatrix,
    d: BigInt,
}

pub(crate) struct DyadicEngine {
    kraus: SparseKraus<BigInt>,
    bits: u64,
    n: usize,
    prev2: Option<Slot>,
    prev1: Slot,
    cur: Slot,
}

impl DyadicEngine {
    pub(crate) fn new(kraus: SparseKraus<BigInt>, bits: u64) -> Result<Self> {
        let n = kraus.n();
        let scale = BigInt::one() << bits;
        let id = IntMatrix::identity(n);
        let adj = id.scale(&(BigInt::one() << (bits as usize * (n - 1))));
        let prev1 = Slot { u: id.scale(&scale), r: adj, d: BigInt::one() << (bits as usize * n) };
        let u0 = kraus.dual_apply(&id).scale(&scale);
        let cur = Self::slot(u0, 0)?;
        Ok(Self { kraus, bits, n, prev2: None, prev1, cur })
    }

    fn slot(u: IntMatrix, j: u64) -> Result<Slot> {
        let exhausted = || Error::PrecisionExhausted {
            iteration: j,
            detail: "truncated iterate is singular or indefinite".into(),
        };
        let (r, d) = adjugate_det(&u).map_err(|_| exhausted())?;
        if !d.is_positive() {
            return Err(exhausted());
        }
        Ok(Slot { u, r, d })
    }

    fn prev2(&self) -> &Slot {
        self.prev2.as_ref().expect("advance called")
    }

    /// `(tr E², d²)` with `E = R_{j−2}·Ũ_j − d_{j−2}·I`, so that `ε̃_j = tr E² / d²`.
    fn eps_parts(&self) -> (BigInt, BigInt) {
        let p = self.prev2();
        let mut e = p.r.mul(&self.cur.u).expect("square");
        for i in 0..self.n {
            e[(i, i)] -= &p.d;
        }
        (e.trace_of_product(&e).expect("square"), &p.d * &p.d)
    }

    fn ln_det(&self, s: &Slot) -> f64 {
        ln_bigint(&s.d) - (self.bits as f64) * (self.n as f64) * std::f64::consts::LN_2
    }

    fn to_rational(&self, a: &IntMatrix) -> RationalMatrix {
        let den = BigInt::one() << self.bits;
        a.map(|x| Rational::new(x.clone(), den.clone()))
    }

    fn inverse_rational(&self, s: &Slot) -> RationalMatrix {
        let scale = BigInt::one() << self.bits;
        s.r.map(|x| Rational::new(x * &scale, s.d.clone()))
    }
}

/// True when every leading principal minor is positive.
fn integer_positive_definite(a: &IntMatrix) -> Result<bool> {
    for k in 1..=a.rows() {
        if !bareiss_det(&a.submatrix(0..k, 0..k))?.is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

impl Engine for DyadicEngine {
    fn advance(&mut self, j: u64) -> Result<()> {
        let r = &self.cur.r;
        let image = if uses_dual(j) { self.kraus.dual_apply(r) } else { self.kraus.apply(r) };
        // Trn(K(U⁻¹)) = ⌊K(R)·2^{2P}/d⌋ / 2^P, rounding toward zero.
        let d = &self.cur.d;
        let shift = 2 * self.bits as usize;
        let u = image.map(|x| (x << shift) / d);
        let slot = Self::slot(u, j)?;
        let old_cur = std::mem::replace(&mut self.cur, slot);
        let old_prev1 = std::mem::replace(&mut self.prev1, old_cur);
        self.prev2 = Some(old_prev1);
        Ok(())
    }

    fn eps_f64(&self) -> f64 {
        let (num, den) = self.eps_parts();
        to_f64(&Rational::new(num, den))
    }

    fn eps_exact(&self) -> Option<Rational> {
        let (num, den) = self.eps_parts();
        Some(Rational::new(num, den))
    }

    fn eps_at_most(&self, threshold: &Rational) -> bool {
        let (num, den) = self.eps_parts();
        num * threshold.denom() <= den * threshold.numer()
    }

    fn log_det_pair(&self) -> f64 {
        self.ln_det(&self.prev1) + self.ln_det(self.prev2())
    }

    fn log_upper_estimate(&self) -> f64 {
        self.ln_det(&self.cur) + self.ln_det(&self.prev1)
    }

    fn confirm_upper_below(&self, j: u64, bound: &Rational) -> Result<bool> {
        // With C = U_{j−1}⁻¹ = 2^P·R/d: Det(K(C))/Det(C) = det K(R) / d^{n−1}.
        let s = &self.prev1;
        if !integer_positive_definite(&s.u)? {
            return Ok(false);
        }
        let image = if uses_dual(j) { self.kraus.dual_apply(&s.r) } else { self.kraus.apply(&s.r) };
        let det = bareiss_det(&image)?;
        let dn = num_traits::pow(s.d.clone(), self.n - 1);
        Ok(det * bound.denom() < dn * bound.numer())
    }

    fn det_pair_exact(&self) -> Option<Rational> {
        let p = self.prev2();
        let den = BigInt::one() << (2 * self.bits as usize * self.n);
        Some(Rational::new(&self.prev1.d * &p.d, den))
    }

    fn window_inverses(&self) -> Vec<RationalMatrix> {
        vec![self.inverse_rational(self.prev2()), self.inverse_rational(&self.prev1)]
    }

    fn current(&self) -> RationalMatrix {
        self.to_rational(&self.cur.u)
    }

    fn max_bits(&self) -> u64 {
        self.cur.u.entries().iter().map(|x| x.bits()).max().unwrap_or(0)
    }
}

