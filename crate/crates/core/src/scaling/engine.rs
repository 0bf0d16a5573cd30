use crate::cp_operator::SparseKraus;
use crate::error::Result;
use crate::exact_linalg::{Rational, RationalMatrix};

use super::ProgressSample;

/// One arithmetic backend for the alternating iteration.
///
/// After `advance(j)` the engine holds `U_{j−2}`, `U_{j−1}` and `U_j`, where
/// `U_j` is `T(U_{j−1}⁻¹)` for odd `j` and `T*(U_{j−1}⁻¹)` for even `j`, truncated
/// according to the backend. Before the first call it holds `U_{−1} = I` and `U_0 = T*(I)`.
pub(crate) trait Engine {
    fn advance(&mut self, j: u64) -> Result<()>;

    fn eps_f64(&self) -> f64;

    fn eps_exact(&self) -> Option<Rational>;

    fn eps_at_most(&self, threshold: &Rational) -> bool;

    /// `ln det U_{j−1} + ln det U_{j−2}`.
    fn log_det_pair(&self) -> f64;

    /// `ln det U_j + ln det U_{j−1}`, close to `ln[Det(K(C))/Det(C)]` at `C = U_{j−1}⁻¹`.
    fn log_upper_estimate(&self) -> f64;

    /// Exactly decides `Det(K(C))/Det(C) < bound` at `C = U_{j−1}⁻¹`, with `K` the
    /// map used at step `j`. Returns false when `C` is not positive definite.
    fn confirm_upper_below(&self, j: u64, bound: &Rational) -> Result<bool>;

    /// `det U_{j−1} · det U_{j−2}` when the backend is exact.
    fn det_pair_exact(&self) -> Option<Rational>;

    fn progress(&self) -> Option<ProgressSample> {
        None
    }

    /// `U_{j−2}⁻¹` and `U_{j−1}⁻¹` as exact rationals.
    fn window_inverses(&self) -> Vec<RationalMatrix>;

    /// `U_j` as an exact rational matrix.
    fn current(&self) -> RationalMatrix;

    /// Largest entry bit size currently held, for exact backends.
    fn max_bits(&self) -> u64 {
        0
    }
}

/// `K = T` on odd steps and `T*` on even steps.
pub(crate) fn uses_dual(j: u64) -> bool {
    j % 2 == 0
}

/// Exact test of `Det(K(C))/Det(C) < bound` for a rational `C`.
pub(crate) fn exact_upper_below(
    kraus: &SparseKraus<Rational>,
    dual: bool,
    c: &RationalMatrix,
    bound: &Rational,
) -> Result<bool> {
    if !c.is_positive_definite() {
        return Ok(false);
    }
    let y = if dual { kraus.dual_apply(c) } else { kraus.apply(c) };
    Ok(y.det()? / c.det()? < *bound)
}
