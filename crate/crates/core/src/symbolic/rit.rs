//! Rational identity testing through pencil fullness.

use serde::Serialize;

use super::construct::{border_pencil, formula_to_pencil};
use super::formula::Formula;
use crate::error::{Error, Result};
use crate::ncrank::fullness_run;
use crate::scaling::ScalingConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RitVerdict {
    Zero,
    Nonzero,
}

#[derive(Clone, Debug, Serialize)]
pub struct RitReport {
    pub verdict: RitVerdict,
    pub formula_size: usize,
    pub pencil_dim: usize,
    pub border_dim: usize,
    pub pencil_iterations: u64,
    pub border_iterations: u64,
}

/// Decides whether `Φ` is the zero rational function.
///
/// Fails with [`Error::EmptyDomain`] when `L_Φ` is not full, i.e. some inversion
/// inside `Φ` is undefined everywhere.
pub fn rit_test(phi: &Formula, cfg: &ScalingConfig) -> Result<RitReport> {
    let l = formula_to_pencil(phi);
    let run = fullness_run(&l, cfg)?;
    if run.verdict.is_rank_decreasing() {
        return Err(Error::EmptyDomain(
            "the formula inverts an expression that is identically zero".into(),
        ));
    }
    let m = border_pencil(&l)?;
    let border = fullness_run(&m, cfg)?;
    let verdict = if border.verdict.is_rank_decreasing() { RitVerdict::Zero } else { RitVerdict::Nonzero };
    Ok(RitReport {
        verdict,
        formula_size: phi.size(),
        pencil_dim: l.rows(),
        border_dim: m.rows(),
        pencil_iterations: run.iterations(),
        border_iterations: border.iterations(),
    })
}

/// Borders a full square pencil; errors when `L` is not full.
pub fn inverse_entry_border(
    l: &super::pencil::LinearMatrixPencil,
    cfg: &ScalingConfig,
) -> Result<super::pencil::LinearMatrixPencil> {
    if !l.is_square() {
        return Err(Error::Dimension("bordering needs a square pencil".into()));
    }
    if fullness_run(l, cfg)?.verdict.is_rank_decreasing() {
        return Err(Error::Precondition("the pencil is not full, so it has no inverse".into()));
    }
    border_pencil(l)
}
