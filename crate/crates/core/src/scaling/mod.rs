//! Alternating operator scaling: the fullness test, capacity approximation
//! and the fixed-point capacity bracket.

pub mod bounds;
mod bracket;
mod dyadic;
mod engine;
mod exact;
mod float;
mod run;
mod shrunk;
mod trace;

#[cfg(test)]
mod tests;

use serde::Serialize;

use crate::exact_linalg::rational::ratio;
use crate::exact_linalg::{NumericMode, Rational, RationalMatrix};

pub use bounds::{
    capacity_iteration_bound, capacity_lower_bound, iteration_bound, square_capacity_lower_bound,
    truncation_bits,
};
pub use bracket::{capacity_bracket_from_fixed_point, Bracket, BracketOutcome};
pub use shrunk::{find_shrunk_subspace, image_dimension, verify_shrunk, ShrunkSubspace};
pub use run::{approx_capacity, decide_fullness, run_fullness_test, run_scaling, CapacityResult};

/// Bit budget for exact certified runs before they are abandoned.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 21;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingConfig {
    pub mode: NumericMode,
    /// Overrides the step count derived from the operator size.
    pub max_iterations: Option<u64>,
    /// Overrides the fractional bit count of the certified mode.
    pub truncation_bits: Option<u64>,
    /// Overrides the stopping threshold on `ε̃_j`.
    pub threshold: Option<Rational>,
    /// Largest entry bit size tolerated by exact rational runs.
    pub bit_budget: u64,
    /// Keep every `U_j` in the run.
    pub keep_sequence: bool,
    /// Stop with a rank-decreasing verdict once a capacity upper bound drops
    /// below the lower bound for integer rank non-decreasing operators.
    pub early_certificate: bool,
    /// Truncate every step instead of only when exact entries outgrow the bit count.
    pub always_truncate: bool,
    /// Let `decide_fullness` look for exact certificates along a double precision
    /// run before falling back to the configured mode.
    pub float_guided: bool,
}

impl ScalingConfig {
    pub fn new(mode: NumericMode) -> Self {
        Self {
            mode,
            max_iterations: None,
            truncation_bits: None,
            threshold: None,
            bit_budget: DEFAULT_BIT_BUDGET,
            keep_sequence: false,
            early_certificate: true,
            always_truncate: false,
            float_guided: true,
        }
    }

    /// Default for decision problems: 256 fractional bits.
    pub fn decision() -> Self {
        Self::new(NumericMode::ExactCapped(256))
    }

    /// Default for capacity: double precision with a certified bracket.
    pub fn capacity() -> Self {
        Self::new(NumericMode::Float64)
    }

    pub fn with_max_iterations(mut self, t: u64) -> Self {
        self.max_iterations = Some(t);
        self
    }
}

/// Decision threshold `1/(6n)`.
pub fn fullness_threshold(n: usize) -> Rational {
    ratio(1, 6 * n as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecreasingReason {
    /// `T(I)` or `T*(I)` is singular.
    SingularStart,
    /// An exact capacity upper bound fell below `n^{−2n}`.
    CapacityCertificate,
    /// An exactly verified subspace `V` with `dim Σ AᵢV < dim V`.
    ShrunkSubspace,
    /// No threshold crossing within the step bound.
    IterationsExhausted,
    /// The operator acts on 1×1 matrices and every Kraus scalar is zero.
    ZeroScalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Verdict {
    RankNonDecreasing,
    RankDecreasing { reason: DecreasingReason },
    /// A capacity run reached its threshold.
    CapacityValue,
    /// A fixed-length run with no stopping rule.
    Completed,
}

impl Verdict {
    pub fn is_rank_decreasing(&self) -> bool {
        matches!(self, Verdict::RankDecreasing { .. })
    }
}

/// Quantities behind the progress inequality for the normalized operator at step `j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProgressSample {
    /// `tr T_j(I)`, which equals `n` up to rounding.
    pub trace: f64,
    /// `α = tr[(T_j(I) − I)²]`.
    pub gap: f64,
    /// `ln det T_j(I)`.
    pub ln_det: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub j: u64,
    /// `ε̃_j = tr[(U_{j−2}⁻¹ U_j − I)²]`.
    pub eps: f64,
    #[serde(skip)]
    pub eps_exact: Option<Rational>,
    /// `ln(det U_{j−1} · det U_{j−2})`.
    pub log_det_accumulator: f64,
    pub progress: Option<ProgressSample>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRun {
    pub mode: NumericMode,
    pub n: usize,
    pub max_iterations: u64,
    pub truncation_bits: Option<u64>,
    pub threshold: Rational,
    pub records: Vec<IterationRecord>,
    /// `U_{−1}, U_0, U_1, …` when requested.
    pub sequence: Vec<RationalMatrix>,
    pub first_hit: Option<u64>,
    pub verdict: Verdict,
    /// Largest entry bit size of any exact iterate.
    pub peak_bits: u64,
}

impl ScalingRun {
    pub fn iterations(&self) -> u64 {
        self.records.last().map_or(0, |r| r.j)
    }

    pub fn eps_trace(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.eps).collect()
    }

    pub fn min_eps(&self) -> Option<f64> {
        self.records.iter().map(|r| r.eps).min_by(f64::total_cmp)
    }
}
