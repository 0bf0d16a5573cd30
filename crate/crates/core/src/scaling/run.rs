use num_bigint::BigInt;
use num_traits::{FromPrimitive, Zero};

use crate::cp_operator::{CpOperator, SparseKraus};
use crate::error::{Error, Result};
use crate::exact_linalg::rational::{from_f64, ln_bigint, to_f64};
use crate::exact_linalg::integer::{adjugate_det, is_positive_definite_int, IntMatrix};
use crate::exact_linalg::{FloatMatrix, NumericMode, Rational, RationalMatrix};

use super::bounds::{capacity_iteration_bound, iteration_bound, square_capacity_lower_bound, truncation_bits};
use super::bracket::{capacity_bracket_from_fixed_point, Bracket, BracketOutcome};
use super::dyadic::DyadicEngine;
use super::engine::{uses_dual, Engine};
use super::exact::{ExactEngine, Truncation};
use super::float::FloatEngine;
use super::shrunk::find_shrunk_subspace;
use super::{fullness_threshold, DecreasingReason, IterationRecord, ScalingConfig, ScalingRun, Verdict};

/// Result of capacity approximation, expressed for the operator as given.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacityResult {
    /// `det U_{j−1} · det U_{j−2} · γ^{−2n}` at the first crossing, or 0.
    pub value: f64,
    /// The same value as an exact rational, in exact modes.
    pub exact_value: Option<Rational>,
    /// Intersection of all accepted fixed-point brackets at the crossing.
    pub bracket: Option<Bracket>,
    /// Integerization factor applied before iterating.
    pub gamma: BigInt,
    pub run: ScalingRun,
}

/// Steps between searches for a shrunk subspace witness.
const WITNESS_PERIOD: u64 = 16;

struct Hit {
    log_det_pair: f64,
    det_pair: Option<Rational>,
    inverses: Vec<RationalMatrix>,
}

enum Stop {
    AtThreshold,
    Never,
}

fn empty_run(cfg: &ScalingConfig, n: usize, t: u64, threshold: Rational, verdict: Verdict) -> ScalingRun {
    ScalingRun {
        mode: cfg.mode,
        n,
        max_iterations: t,
        truncation_bits: None,
        threshold,
        records: Vec::new(),
        sequence: Vec::new(),
        first_hit: None,
        verdict,
        peak_bits: 0,
    }
}

fn singular_start(op: &CpOperator) -> Result<bool> {
    let id = RationalMatrix::identity(op.n());
    Ok(op.apply(&id)?.det()?.is_zero() || op.dual_apply(&id)?.det()?.is_zero())
}

fn make_engine(
    op: &CpOperator,
    cfg: &ScalingConfig,
    t: u64,
) -> Result<(Box<dyn Engine>, Option<u64>)> {
    let sk = SparseKraus::from_operator(op);
    Ok(match cfg.mode {
        NumericMode::Float64 => (Box::new(FloatEngine::new(sk)?), None),
        NumericMode::ExactCapped(bits) => (Box::new(DyadicEngine::new(sk.to_integer()?, bits)?), Some(bits)),
        NumericMode::ExactCertified => {
            let meta = op.meta();
            let p = cfg
                .truncation_bits
                .unwrap_or_else(|| truncation_bits(meta.n, meta.m, &meta.max_entry, t));
            let rule = if cfg.always_truncate { Truncation::Always(p) } else { Truncation::Lazy(p) };
            (Box::new(ExactEngine::new(sk, rule, cfg.bit_budget)?), Some(p))
        }
    })
}

/// Runs the alternating iteration on an integral operator.
fn drive(
    op: &CpOperator,
    cfg: &ScalingConfig,
    threshold: Rational,
    t: u64,
    stop: Stop,
) -> Result<(ScalingRun, Option<Hit>)> {
    let n = op.n();
    let (mut engine, bits) = make_engine(op, cfg, t)?;
    let mut run = empty_run(cfg, n, t, threshold.clone(), Verdict::Completed);
    run.truncation_bits = bits;
    if cfg.keep_sequence {
        run.sequence.push(RationalMatrix::identity(n));
        run.sequence.push(engine.current());
    }
    let bound = square_capacity_lower_bound(n);
    let mut next_attempt = to_f64(&bound).ln() + std::f64::consts::LN_2;
    let mut hit = None;
    run.verdict = match stop {
        Stop::AtThreshold => Verdict::RankDecreasing { reason: DecreasingReason::IterationsExhausted },
        Stop::Never => Verdict::Completed,
    };
    for j in 1..=t {
        engine.advance(j)?;
        let exact = engine.eps_exact();
        let (eps, below) = match &exact {
            Some(e) => (to_f64(e), *e <= threshold),
            None => (engine.eps_f64(), engine.eps_at_most(&threshold)),
        };
        run.records.push(IterationRecord {
            j,
            eps,
            eps_exact: exact,
            log_det_accumulator: engine.log_det_pair(),
            progress: engine.progress(),
        });
        run.peak_bits = run.peak_bits.max(engine.max_bits());
        if cfg.keep_sequence {
            run.sequence.push(engine.current());
        }
        if below && run.first_hit.is_none() {
            run.first_hit = Some(j);
            if let Stop::AtThreshold = stop {
                hit = Some(Hit {
                    log_det_pair: engine.log_det_pair(),
                    det_pair: engine.det_pair_exact(),
                    inverses: engine.window_inverses(),
                });
                run.verdict = Verdict::RankNonDecreasing;
                break;
            }
        }
        if cfg.early_certificate {
            let estimate = engine.log_upper_estimate();
            if estimate < next_attempt {
                if engine.confirm_upper_below(j, &bound)? {
                    run.verdict = Verdict::RankDecreasing { reason: DecreasingReason::CapacityCertificate };
                    break;
                }
                next_attempt = estimate - std::f64::consts::LN_2;
            }
            if j % WITNESS_PERIOD == 0 && find_shrunk_subspace(op, &engine.current().to_f64()).is_some() {
                run.verdict = Verdict::RankDecreasing { reason: DecreasingReason::ShrunkSubspace };
                break;
            }
        }
    }
    Ok((run, hit))
}

/// Integerized, Kraus-reduced operator with its threshold, or the verdict when
/// the start alone decides.
fn prepare(t: &CpOperator, cfg: &ScalingConfig) -> Result<std::result::Result<(CpOperator, Rational), ScalingRun>> {
    let (op, _) = t.integerize();
    let op = op.reduce_kraus_basis();
    let n = op.n();
    let threshold = cfg.threshold.clone().unwrap_or_else(|| fullness_threshold(n));
    if singular_start(&op)? {
        let reason = if n == 1 { DecreasingReason::ZeroScalar } else { DecreasingReason::SingularStart };
        return Ok(Err(empty_run(cfg, n, 0, threshold, Verdict::RankDecreasing { reason })));
    }
    if n == 1 {
        return Ok(Err(empty_run(cfg, n, 0, threshold, Verdict::RankNonDecreasing)));
    }
    Ok(Ok((op, threshold)))
}

/// Decides whether `T` is rank non-decreasing.
///
/// The operator is integerized and reduced to an independent Kraus family first;
/// neither step changes the verdict.
pub fn run_fullness_test(t: &CpOperator, cfg: &ScalingConfig) -> Result<ScalingRun> {
    let (op, threshold) = match prepare(t, cfg)? {
        Ok(ready) => ready,
        Err(decided) => return Ok(decided),
    };
    let meta = op.meta();
    let steps = cfg
        .max_iterations
        .unwrap_or_else(|| iteration_bound(op.n(), meta.m, &meta.max_entry));
    Ok(drive(&op, cfg, threshold, steps, Stop::AtThreshold)?.0)
}

/// Double precision steps spent looking for a certificate before falling back.
const GUIDED_STEPS: u64 = 4000;
/// Failed fixed point checks tolerated before the guided run gives up on them.
const GUIDED_FIXED_POINT_ATTEMPTS: usize = 8;

/// Same verdict as `run_fullness_test`, usually much faster.
///
/// A double precision run proposes certificates and each one is checked in exact
/// arithmetic: a positive definite `C` with `tr[(C·K*(K(C)⁻¹) − I)²] ≤ 1/(n+1)`
/// proves rank non-decreasing, a shrunk subspace proves rank decreasing. When
/// neither turns up, the configured mode runs in full. The returned run then
/// reports double precision records with an exactly certified verdict.
pub fn decide_fullness(t: &CpOperator, cfg: &ScalingConfig) -> Result<ScalingRun> {
    if !cfg.float_guided || cfg.max_iterations.is_some() {
        return run_fullness_test(t, cfg);
    }
    let (op, threshold) = match prepare(t, cfg)? {
        Ok(ready) => ready,
        Err(decided) => return Ok(decided),
    };
    match guided(&op, cfg, &threshold)? {
        Some(run) => Ok(run),
        None => run_fullness_test(t, cfg),
    }
}

/// Exactly checks `tr[(C·K*(K(C)⁻¹) − I)²] ≤ 1/(n+1)` for `C` rounded to an integer
/// matrix. The residual does not change when `C` is scaled, so the rounding keeps
/// about 60 bits relative to the largest entry.
fn fixed_point_certifies(k: &SparseKraus<BigInt>, c: &FloatMatrix) -> bool {
    let n = c.rows();
    let top = c.entries().iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if !top.is_finite() || top == 0.0 {
        return false;
    }
    let shift = 60 - top.log2().ceil() as i32;
    let c = IntMatrix::from_fn(n, n, |i, j| {
        let x = 0.5 * (c[(i, j)] + c[(j, i)]);
        BigInt::from_f64((x * 2f64.powi(shift)).round()).unwrap_or_default()
    });
    if !is_positive_definite_int(&c) {
        return false;
    }
    let Ok((adj, det)) = adjugate_det(&k.apply(&c)) else { return false };
    // C·K*(K(C)⁻¹) − I = E / det with E = C·K*(adj K(C)) − det·I.
    let mut e = c.mul(&k.dual_apply(&adj)).expect("square");
    for i in 0..n {
        e[(i, i)] -= &det;
    }
    let num = e.trace_of_product(&e).expect("square");
    num * BigInt::from(n + 1) <= &det * &det
}

fn guided(op: &CpOperator, cfg: &ScalingConfig, threshold: &Rational) -> Result<Option<ScalingRun>> {
    let n = op.n();
    let meta = op.meta();
    let steps = iteration_bound(n, meta.m, &meta.max_entry).min(GUIDED_STEPS);
    let float_cfg = ScalingConfig { mode: NumericMode::Float64, ..cfg.clone() };
    let mut run = empty_run(&float_cfg, n, steps, threshold.clone(), Verdict::Completed);
    let Ok(mut engine) = FloatEngine::new(SparseKraus::from_operator(op)) else { return Ok(None) };
    let kraus = SparseKraus::from_operator(op).to_integer()?;
    let dual_kraus = SparseKraus::from_operator(&op.dual()).to_integer()?;
    let bar = to_f64(threshold);
    let mut attempts = 0;
    let mut next_attempt_eps = bar;
    for j in 1..=steps {
        if engine.advance(j).is_err() {
            break;
        }
        let eps = engine.eps_f64();
        run.records.push(IterationRecord {
            j,
            eps,
            eps_exact: None,
            log_det_accumulator: engine.log_det_pair(),
            progress: None,
        });
        if eps <= next_attempt_eps && attempts < GUIDED_FIXED_POINT_ATTEMPTS {
            attempts += 1;
            next_attempt_eps = eps / 4.0;
            // ε̃_j is the fixed point residual of C = U_{j−2}⁻¹ for K = T* on odd steps.
            let c = engine.window_inverses_f64().swap_remove(0);
            let k = if uses_dual(j) { &kraus } else { &dual_kraus };
            if fixed_point_certifies(k, &c) {
                run.first_hit = Some(j);
                run.verdict = Verdict::RankNonDecreasing;
                return Ok(Some(run));
            }
        }
        let scheduled = j % WITNESS_PERIOD == 0 && (j <= 16 * WITNESS_PERIOD || j % (8 * WITNESS_PERIOD) == 0);
        if scheduled && find_shrunk_subspace(op, &engine.current().to_f64()).is_some() {
            run.verdict = Verdict::RankDecreasing { reason: DecreasingReason::ShrunkSubspace };
            return Ok(Some(run));
        }
    }
    if find_shrunk_subspace(op, &engine.current().to_f64()).is_some() {
        run.verdict = Verdict::RankDecreasing { reason: DecreasingReason::ShrunkSubspace };
        return Ok(Some(run));
    }
    Ok(None)
}

/// Runs exactly `iterations` steps on the integerized operator, recording every `ε̃_j`.
pub fn run_scaling(t: &CpOperator, cfg: &ScalingConfig, iterations: u64) -> Result<ScalingRun> {
    let (op, _) = t.integerize();
    let n = op.n();
    let threshold = cfg.threshold.clone().unwrap_or_else(|| fullness_threshold(n));
    if singular_start(&op)? {
        return Ok(empty_run(
            cfg,
            n,
            iterations,
            threshold,
            Verdict::RankDecreasing { reason: DecreasingReason::SingularStart },
        ));
    }
    let mut cfg = cfg.clone();
    cfg.early_certificate = false;
    Ok(drive(&op, &cfg, threshold, iterations, Stop::Never)?.0)
}

fn intersect(acc: Option<Bracket>, b: Bracket) -> Bracket {
    match acc {
        None => b,
        Some(a) => Bracket {
            lower: a.lower.max(b.lower),
            upper: a.upper.min(b.upper),
            eps: a.eps.min(b.eps),
        },
    }
}

/// Approximates `cap(T)` to within a factor `1 ± ε`.
pub fn approx_capacity(t: &CpOperator, eps: f64, cfg: &ScalingConfig) -> Result<CapacityResult> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::OutOfRange(format!("ε = {eps} outside (0, 1/2]")));
    }
    let (op, gamma) = t.integerize();
    let n = op.n();
    let nn = Rational::from_integer(BigInt::from(n));
    let e = from_f64(eps)?;
    let threshold = cfg
        .threshold
        .clone()
        .unwrap_or_else(|| &e * &e / (Rational::from_integer(BigInt::from(4)) * &nn * &nn * &nn));
    let g2n = Rational::from_integer(num_traits::pow(gamma.clone(), 2 * n));
    if n == 1 {
        let v: Rational = t.kraus().iter().map(|a| &a[(0, 0)] * &a[(0, 0)]).sum();
        let run = empty_run(cfg, 1, 0, threshold, Verdict::CapacityValue);
        let bracket = Bracket { lower: v.clone(), upper: v.clone(), eps: Rational::zero() };
        return Ok(CapacityResult { value: to_f64(&v), exact_value: Some(v), bracket: Some(bracket), gamma, run });
    }
    if singular_start(&op)? {
        let run = empty_run(
            cfg,
            n,
            0,
            threshold,
            Verdict::RankDecreasing { reason: DecreasingReason::SingularStart },
        );
        return Ok(zero_capacity(gamma, run));
    }
    let meta = op.meta();
    let steps = cfg
        .max_iterations
        .unwrap_or_else(|| capacity_iteration_bound(n, &meta.max_entry, eps));
    let (mut run, hit) = drive(&op, cfg, threshold, steps, Stop::AtThreshold)?;
    let Some(hit) = hit else {
        return Ok(zero_capacity(gamma, run));
    };
    run.verdict = Verdict::CapacityValue;
    let log_scale = 2.0 * n as f64 * ln_bigint(&gamma);
    let exact_value = hit.det_pair.map(|v| v / &g2n);
    let value = match &exact_value {
        Some(v) => to_f64(v),
        None => (hit.log_det_pair - log_scale).exp(),
    };
    let dual = op.dual();
    let mut bracket = None;
    for c in &hit.inverses {
        for k in [&op, &dual] {
            if let Ok(BracketOutcome::Accepted(b)) = capacity_bracket_from_fixed_point(k, c) {
                bracket = Some(intersect(bracket, b));
            }
        }
    }
    let bracket = bracket.map(|b| Bracket { lower: b.lower / &g2n, upper: b.upper / &g2n, eps: b.eps });
    Ok(CapacityResult { value, exact_value, bracket, gamma, run })
}

fn zero_capacity(gamma: BigInt, run: ScalingRun) -> CapacityResult {
    CapacityResult {
        value: 0.0,
        exact_value: Some(Rational::zero()),
        bracket: None,
        gamma,
        run,
    }
}

