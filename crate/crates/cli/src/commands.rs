use std::path::Path;

use opscale::cp_operator::{operator_from_json, CpOperator};
use opscale::exact_linalg::rational::{to_decimal_string, to_f64};
use opscale::exact_linalg::NumericMode;
use opscale::matrix_scaling::{permanent_positive_with, permanent_positive_exact, NonnegMatrix};
use opscale::ncrank::{ncrank_classical, ncrank_quantum, RankReport, DEFAULT_TRIALS};
use opscale::oracles::{
    blowup_singularity_oracle, brute_force_capacity, brute_force_permanent, perfect_matching_exists,
    rit_matrix_evaluation, BipartiteGraph, BlowupVerdict, CAPACITY_MAX_N, PERMANENT_MAX_N,
};
use opscale::scaling::{approx_capacity, run_fullness_test, run_scaling, ScalingConfig, Verdict};
use opscale::symbolic::{higman_linearize, parse_formula, rit_test, LinearMatrixPencil, RitVerdict, SymbolicMatrix};
use serde_json::{json, Value};

use crate::report::{CliError, OracleCheck, Report};
use crate::{GlobalArgs, Method};

/// Largest pencil size checked by the blow-up oracle under `--verify`.
const BLOWUP_MAX_N: usize = 8;
const ORACLE_TRIALS: usize = 7;

fn read(path: &Path) -> Result<(Vec<u8>, Value), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let doc = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Core(opscale::Error::Document(format!("{}: {e}", path.display()))))?;
    Ok((bytes, doc))
}

fn text(bytes: &[u8]) -> &str {
    std::str::from_utf8(bytes).unwrap_or_default()
}

fn decision_config(g: &GlobalArgs) -> ScalingConfig {
    g.mode.map_or_else(ScalingConfig::decision, ScalingConfig::new)
}

/// Operator from either `{"n", "kraus"}` or a pencil document.
fn load_operator(bytes: &[u8], doc: &Value) -> Result<CpOperator, CliError> {
    if doc.get("coeffs").is_some() {
        Ok(LinearMatrixPencil::from_json(text(bytes))?.to_operator()?)
    } else {
        Ok(operator_from_json(text(bytes))?)
    }
}

fn pencil_of(op: &CpOperator) -> LinearMatrixPencil {
    LinearMatrixPencil::from_coefficients(op.kraus().to_vec()).expect("square Kraus list")
}

/// Edges when every Kraus matrix is a single unit entry.
fn unit_edges(op: &CpOperator) -> Option<Vec<(usize, usize)>> {
    op.kraus()
        .iter()
        .map(|a| {
            let nz = a.nonzeros();
            match nz.as_slice() {
                [(i, j, v)] if num_traits::One::is_one(v) => Some((*i, *j)),
                _ => None,
            }
        })
        .collect()
}

pub fn singular(path: &Path, g: &GlobalArgs) -> Result<Report, CliError> {
    let (bytes, doc) = read(path)?;
    let op = load_operator(&bytes, &doc)?;
    let cfg = decision_config(g);
    let run = run_fullness_test(&op, &cfg)?;
    let full = !run.verdict.is_rank_decreasing();
    let mut r = Report::new("singular", &bytes, cfg.mode.label());
    r.verdict = if full { "full" } else { "not-full" }.into();
    r.headline = if full { "FULL (rank non-decreasing)" } else { "NOT FULL (rank decreasing)" }.into();
    r.value = json!(full);
    r.iterations = Some(run.iterations());
    r.details = json!({
        "n": op.n(),
        "m": op.m(),
        "verdict": run.verdict,
        "min_eps": run.min_eps(),
        "threshold": to_f64(&run.threshold),
        "truncation_bits": run.truncation_bits,
    });
    r.exit_code = if full { 0 } else { 1 };
    if g.verify {
        r.oracle = if let Some(edges) = unit_edges(&op) {
            let graph = BipartiteGraph::new(op.n(), edges)?;
            let matched = perfect_matching_exists(&graph);
            Some(OracleCheck { name: "perfect-matching".into(), result: json!(matched), agrees: matched == full })
        } else if op.n() <= BLOWUP_MAX_N {
            let v = blowup_singularity_oracle(&pencil_of(&op), ORACLE_TRIALS, g.seed)?;
            Some(OracleCheck {
                name: "blow-up".into(),
                result: json!(v),
                agrees: (v == BlowupVerdict::Nonsingular) == full,
            })
        } else {
            None
        };
    }
    Ok(r)
}

pub fn ncrank(path: &Path, method: Option<Method>, g: &GlobalArgs) -> Result<Report, CliError> {
    let (bytes, doc) = read(path)?;
    let cfg = decision_config(g);
    let (report, square_pencil): (RankReport, Option<(LinearMatrixPencil, usize)>) = if doc.get("entries").is_some() {
        let m = SymbolicMatrix::from_json(text(&bytes))?;
        let (lin, k) = higman_linearize(&m)?;
        let report = match method.unwrap_or(Method::Classical) {
            Method::Classical => ncrank_classical(&m, &cfg, DEFAULT_TRIALS, g.seed)?,
            Method::Quantum if k == 0 => ncrank_quantum(&lin, &cfg, DEFAULT_TRIALS, g.seed)?,
            Method::Quantum => {
                return Err(CliError::Usage("the quantum method needs affine entries; use --method classical".into()))
            }
        };
        (report, lin.is_square().then_some((lin, k)))
    } else {
        let p = if doc.get("coeffs").is_some() {
            LinearMatrixPencil::from_json(text(&bytes))?
        } else {
            pencil_of(&operator_from_json(text(&bytes))?)
        };
        let report = match method.unwrap_or(Method::Quantum) {
            Method::Quantum => ncrank_quantum(&p, &cfg, DEFAULT_TRIALS, g.seed)?,
            Method::Classical => ncrank_classical(&SymbolicMatrix::from_pencil(&p), &cfg, DEFAULT_TRIALS, g.seed)?,
        };
        (report, p.is_square().then_some((p, 0)))
    };
    let mut r = Report::new("ncrank", &bytes, cfg.mode.label());
    r.verdict = report.ncrank.to_string();
    r.headline = format!(
        "NC-RANK {} (commutative rank estimate {})",
        report.ncrank, report.commutative_rank_estimate
    );
    r.value = json!(report.ncrank);
    r.iterations = Some(report.subverdicts.iter().map(|s| s.iterations).sum());
    r.details = serde_json::to_value(&report).expect("report serializes");
    if g.verify {
        if let Some((p, k)) = square_pencil.filter(|(p, _)| p.rows() <= BLOWUP_MAX_N) {
            let v = blowup_singularity_oracle(&p, ORACLE_TRIALS, g.seed)?;
            let full = report.ncrank + k == p.rows();
            r.oracle = Some(OracleCheck {
                name: "blow-up".into(),
                result: json!(v),
                agrees: (v == BlowupVerdict::Nonsingular) == full,
            });
        }
    }
    Ok(r)
}

pub fn capacity(path: &Path, eps: f64, certified: bool, g: &GlobalArgs) -> Result<Report, CliError> {
    let (bytes, doc) = read(path)?;
    let op = load_operator(&bytes, &doc)?;
    let mode = if certified { NumericMode::ExactCertified } else { g.mode.unwrap_or(NumericMode::Float64) };
    let cfg = ScalingConfig::new(mode);
    let res = approx_capacity(&op, eps, &cfg)?;
    let positive = res.value > 0.0 || res.exact_value.as_ref().is_some_and(|v| num_traits::Signed::is_positive(v));
    let mut r = Report::new("capacity", &bytes, cfg.mode.label());
    r.verdict = if positive { "positive" } else { "zero" }.into();
    r.headline = format!("CAPACITY {}", res.value);
    r.value = json!(res.value);
    r.iterations = Some(res.run.iterations());
    r.details = json!({
        "eps": eps,
        "bracket": res.bracket.as_ref().map(|b| b.to_json()),
        "exact_value": res.exact_value.as_ref().map(|v| to_decimal_string(v, 17)),
        "gamma": res.gamma.to_string(),
        "verdict": res.run.verdict,
    });
    r.exit_code = if positive { 0 } else { 1 };
    if g.verify && op.n() <= CAPACITY_MAX_N {
        r.oracle = match brute_force_capacity(&op, g.seed) {
            Ok(o) => {
                let agrees = match &res.bracket {
                    Some(b) => to_f64(&b.lower) * (1.0 - 1e-9) <= o && o <= to_f64(&b.upper) * (1.0 + 1e-3),
                    None if positive => (o - res.value).abs() <= eps * o,
                    None => o <= 1e-3,
                };
                Some(OracleCheck { name: "brute-force-capacity".into(), result: json!(o), agrees })
            }
            Err(opscale::Error::Precondition(_)) => Some(OracleCheck {
                name: "brute-force-capacity".into(),
                result: json!(0.0),
                agrees: !positive,
            }),
            Err(e) => return Err(e.into()),
        };
    }
    Ok(r)
}

pub fn scale(path: &Path, iters: u64, trace: Option<&Path>, g: &GlobalArgs) -> Result<Report, CliError> {
    let (bytes, doc) = read(path)?;
    let op = load_operator(&bytes, &doc)?;
    let cfg = decision_config(g);
    let run = run_scaling(&op, &cfg, iters)?;
    if let Some(out) = trace {
        std::fs::write(out, run.to_jsonl()).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    }
    let last = run.records.last().map(|rec| rec.eps);
    let mut r = Report::new("scale", &bytes, cfg.mode.label());
    r.verdict = "completed".into();
    r.headline = match last {
        Some(e) => format!("SCALED {} steps, final eps {e:.6e}", run.iterations()),
        None => format!("SCALED {} steps", run.iterations()),
    };
    r.value = json!(last);
    r.iterations = Some(run.iterations());
    r.details = json!({
        "eps_trace": run.eps_trace(),
        "trace_file": trace.map(|p| p.display().to_string()),
        "stopped_early": matches!(run.verdict, Verdict::RankDecreasing { .. }),
    });
    Ok(r)
}

pub fn matscale(path: &Path, g: &GlobalArgs) -> Result<Report, CliError> {
    let (bytes, _) = read(path)?;
    let a = NonnegMatrix::from_json(text(&bytes))?;
    let t = a.default_iterations();
    let (positive, mode) = match g.mode {
        Some(NumericMode::Float64) | None => (permanent_positive_with(&a, t), NumericMode::Float64.label()),
        Some(m) => (permanent_positive_exact(&a, t), m.label()),
    };
    let mut r = Report::new("matscale", &bytes, mode);
    r.verdict = if positive { "positive" } else { "zero" }.into();
    r.headline = if positive { "PERMANENT POSITIVE" } else { "PERMANENT ZERO" }.into();
    r.value = json!(positive);
    r.iterations = Some(t);
    r.details = json!({ "n": a.n() });
    r.exit_code = if positive { 0 } else { 1 };
    if g.verify {
        r.oracle = Some(if a.n() <= PERMANENT_MAX_N {
            let per = brute_force_permanent(&a)?;
            let pos = num_traits::Signed::is_positive(&per);
            OracleCheck { name: "brute-force-permanent".into(), result: json!(per.to_string()), agrees: pos == positive }
        } else {
            let graph = BipartiteGraph::new(a.n(), a.support())?;
            let matched = perfect_matching_exists(&graph);
            OracleCheck { name: "perfect-matching".into(), result: json!(matched), agrees: matched == positive }
        });
    }
    Ok(r)
}

pub fn rit(formula: &str, g: &GlobalArgs) -> Result<Report, CliError> {
    let phi = parse_formula(formula)?;
    let cfg = decision_config(g);
    let out = rit_test(&phi, &cfg)?;
    let zero = out.verdict == RitVerdict::Zero;
    let mut r = Report::new("rit", formula.as_bytes(), cfg.mode.label());
    r.verdict = if zero { "zero" } else { "nonzero" }.into();
    r.headline = if zero { "ZERO" } else { "NONZERO" }.into();
    r.value = json!(zero);
    r.iterations = Some(out.pencil_iterations + out.border_iterations);
    r.details = serde_json::to_value(&out).expect("report serializes");
    r.exit_code = if zero { 0 } else { 1 };
    if g.verify {
        let d = phi.size().max(2);
        let v = rit_matrix_evaluation(&phi, d, 20, g.seed);
        r.oracle = Some(OracleCheck {
            name: format!("matrix-evaluation-d{d}"),
            result: json!(v),
            agrees: (v == opscale::oracles::EvalVerdict::Zero) == zero,
        });
    }
    Ok(r)
}
