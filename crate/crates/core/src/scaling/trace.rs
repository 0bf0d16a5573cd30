//! JSON-lines export of a run.

use serde_json::json;

use super::ScalingRun;
use crate::exact_linalg::rational::to_decimal_string;

impl ScalingRun {
    /// One line per step: `{"j", "eps_j", "log_det_accumulator"}`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let eps = match &r.eps_exact {
                Some(e) => to_decimal_string(e, 30),
                None => format!("{:e}", r.eps),
            };
            let line = json!({
                "j": r.j,
                "eps_j": eps,
                "log_det_accumulator": r.log_det_accumulator,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}
