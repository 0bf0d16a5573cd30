use serde_json::{json, Value};

use super::CpOperator;
use crate::error::{Error, Result};
use crate::exact_linalg::rational::{format_rational, parse_rational};
use crate::exact_linalg::{Rational, RationalMatrix};

/// Reads a rational given as a JSON string or integer.
pub(crate) fn rational_from_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(num) if num.is_i64() => Ok(Rational::from_integer(num.as_i64().unwrap().into())),
        other => Err(Error::Document(format!("expected a rational string, found {other}"))),
    }
}

pub(crate) fn matrix_from_value(v: &Value, rows: usize, cols: usize, what: &str) -> Result<RationalMatrix> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Document(format!("{what} must be an array of rows")))?;
    if arr.len() != rows {
        return Err(Error::Document(format!("{what} has {} rows, expected {rows}", arr.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in arr.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Document(format!("{what} row {i} is not an array")))?;
        if row.len() != cols {
            return Err(Error::Document(format!(
                "{what} row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for x in row {
            data.push(rational_from_value(x)?);
        }
    }
    RationalMatrix::from_vec(rows, cols, data)
}

pub(crate) fn matrix_to_value(a: &RationalMatrix) -> Value {
    Value::Array(
        a.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|x| Value::String(format_rational(x))).collect()))
            .collect(),
    )
}

pub(crate) fn usize_field(doc: &Value, key: &str) -> Result<Option<usize>> {
    match doc.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|x| Some(x as usize))
            .ok_or_else(|| Error::Document(format!("`{key}` must be a non-negative integer"))),
    }
}

/// Parses `{"n": int, "kraus": [matrix, ...]}`.
pub fn operator_from_json(text: &str) -> Result<CpOperator> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    let n = usize_field(&doc, "n")?.ok_or_else(|| Error::Document("missing field `n`".into()))?;
    if n == 0 {
        return Err(Error::Document("`n` must be positive".into()));
    }
    let kraus = doc
        .get("kraus")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Document("missing array field `kraus`".into()))?;
    if kraus.is_empty() {
        return Err(Error::Document("`kraus` must be nonempty".into()));
    }
    let mats = kraus
        .iter()
        .enumerate()
        .map(|(i, k)| matrix_from_value(k, n, n, &format!("kraus[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    CpOperator::new(mats)
}

pub fn operator_to_json(op: &CpOperator) -> String {
    json!({
        "n": op.n(),
        "kraus": op.kraus().iter().map(matrix_to_value).collect::<Vec<_>>(),
    })
    .to_string()
}
