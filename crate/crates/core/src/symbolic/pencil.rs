//! Linear matrix pencils and symbolic matrices.

use serde_json::{json, Value};

use super::formula::Formula;
use super::parser::parse_formula;
use crate::cp_operator::json::{matrix_from_value, matrix_to_value, usize_field};
use crate::cp_operator::CpOperator;
use crate::error::{Error, Result};
use crate::exact_linalg::{Rational, RationalMatrix};

/// `L = A₀ + Σ xᵢ Aᵢ` over non-commuting variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMatrixPencil {
    rows: usize,
    cols: usize,
    vars: Vec<String>,
    a0: Option<RationalMatrix>,
    coeffs: Vec<RationalMatrix>,
}

impl LinearMatrixPencil {
    pub fn new(
        rows: usize,
        cols: usize,
        vars: Vec<String>,
        a0: Option<RationalMatrix>,
        coeffs: Vec<RationalMatrix>,
    ) -> Result<Self> {
        if vars.len() != coeffs.len() {
            return Err(Error::Dimension(format!(
                "{} variable names for {} coefficient matrices",
                vars.len(),
                coeffs.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = vars.iter().find(|v| !seen.insert(v.as_str())) {
            return Err(Error::Document(format!("variable `{dup}` declared twice")));
        }
        for a in a0.iter().chain(&coeffs) {
            if a.rows() != rows || a.cols() != cols {
                return Err(Error::Dimension(format!(
                    "coefficient is {}x{}, expected {rows}x{cols}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(Self { rows, cols, vars, a0, coeffs })
    }

    /// Homogeneous square pencil with variables `x1, x2, …`.
    pub fn from_coefficients(coeffs: Vec<RationalMatrix>) -> Result<Self> {
        let (r, c) = coeffs.first().map_or((0, 0), |a| (a.rows(), a.cols()));
        let vars = (1..=coeffs.len()).map(|i| format!("x{i}")).collect();
        Self::new(r, c, vars, None, coeffs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn a0(&self) -> Option<&RationalMatrix> {
        self.a0.as_ref()
    }

    pub fn coeffs(&self) -> &[RationalMatrix] {
        &self.coeffs
    }

    pub fn var_count(&self) -> usize {
        self.coeffs.len()
    }

    fn fresh_name(&self) -> String {
        std::iter::once("x0".to_string())
            .chain((0..).map(|k| format!("h_{k}")))
            .find(|name| !self.vars.contains(name))
            .expect("infinitely many candidates")
    }

    /// Moves a nonzero constant term onto a fresh leading variable; drops a zero one.
    pub fn affine_to_linear(&self) -> Self {
        match &self.a0 {
            Some(a0) if !a0.is_zero() => {
                let mut vars = vec![self.fresh_name()];
                vars.extend(self.vars.iter().cloned());
                let mut coeffs = vec![a0.clone()];
                coeffs.extend(self.coeffs.iter().cloned());
                Self { rows: self.rows, cols: self.cols, vars, a0: None, coeffs }
            }
            _ => Self { a0: None, ..self.clone() },
        }
    }

    /// Pads with zero rows or columns to a square pencil.
    pub fn pad_to_square(&self) -> Self {
        let n = self.rows.max(self.cols);
        Self {
            rows: n,
            cols: n,
            vars: self.vars.clone(),
            a0: self.a0.as_ref().map(|a| a.pad_to(n, n)),
            coeffs: self.coeffs.iter().map(|a| a.pad_to(n, n)).collect(),
        }
    }

    /// Completely positive operator whose Kraus matrices are the coefficients of
    /// the homogeneous lift.
    pub fn to_operator(&self) -> Result<CpOperator> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "operator needs a square pencil, got {}x{}",
                self.rows, self.cols
            )));
        }
        let lifted = self.affine_to_linear();
        if lifted.coeffs.is_empty() {
            return CpOperator::new(vec![RationalMatrix::zeros(self.rows, self.cols)]);
        }
        CpOperator::new(lifted.coeffs)
    }

    /// `A₀ + Σ βᵢ Aᵢ`.
    pub fn eval_scalar(&self, beta: &[Rational]) -> Result<RationalMatrix> {
        if beta.len() != self.coeffs.len() {
            return Err(Error::Dimension("one scalar per variable is required".into()));
        }
        let mut out = self.a0.clone().unwrap_or_else(|| RationalMatrix::zeros(self.rows, self.cols));
        for (a, b) in self.coeffs.iter().zip(beta) {
            out = out.add(&a.scale(b))?;
        }
        Ok(out)
    }

    /// `A₀ ⊗ I + Σ Aᵢ ⊗ Xᵢ`, whose `(p, q)` block is the entry `(p, q)` of the pencil at `X`.
    pub fn eval_matrices(&self, xs: &[RationalMatrix]) -> Result<RationalMatrix> {
        if xs.len() != self.coeffs.len() {
            return Err(Error::Dimension("one matrix per variable is required".into()));
        }
        let d = xs.first().map_or(1, |x| x.rows());
        let mut out = match &self.a0 {
            Some(a0) => a0.kron(&RationalMatrix::identity(d)),
            None => RationalMatrix::zeros(self.rows * d, self.cols * d),
        };
        for (a, x) in self.coeffs.iter().zip(xs) {
            out = out.add(&a.kron(x))?;
        }
        Ok(out)
    }

    /// Block-diagonal sum of two pencils over the same variables.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.vars != other.vars {
            return Err(Error::Precondition("direct sum needs identical variable lists".into()));
        }
        let a0 = match (&self.a0, &other.a0) {
            (None, None) => None,
            (a, b) => {
                let a = a.clone().unwrap_or_else(|| RationalMatrix::zeros(self.rows, self.cols));
                let b = b.clone().unwrap_or_else(|| RationalMatrix::zeros(other.rows, other.cols));
                Some(a.direct_sum(&b))
            }
        };
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols + other.cols,
            vars: self.vars.clone(),
            a0,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.direct_sum(b)).collect(),
        })
    }

    /// Parses `{"n" | "rows"+"cols", "vars": [names], "A0": matrix|null, "coeffs": [matrix, ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        Self::from_value(&doc)
    }

    pub(crate) fn from_value(doc: &Value) -> Result<Self> {
        let (rows, cols) = match (usize_field(doc, "n")?, usize_field(doc, "rows")?, usize_field(doc, "cols")?) {
            (Some(n), None, None) => (n, n),
            (None, Some(r), Some(c)) => (r, c),
            _ => return Err(Error::Document("give either `n` or both `rows` and `cols`".into())),
        };
        let coeffs = doc
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Document("missing array field `coeffs`".into()))?
            .iter()
            .enumerate()
            .map(|(i, m)| matrix_from_value(m, rows, cols, &format!("coeffs[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let vars = match doc.get("vars") {
            None | Some(Value::Null) => (1..=coeffs.len()).map(|i| format!("x{i}")).collect(),
            Some(Value::Array(names)) => names
                .iter()
                .map(|v| {
                    v.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| Error::Document("`vars` must hold strings".into()))
                })
                .collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(Error::Document("`vars` must be an array".into())),
        };
        let a0 = match doc.get("A0") {
            None | Some(Value::Null) => None,
            Some(m) => Some(matrix_from_value(m, rows, cols, "A0")?),
        };
        Self::new(rows, cols, vars, a0, coeffs).map_err(|e| match e {
            Error::Dimension(m) => Error::Document(m),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let mut doc = json!({
            "vars": self.vars,
            "A0": self.a0.as_ref().map(matrix_to_value),
            "coeffs": self.coeffs.iter().map(matrix_to_value).collect::<Vec<_>>(),
        });
        if self.is_square() {
            doc["n"] = json!(self.rows);
        } else {
            doc["rows"] = json!(self.rows);
            doc["cols"] = json!(self.cols);
        }
        doc.to_string()
    }
}

/// Matrix whose entries are formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Formula>,
}

impl SymbolicMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Formula>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} symbolic matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_strings(rows: &[&[&str]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged symbolic matrix".into()));
        }
        let entries = rows.iter().flat_map(|row| row.iter()).map(|s| parse_formula(s)).collect::<Result<_>>()?;
        Self::new(r, c, entries)
    }

    /// Entry formulas of a pencil; coefficient `k` becomes the variable `x(k+1)`.
    pub fn from_pencil(p: &LinearMatrixPencil) -> Self {
        let entries = (0..p.rows())
            .flat_map(|i| (0..p.cols()).map(move |j| (i, j)))
            .map(|(i, j)| {
                let mut f: Option<Formula> = p
                    .a0()
                    .map(|a| &a[(i, j)])
                    .filter(|c| !num_traits::Zero::is_zero(*c))
                    .map(|c| Formula::Const(c.clone()));
                for (k, a) in p.coeffs().iter().enumerate() {
                    let c = &a[(i, j)];
                    if num_traits::Zero::is_zero(c) {
                        continue;
                    }
                    let term = if num_traits::One::is_one(c) {
                        Formula::Var(k + 1)
                    } else {
                        Formula::mul(Formula::Const(c.clone()), Formula::Var(k + 1))
                    };
                    f = Some(match f {
                        None => term,
                        Some(prev) => Formula::add(prev, term),
                    });
                }
                f.unwrap_or_else(|| Formula::int(0))
            })
            .collect();
        Self { rows: p.rows(), cols: p.cols(), entries }
    }

    /// Parses `{"rows", "cols", "entries": [[formula, ...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        Self::from_value(&doc)
    }

    pub(crate) fn from_value(doc: &Value) -> Result<Self> {
        let rows = usize_field(doc, "rows")?.ok_or_else(|| Error::Document("missing field `rows`".into()))?;
        let cols = usize_field(doc, "cols")?.ok_or_else(|| Error::Document("missing field `cols`".into()))?;
        let arr = doc
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Document("missing array field `entries`".into()))?;
        if arr.len() != rows {
            return Err(Error::Document(format!("`entries` has {} rows, expected {rows}", arr.len())));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for row in arr {
            let row = row.as_array().filter(|r| r.len() == cols).ok_or_else(|| {
                Error::Document(format!("every row of `entries` must hold {cols} formulas"))
            })?;
            for cell in row {
                let text = cell
                    .as_str()
                    .ok_or_else(|| Error::Document("formula entries must be strings".into()))?;
                entries.push(parse_formula(text)?);
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &Formula {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Formula] {
        &self.entries
    }

    pub fn max_var(&self) -> usize {
        self.entries.iter().map(Formula::max_var).max().unwrap_or(0)
    }

    pub fn mul_count(&self) -> usize {
        self.entries.iter().map(Formula::mul_count).sum()
    }

    /// Scalar substitution `xi ↦ values[i − 1]`.
    pub fn eval_scalar(&self, values: &[Rational]) -> Result<RationalMatrix> {
        let vars: Vec<RationalMatrix> = values
            .iter()
            .map(|v| RationalMatrix::from_vec(1, 1, vec![v.clone()]).expect("1x1"))
            .collect();
        let data = self
            .entries
            .iter()
            .map(|f| f.eval(&vars).map(|m| m[(0, 0)].clone()))
            .collect::<Result<Vec<_>>>()?;
        RationalMatrix::from_vec(self.rows, self.cols, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::skew3_coefficients;
    use crate::exact_linalg::rational::rat;

    fn skew_affine() -> LinearMatrixPencil {
        let [a0, az, aw] = skew3_coefficients();
        LinearMatrixPencil::new(3, 3, vec!["z".into(), "w".into()], Some(a0), vec![az, aw]).unwrap()
    }

    #[test]
    fn affine_lift() {
        let p = skew_affine();
        let lifted = p.affine_to_linear();
        assert_eq!(lifted.var_count(), 3);
        assert_eq!(lifted.vars()[0], "x0");
        assert_eq!(lifted.coeffs().to_vec(), skew3_coefficients().to_vec());
        let zero = LinearMatrixPencil::new(2, 2, vec!["x1".into()], Some(RationalMatrix::zeros(2, 2)), vec![RationalMatrix::identity(2)]).unwrap();
        let lifted = zero.affine_to_linear();
        assert_eq!((lifted.var_count(), lifted.a0()), (1, None));
    }

    #[test]
    fn json_round_trip() {
        let p = skew_affine();
        let q = LinearMatrixPencil::from_json(&p.to_json()).unwrap();
        assert_eq!(p, q);
        let rect = LinearMatrixPencil::from_json(r#"{"rows": 1, "cols": 2, "coeffs": [[["1", "0"]]]}"#).unwrap();
        assert_eq!((rect.rows(), rect.cols(), rect.vars()[0].as_str()), (1, 2, "x1"));
        assert!(LinearMatrixPencil::from_json(r#"{"n": 2, "coeffs": [[["1"]]]}"#).is_err());
        assert!(LinearMatrixPencil::from_json(r#"{"n": 1, "vars": ["a", "a"], "coeffs": [[["1"]], [["2"]]]}"#).is_err());
    }

    #[test]
    fn scalar_evaluation_is_singular() {
        let p = skew_affine();
        let m = p.eval_scalar(&[rat(3), rat(-5)]).unwrap();
        assert_eq!(m.det().unwrap(), rat(0));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn symbolic_from_pencil_matches() {
        let p = skew_affine();
        let s = SymbolicMatrix::from_pencil(&p);
        assert_eq!(s.entry(0, 1).to_string(), "x1");
        assert_eq!(s.entry(2, 1).to_string(), "-1");
        let vals = [rat(2), rat(7)];
        assert_eq!(s.eval_scalar(&vals).unwrap(), p.eval_scalar(&vals).unwrap());
    }

    #[test]
    fn symbolic_json() {
        let s = SymbolicMatrix::from_json(r#"{"rows": 1, "cols": 2, "entries": [["x1*x2", "1"]]}"#).unwrap();
        assert_eq!(s.mul_count(), 1);
        assert!(SymbolicMatrix::from_json(r#"{"rows": 1, "cols": 2, "entries": [["x1"]]}"#).is_err());
        assert!(SymbolicMatrix::from_json(r#"{"rows": 1, "cols": 1, "entries": [["q"]]}"#).is_err());
    }
}
