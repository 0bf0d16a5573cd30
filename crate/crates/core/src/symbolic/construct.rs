//! Pencils whose inverse carries a formula in its top-right entry.

use num_traits::One;

use super::formula::Formula;
use super::pencil::LinearMatrixPencil;
use crate::error::{Error, Result};
use crate::exact_linalg::{Rational, RationalMatrix};

/// Square affine matrix `c₀ + Σ xᵢ Cᵢ` under construction.
struct Block {
    n: usize,
    c0: RationalMatrix,
    vars: Vec<RationalMatrix>,
}

impl Block {
    fn zeros(n: usize, q: usize) -> Self {
        Self { n, c0: RationalMatrix::zeros(n, n), vars: vec![RationalMatrix::zeros(n, n); q] }
    }

    fn set_const(&mut self, i: usize, j: usize, c: Rational) {
        self.c0[(i, j)] = c;
    }

    /// Copies `other` with its top-left corner at `(at, at)`.
    fn place(&mut self, other: &Block, at: usize) {
        for i in 0..other.n {
            for j in 0..other.n {
                self.c0[(at + i, at + j)] = other.c0[(i, j)].clone();
                for (dst, src) in self.vars.iter_mut().zip(&other.vars) {
                    dst[(at + i, at + j)] = src[(i, j)].clone();
                }
            }
        }
    }

    fn leaf(q: usize, c: Option<Rational>, var: Option<usize>) -> Self {
        let mut b = Self::zeros(2, q);
        b.set_const(0, 0, Rational::one());
        b.set_const(1, 1, Rational::one());
        if let Some(c) = c {
            b.set_const(0, 1, -c);
        }
        if let Some(v) = var {
            b.vars[v - 1][(0, 1)] = -Rational::one();
        }
        b
    }

    /// `[[e_n, L], [0, −e₁ᵀ]]`, whose inverse has top-right entry `(L⁻¹)₁ₙ⁻¹`
    /// when that entry is invertible.
    fn border(&self) -> Self {
        let n = self.n;
        let q = self.vars.len();
        let mut b = Self::zeros(n + 1, q);
        for i in 0..n {
            for j in 0..n {
                b.c0[(i, j + 1)] = self.c0[(i, j)].clone();
                for (dst, src) in b.vars.iter_mut().zip(&self.vars) {
                    dst[(i, j + 1)] = src[(i, j)].clone();
                }
            }
        }
        b.set_const(n - 1, 0, Rational::one());
        b.set_const(n, 1, -Rational::one());
        b
    }

    fn into_pencil(self) -> LinearMatrixPencil {
        let vars = (1..=self.vars.len()).map(|i| format!("x{i}")).collect();
        let a0 = (!self.c0.is_zero()).then_some(self.c0);
        LinearMatrixPencil::new(self.n, self.n, vars, a0, self.vars).expect("consistent block shapes")
    }

    fn from_pencil(p: &LinearMatrixPencil) -> Self {
        Self {
            n: p.rows(),
            c0: p.a0().cloned().unwrap_or_else(|| RationalMatrix::zeros(p.rows(), p.cols())),
            vars: p.coeffs().to_vec(),
        }
    }
}

fn build(f: &Formula, q: usize) -> Block {
    match f {
        Formula::Var(i) => Block::leaf(q, None, Some(*i)),
        Formula::Const(c) => Block::leaf(q, Some(c.clone()), None),
        Formula::Mul(a, b) => {
            let (l1, l2) = (build(a, q), build(b, q));
            let mut out = Block::zeros(l1.n + l2.n, q);
            out.place(&l1, 0);
            out.place(&l2, l1.n);
            out.set_const(l1.n - 1, l1.n, -Rational::one());
            out
        }
        Formula::Add(a, b) | Formula::Sub(a, b) => {
            let (l1, l2) = (build(a, q), build(b, q));
            let n = l1.n + l2.n + 2;
            let mut out = Block::zeros(n, q);
            out.set_const(0, 0, Rational::one());
            out.set_const(n - 1, n - 1, Rational::one());
            out.place(&l1, 1);
            out.place(&l2, 1 + l1.n);
            out.set_const(0, 1, -Rational::one());
            out.set_const(0, 1 + l1.n, -Rational::one());
            out.set_const(l1.n, n - 1, -Rational::one());
            let sign = if matches!(f, Formula::Sub(..)) { Rational::one() } else { -Rational::one() };
            out.set_const(l1.n + l2.n, n - 1, sign);
            out
        }
        Formula::Inv(a) => build(a, q).border(),
    }
}

/// Affine pencil `L_Φ` with `(L_Φ⁻¹)₁ₙ = Φ` wherever `Φ` is defined.
///
/// Variables are `x1..xq` with `q` the largest index in `Φ`; the dimension is at most `2·size(Φ)`.
pub fn formula_to_pencil(phi: &Formula) -> LinearMatrixPencil {
    build(phi, phi.max_var()).into_pencil()
}

/// `[[vᵀ, L], [0, −u]]` with `u = e₁ᵀ` and `v = e_n`: singular exactly when the
/// top-right entry of `L⁻¹` vanishes. Fullness of `L` is the caller's concern.
pub fn border_pencil(l: &LinearMatrixPencil) -> Result<LinearMatrixPencil> {
    if !l.is_square() || l.rows() == 0 {
        return Err(Error::Dimension(format!(
            "bordering needs a nonempty square pencil, got {}x{}",
            l.rows(),
            l.cols()
        )));
    }
    let out = Block::from_pencil(l).border().into_pencil();
    LinearMatrixPencil::new(out.rows(), out.cols(), l.vars().to_vec(), out.a0().cloned(), out.coeffs().to_vec())
}

/// Top-right `d×d` block of `L(X)⁻¹`, or `None` when `L(X)` is singular.
pub fn top_right_of_inverse(l: &LinearMatrixPencil, xs: &[RationalMatrix]) -> Result<Option<RationalMatrix>> {
    let d = xs.first().map_or(1, |x| x.rows());
    let m = l.eval_matrices(xs)?;
    match m.invert() {
        Ok(inv) => {
            let n = l.rows();
            Ok(Some(inv.submatrix(0..d, (n - 1) * d..n * d)))
        }
        Err(Error::Singular { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rational::rat;
    use crate::symbolic::parse_formula;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, q: usize, d: usize) -> Vec<RationalMatrix> {
        (0..q)
            .map(|_| RationalMatrix::from_fn(d, d, |_, _| rat(rng.gen_range(-9..=9))))
            .collect()
    }

    fn check_contract(text: &str, d: usize) {
        let phi = parse_formula(text).unwrap();
        let l = formula_to_pencil(&phi);
        assert!(l.rows() <= 2 * phi.size(), "{text}: {} > 2·{}", l.rows(), phi.size());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for _ in 0..20 {
            let xs = random_point(&mut rng, phi.max_var().max(1), d);
            let Ok(value) = phi.eval(&xs) else { continue };
            let top = top_right_of_inverse(&l, &xs).unwrap().expect("pencil invertible on the domain");
            assert_eq!(top, value, "{text}");
            checked += 1;
            if checked == 5 {
                break;
            }
        }
        assert_eq!(checked, 5, "{text}");
    }

    #[test]
    fn evaluation_contract() {
        check_contract("x1", 1);
        check_contract("3*x1 - 1/2", 2);
        check_contract("x1*x2 - x2*x1", 2);
        check_contract("x1 + x2*x1 + 1/2", 3);
        check_contract("inv(x1)", 2);
        check_contract("inv(x1 + x1*inv(x2)*x1)", 2);
        check_contract("inv(x1 + x1*inv(x2)*x1) - (inv(x1) - inv(x1 + x2))", 2);
        check_contract("x1*inv(x2*x3 - x3*x2)*x1", 3);
    }

    #[test]
    fn leaf_shapes() {
        let l = formula_to_pencil(&parse_formula("x1").unwrap());
        assert_eq!(l.rows(), 2);
        let top = top_right_of_inverse(&l, &[RationalMatrix::from_i64_rows(&[&[3]])]).unwrap().unwrap();
        assert_eq!(top[(0, 0)], rat(3));
    }

    #[test]
    fn border_examples() {
        let id = LinearMatrixPencil::new(2, 2, vec![], Some(RationalMatrix::identity(2)), vec![]).unwrap();
        let m = border_pencil(&id).unwrap();
        assert_eq!(m.rows(), 3);
        assert_eq!(m.a0().unwrap().rank(), 2);
        let swap = RationalMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let m = border_pencil(&LinearMatrixPencil::new(2, 2, vec![], Some(swap), vec![]).unwrap()).unwrap();
        assert_eq!(m.a0().unwrap().rank(), 3);
    }
}
