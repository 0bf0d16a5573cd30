//! Linearization of polynomial-entry matrices by repeated bordering.

use super::formula::Formula;
use super::pencil::{LinearMatrixPencil, SymbolicMatrix};
use crate::error::{Error, Result};
use crate::exact_linalg::RationalMatrix;

/// Splits `f = a + s·b·c` at its topmost-leftmost product reachable through `+`/`−`.
fn split_top_mul(f: &Formula, positive: bool) -> Option<(Formula, bool, Formula, Formula)> {
    match f {
        Formula::Mul(b, c) => Some((Formula::int(0), positive, (**b).clone(), (**c).clone())),
        Formula::Add(l, r) => {
            if let Some((a, s, b, c)) = split_top_mul(l, positive) {
                return Some((join(a, (**r).clone(), true), s, b, c));
            }
            let (a, s, b, c) = split_top_mul(r, positive)?;
            Some((join((**l).clone(), a, true), s, b, c))
        }
        Formula::Sub(l, r) => {
            if let Some((a, s, b, c)) = split_top_mul(l, positive) {
                return Some((join(a, (**r).clone(), false), s, b, c));
            }
            let (a, s, b, c) = split_top_mul(r, !positive)?;
            Some((join((**l).clone(), a, false), s, b, c))
        }
        _ => None,
    }
}

fn join(l: Formula, r: Formula, plus: bool) -> Formula {
    match (l.is_zero_const(), r.is_zero_const(), plus) {
        (_, true, _) => l,
        (true, false, true) => r,
        _ if plus => Formula::add(l, r),
        _ => Formula::sub(l, r),
    }
}

/// Returns the pencil and the number `k` of borderings, one per product gate.
///
/// The output has shape `(rows + k) × (cols + k)` and variables `x1..xq` where
/// `q` is the largest variable index in the input.
pub fn higman_linearize(a: &SymbolicMatrix) -> Result<(LinearMatrixPencil, usize)> {
    if a.entries().iter().any(Formula::has_inverse) {
        return Err(Error::Unsupported("Higman linearization needs division-free entries".into()));
    }
    let (mut rows, mut cols) = (a.rows(), a.cols());
    let mut grid: Vec<Vec<Formula>> =
        (0..rows).map(|i| (0..cols).map(|j| a.entry(i, j).clone()).collect()).collect();
    let mut k = 0;
    loop {
        let hit = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .find_map(|(i, j)| split_top_mul(&grid[i][j], true).map(|parts| (i, j, parts)));
        let Some((i, j, (rest, positive, b, c))) = hit else { break };
        for row in grid.iter_mut() {
            row.push(Formula::int(0));
        }
        grid.push(vec![Formula::int(0); cols + 1]);
        grid[i][j] = rest;
        grid[i][cols] = b;
        grid[rows][j] = if positive { Formula::sub(Formula::int(0), c) } else { c };
        grid[rows][cols] = Formula::int(1);
        rows += 1;
        cols += 1;
        k += 1;
    }
    let q = a.max_var();
    let mut a0 = RationalMatrix::zeros(rows, cols);
    let mut coeffs = vec![RationalMatrix::zeros(rows, cols); q];
    for (i, row) in grid.iter().enumerate() {
        for (j, f) in row.iter().enumerate() {
            let (c0, terms) = f.affine_form().ok_or_else(|| {
                Error::Unsupported(format!("entry ({i}, {j}) did not linearize"))
            })?;
            a0[(i, j)] = c0;
            for (v, c) in terms {
                if v == 0 {
                    return Err(Error::UnknownIdentifier("x0".into()));
                }
                coeffs[v - 1][(i, j)] = c;
            }
        }
    }
    let vars = (1..=q).map(|i| format!("x{i}")).collect();
    let a0 = (!a0.is_zero()).then_some(a0);
    Ok((LinearMatrixPencil::new(rows, cols, vars, a0, coeffs)?, k))
}
