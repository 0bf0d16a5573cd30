//! Named instances shared by tests, documentation and the command line.

use crate::cp_operator::CpOperator;
use crate::exact_linalg::RationalMatrix;

fn skew_unit(n: usize, i: usize, j: usize) -> RationalMatrix {
    RationalMatrix::unit(n, n, i, j).sub(&RationalMatrix::unit(n, n, j, i)).expect("square")
}

/// Coefficients `(A₀, A_z, A_w)` of the 3×3 skew-symmetric pencil
/// `[[0, z, w], [−z, 0, 1], [−w, −1, 0]]`: full, but singular for every scalar substitution.
pub fn skew3_coefficients() -> [RationalMatrix; 3] {
    [skew_unit(3, 1, 2), skew_unit(3, 0, 1), skew_unit(3, 0, 2)]
}

pub fn skew3_operator() -> CpOperator {
    CpOperator::new(skew3_coefficients().to_vec()).expect("3x3")
}

/// `copies` diagonal blocks of the skew-symmetric pencil sharing the same variables.
pub fn skew3_blocks(copies: usize) -> [RationalMatrix; 3] {
    let n = 3 * copies;
    skew3_coefficients().map(|a| {
        RationalMatrix::from_fn(n, n, |i, j| {
            if i / 3 == j / 3 {
                a[(i % 3, j % 3)].clone()
            } else {
                RationalMatrix::zeros(1, 1)[(0, 0)].clone()
            }
        })
    })
}

/// Edges of a bipartite graph on three vertices per side with no perfect matching,
/// yet no isolated vertex.
pub fn hall_violator_edges() -> Vec<(usize, usize)> {
    vec![(0, 0), (1, 0), (2, 0), (2, 1), (2, 2)]
}
