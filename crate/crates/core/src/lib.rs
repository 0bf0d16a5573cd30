//! Operator scaling for non-commutative singularity testing, nc-rank,
//! capacity approximation and rational identity testing.

pub mod error;
pub mod corpus;
pub mod cp_operator;
pub mod exact_linalg;
pub mod matrix_scaling;
pub mod ncrank;
pub mod oracles;
pub mod scaling;
pub mod symbolic;

pub use error::{Error, Result};
