//! Formulas, symbolic matrices, pencils and the reductions between them.

mod construct;
mod formula;
mod higman;
mod parser;
mod pencil;
mod rit;

pub use construct::{border_pencil, formula_to_pencil, top_right_of_inverse};
pub use formula::Formula;
pub use higman::higman_linearize;
pub use parser::parse_formula;
pub use pencil::{LinearMatrixPencil, SymbolicMatrix};
pub use rit::{inverse_entry_border, rit_test, RitReport, RitVerdict};
