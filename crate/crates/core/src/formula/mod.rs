//! Continuous-logic formulas over finite many-sorted structures.

mod ast;
mod eval;
mod parser;
mod structure;

pub use ast::{infer_envelope, Formula, FormulaKind, Language, PredicateSymbol, Term, Variable};
pub use eval::{diam_structure, envelope_space, evaluate_formula, materialize_matrix, tuple_spec};
pub use parser::parse_formula;
pub use structure::{envelope_from_json, FiniteStructure, PredicateTable};
