//! Certified approximate definitions of types over a finite table.

mod definition;
mod witness;

pub use definition::{
    build_definition, definition_values, evaluate_definition, lipschitz_glue, DefineOutcome, Definition, GlueCore,
    GluedDefinition, MedianDefinition, Strategy,
};
pub use witness::{
    find_witness_rows, witness_violation, ApproxOracle, InstabilityEvidence, TableOracle, TypeFlavor, TypeFunction,
    WitnessOutcome, WitnessParams, WitnessSet,
};
