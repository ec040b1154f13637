//! Finite-scale tools for approximate stability of metric-valued bipartite
//! structures: order-property chains and stability profiles, seminorm
//! audits, certified approximate definitions of types, row-space
//! coverings, and epsilon-Cantor-Bendixson analysis of finite topometric
//! spaces. A small continuous-logic formula engine turns formulas over
//! finite structures into the tables the rest of the crate analyses.

pub mod chain;
pub mod cli;
pub mod definability;
pub mod envelope;
pub mod error;
pub mod formula;
pub mod matrix;
pub mod profile;
pub mod ramsey;
pub mod report;
pub mod seminorm;
pub mod typespace;
pub mod value_space;

pub use chain::{detect_chain, ChainKind, ChainMode, Detection, SearchLimits, SearchMode, WitnessChain};
pub use definability::{build_definition, evaluate_definition, find_witness_rows, lipschitz_glue, DefineOutcome, Definition, Strategy, TypeFunction, WitnessOutcome, WitnessParams, WitnessSet};
pub use envelope::{envelope_propagate, CompactEnvelope, Connective, Interval};
pub use error::{Error, Result};
pub use formula::{diam_structure, evaluate_formula, materialize_matrix, parse_formula, FiniteStructure, Formula, Language};
pub use matrix::{Transform, WeightedBipartiteStructure};
pub use profile::{stability_profile, ProfileEntry, StabilityProfile};
pub use ramsey::{verify_ramsey, RamseyCertificate};
pub use report::{verify_report, Certificate, CertificateCheck, Report};
pub use seminorm::{seminorm_audit, AuditOptions, LawCheck, LawStatus, SeminormReport};
pub use typespace::{cb_analyze, cover_rows, fs_level, CBReport, Cover, CoverMethod, TopometricSpace, TwoLayerFixture};
pub use value_space::{embed_finite_metric, metric_distance, MetricTable, ValuePoint, ValueSpace};
