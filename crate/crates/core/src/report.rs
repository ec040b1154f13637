//! Reports and the certificates they carry. Every certificate holds the
//! inputs it speaks about, so `verify_report` can re-check it from the
//! report alone.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chain::{detect_chain, ChainMode, PairGraph, SearchLimits, SearchMode, WitnessChain};
use crate::definability::{definition_values, witness_violation, Definition, InstabilityEvidence, WitnessSet};
use crate::error::Result;
use crate::formula::{diam_structure, evaluate_formula, materialize_matrix, parse_formula, FiniteStructure};
use crate::matrix::WeightedBipartiteStructure;
use crate::profile::StabilityProfile;
use crate::ramsey::{triangle_free_colouring, verify_ramsey, RamseyCertificate};
use crate::seminorm::{seminorm_audit, AuditOptions, SeminormReport};
use crate::typespace::{
    cb_analyze, extension_audit, fs_level, symmetry_audit, CBReport, Cover, ExtensionAudit, SymmetryAudit, TopometricSpace,
    TwoLayerFixture,
};
use crate::value_space::{sup_dist, MetricTable, ValuePoint, TOL};

pub const TOOL_NAME: &str = "epslens";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Accuracy required of an embedding.
pub const EMBED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A chain whose discrepancies all reach (or with `strict`, exceed) `epsilon`.
    Chain { matrix: WeightedBipartiteStructure, epsilon: f64, strict: bool, chain: WitnessChain },
    /// No chain of length `k + 1` at level `epsilon`; re-checked by search.
    NoChain { matrix: WeightedBipartiteStructure, epsilon: f64, k: usize, mode: ChainMode },
    Profile { matrix: WeightedBipartiteStructure, profile: StabilityProfile },
    Seminorm {
        matrix: WeightedBipartiteStructure,
        other: Option<WeightedBipartiteStructure>,
        options: AuditOptions,
        report: SeminormReport,
    },
    Witness { matrix: WeightedBipartiteStructure, type_values: Vec<ValuePoint>, witness: WitnessSet },
    Instability { matrix: WeightedBipartiteStructure, evidence: InstabilityEvidence },
    Definition { matrix: WeightedBipartiteStructure, type_values: Vec<ValuePoint>, definition: Definition },
    Cover { matrix: WeightedBipartiteStructure, cover: Cover },
    FsLevel { fixture: TwoLayerFixture, row: usize, level: f64 },
    Extension { fixture: TwoLayerFixture, definition: Definition, audit: ExtensionAudit, delta: f64, epsilon: f64 },
    Symmetry { fixture: TwoLayerFixture, def_p: Definition, def_q: Definition, audit: SymmetryAudit },
    Cb { space: Value, report: CBReport },
    Ramsey { certificate: RamseyCertificate },
    Embedding { metric: MetricTable, base: usize, points: Vec<ValuePoint> },
    Evaluation { structure: Value, formula: String, valuation: BTreeMap<String, String>, value: ValuePoint },
    Diameter { structure: Value, formula: String, diameter: f64 },
    Materialized {
        structure: Value,
        formula: String,
        x: Vec<(String, String)>,
        y: Vec<(String, String)>,
        matrix: WeightedBipartiteStructure,
    },
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn s<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn verify_profile(f: &WeightedBipartiteStructure, p: &StabilityProfile, limits: &SearchLimits) -> std::result::Result<(), String> {
    check(p.diameter == f.diameter(), || "profile diameter does not match the table".into())?;
    let certified = p.entries.iter().any(|e| e.certified);
    let graph = if certified { Some(s(PairGraph::new(f, limits))?) } else { None };
    let mut prev = f64::INFINITY;
    for e in &p.entries {
        check(e.epsilon_k <= prev, || format!("eps_{} increases", e.k))?;
        check(e.epsilon_k <= f.diameter(), || format!("eps_{} exceeds the diameter", e.k))?;
        prev = e.epsilon_k;
        match &e.chain {
            Some(c) => {
                check(c.len() == e.k + 1, || format!("chain for k = {} has length {}", e.k, c.len()))?;
                check(c.min_discrepancy == e.epsilon_k, || format!("chain for k = {} does not attain eps_k", e.k))?;
                c.verify(f, e.epsilon_k, false)?;
            }
            None => check(e.epsilon_k == 0.0, || format!("eps_{} > 0 without a chain", e.k))?,
        }
        if let (true, Some(g), Some(next)) = (e.certified, &graph, e.next_value) {
            let found = s(g.exists_chain(next, e.k + 1, limits.node_budget))?;
            check(!found, || format!("a chain of length {} exists at {next}", e.k + 1))?;
        }
    }
    Ok(())
}

fn verify_definition(
    f: &WeightedBipartiteStructure,
    p: &[ValuePoint],
    def: &Definition,
) -> std::result::Result<(), String> {
    check(p.len() == f.n_cols(), || "type length does not match the table".into())?;
    let vals = s(definition_values(def, f))?;
    let err = vals.iter().zip(p).map(|(a, b)| f.dist(a, b)).fold(0.0, f64::max);
    check(err == def.certified_error(), || format!("measured error {err} differs from the recorded {}", def.certified_error()))?;
    match def {
        Definition::Glue(g) => {
            check(err <= g.bound, || format!("error {err} exceeds {}", g.bound))?;
            let w = &g.witness;
            check(w.rows == g.rows, || "definition rows differ from the witness rows".into())?;
            check(witness_violation(f, p, &w.rows, w.params.delta, w.params.bound()).is_none(), || {
                "witness rows fail the postcondition".into()
            })?;
            for (k, c) in g.coords.iter().enumerate() {
                let at: Vec<f64> = c.anchors.iter().map(|q| c.eval(q)).collect();
                for i in 0..at.len() {
                    for j in i + 1..at.len() {
                        let d = sup_dist(&c.anchors[i], &c.anchors[j]);
                        check((at[i] - at[j]).abs() <= c.lipschitz * d + TOL, || {
                            format!("coordinate {k}: Lipschitz bound fails on anchors {i}, {j}")
                        })?;
                    }
                }
            }
        }
        Definition::Median(m) => {
            check(m.rows.len() % 2 == 1, || "median over an even number of rows".into())?;
            check(err <= m.epsilon, || format!("error {err} exceeds {}", m.epsilon))?;
        }
    }
    Ok(())
}

fn reparse(structure: &Value) -> std::result::Result<FiniteStructure, String> {
    s(FiniteStructure::from_json_str(&structure.to_string()))
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Chain { .. } => "chain",
            Certificate::NoChain { .. } => "no_chain",
            Certificate::Profile { .. } => "profile",
            Certificate::Seminorm { .. } => "seminorm",
            Certificate::Witness { .. } => "witness",
            Certificate::Instability { .. } => "instability",
            Certificate::Definition { .. } => "definition",
            Certificate::Cover { .. } => "cover",
            Certificate::FsLevel { .. } => "fs_level",
            Certificate::Extension { .. } => "extension",
            Certificate::Symmetry { .. } => "symmetry",
            Certificate::Cb { .. } => "cb",
            Certificate::Ramsey { .. } => "ramsey",
            Certificate::Embedding { .. } => "embedding",
            Certificate::Evaluation { .. } => "evaluation",
            Certificate::Diameter { .. } => "diameter",
            Certificate::Materialized { .. } => "materialized",
        }
    }

    /// Re-checks the certificate against the data it carries.
    pub fn verify(&self, limits: &SearchLimits) -> std::result::Result<(), String> {
        match self {
            Certificate::Chain { matrix, epsilon, strict, chain } => chain.verify(matrix, *epsilon, *strict),
            Certificate::NoChain { matrix, epsilon, k, mode } => {
                let d = s(detect_chain(matrix, *epsilon, *k, *mode, SearchMode::Exact, limits))?;
                check(d.chain.is_none() && d.exhaustive, || format!("a chain exists at level {epsilon}"))
            }
            Certificate::Profile { matrix, profile } => verify_profile(matrix, profile, limits),
            Certificate::Seminorm { matrix, other, options, report } => {
                let again = s(seminorm_audit(matrix, other.as_ref(), options, limits))?;
                check(&again == report, || "seminorm audit does not reproduce".into())
            }
            Certificate::Witness { matrix, type_values, witness } => {
                check(type_values.len() == matrix.n_cols(), || "type length does not match the table".into())?;
                let p = &witness.params;
                check(witness_violation(matrix, type_values, &witness.rows, p.delta, p.bound()).is_none(), || {
                    "witness rows fail the postcondition".into()
                })
            }
            Certificate::Instability { matrix, evidence } => {
                evidence.chain.verify(matrix, evidence.epsilon, true)
            }
            Certificate::Definition { matrix, type_values, definition } => verify_definition(matrix, type_values, definition),
            Certificate::Cover { matrix, cover } => cover.verify(matrix),
            Certificate::FsLevel { fixture, row, level } => {
                let again = s(fs_level(fixture, *row))?;
                check(again == *level, || format!("fs level recomputes to {again}"))
            }
            Certificate::Extension { fixture, definition, audit, delta, epsilon } => {
                let again = s(extension_audit(fixture, definition, audit.q, *delta, *epsilon))?;
                check(&again == audit, || "extension audit does not reproduce".into())
            }
            Certificate::Symmetry { fixture, def_p, def_q, audit } => {
                let again = s(symmetry_audit(fixture, audit.p_row, def_p, audit.q_col, def_q, audit.epsilon))?;
                check(&again == audit, || "symmetry audit does not reproduce".into())
            }
            Certificate::Cb { space, report } => {
                let sp = s(TopometricSpace::from_json_str(&space.to_string(), true))?;
                let again = s(cb_analyze(&sp, report.epsilon))?;
                check(&again == report, || "CB analysis does not reproduce".into())
            }
            Certificate::Ramsey { certificate } => {
                if let (3, Some(col)) = (certificate.s, &certificate.lower_bound_colouring) {
                    check(triangle_free_colouring(certificate.value - 1, col), || {
                        "lower-bound colouring has a monochromatic triangle".into()
                    })?;
                }
                let again = s(verify_ramsey(certificate.s))?;
                check(&again == certificate, || "Ramsey certificate does not reproduce".into())
            }
            Certificate::Embedding { metric, base, points } => {
                check(*base < metric.len() && points.len() == metric.len(), || "embedding has the wrong size".into())?;
                for i in 0..points.len() {
                    for j in 0..points.len() {
                        let (Some(a), Some(b)) = (points[i].coords(), points[j].coords()) else {
                            return Err("embedded points must be vectors".into());
                        };
                        check(a.len() == metric.len() && b.len() == metric.len(), || "embedded point has the wrong dimension".into())?;
                        let d = sup_dist(a, b);
                        check((d - metric.get(i, j)).abs() <= EMBED_TOL, || {
                            format!("d({i}, {j}) = {} but the images are {d} apart", metric.get(i, j))
                        })?;
                    }
                }
                Ok(())
            }
            Certificate::Evaluation { structure, formula, valuation, value } => {
                let st = reparse(structure)?;
                let f = s(parse_formula(formula, st.language()))?;
                let again = s(evaluate_formula(&f, &st, valuation))?;
                check(&again == value, || format!("evaluates to {again}"))
            }
            Certificate::Diameter { structure, formula, diameter } => {
                let st = reparse(structure)?;
                let f = s(parse_formula(formula, st.language()))?;
                let again = s(diam_structure(&f, &st))?;
                check(again == *diameter, || format!("diameter recomputes to {again}"))
            }
            Certificate::Materialized { structure, formula, x, y, matrix } => {
                let st = reparse(structure)?;
                let f = s(parse_formula(formula, st.language()))?;
                let again = s(materialize_matrix(&f, &st, x, y))?;
                check(&again == matrix, || "materialized matrix does not reproduce".into())
            }
        }
    }
}

/// The output of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub arguments: Value,
    pub results: Value,
    pub certificates: Vec<Certificate>,
    pub elapsed_ms: f64,
}

impl Report {
    pub fn new(command: &str, arguments: Value, results: Value, certificates: Vec<Certificate>) -> Self {
        Report {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: command.into(),
            arguments,
            results,
            certificates,
            elapsed_ms: 0.0,
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub index: usize,
    pub kind: String,
    pub ok: bool,
    pub detail: Option<String>,
}

/// Re-checks every certificate in a report.
pub fn verify_report(report: &Report, limits: &SearchLimits) -> Vec<CertificateCheck> {
    report
        .certificates
        .iter()
        .enumerate()
        .map(|(index, c)| {
            let r = c.verify(limits);
            CertificateCheck {
                index,
                kind: c.kind().into(),
                ok: r.is_ok(),
                detail: r.err(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainKind;
    use crate::profile::stability_profile;

    #[test]
    fn tampered_certificates_fail() {
        let f = WeightedBipartiteStructure::half_graph(3).unwrap();
        let chain = WitnessChain::from_indices(&f, vec![0, 1, 2], vec![0, 1, 2], ChainKind::Plain).unwrap();
        let good = Certificate::Chain { matrix: f.clone(), epsilon: 1.0, strict: false, chain: chain.clone() };
        assert!(good.verify(&SearchLimits::default()).is_ok());
        let mut bad = chain;
        bad.min_discrepancy = 2.0;
        let bad = Certificate::Chain { matrix: f.clone(), epsilon: 1.0, strict: false, chain: bad };
        assert!(bad.verify(&SearchLimits::default()).is_err());

        let mut p = stability_profile(&f, 2, SearchMode::Exact, &SearchLimits::default(), 0).unwrap();
        let ok = Certificate::Profile { matrix: f.clone(), profile: p.clone() };
        assert!(ok.verify(&SearchLimits::default()).is_ok());
        p.entries[1].epsilon_k = 0.5;
        let tampered = Certificate::Profile { matrix: f, profile: p };
        assert!(tampered.verify(&SearchLimits::default()).is_err());
    }

    #[test]
    fn embedding_certificate() {
        let m = MetricTable::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let pts = crate::value_space::embed_finite_metric(&m, 0).unwrap();
        let c = Certificate::Embedding { metric: m.clone(), base: 0, points: pts };
        assert!(c.verify(&SearchLimits::default()).is_ok());
        let off = Certificate::Embedding { metric: m, base: 0, points: vec![ValuePoint::Vector(vec![0.0, 0.0]); 2] };
        assert!(off.verify(&SearchLimits::default()).is_err());
    }

    #[test]
    fn report_round_trip() {
        let r = Report::new("ramsey", serde_json::json!({"s": 3}), Value::Null, vec![Certificate::Ramsey {
            certificate: verify_ramsey(3).unwrap(),
        }]);
        let back = Report::from_json_str(&r.to_json_string().unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(verify_report(&back, &SearchLimits::default()).iter().all(|c| c.ok));
    }
}
