//! Batch command-line front end.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::chain::{detect_chain, ChainMode, SearchLimits, SearchMode};
use crate::definability::{build_definition, DefineOutcome, Definition, Strategy, TypeFunction, WitnessParams};
use crate::error::{Error, Result};
use crate::formula::{diam_structure, evaluate_formula, materialize_matrix, parse_formula, tuple_spec, FiniteStructure};
use crate::matrix::WeightedBipartiteStructure;
use crate::profile::stability_profile;
use crate::ramsey::verify_ramsey;
use crate::report::{verify_report, Certificate, Report};
use crate::seminorm::{seminorm_audit, AuditOptions};
use crate::typespace::{
    cb_analyze, cover_rows, define_over_m, extension_audit, fs_level, symmetry_audit, CoverMethod, TopometricSpace,
    TwoLayerFixture,
};
use crate::value_space::{embed_finite_metric, MetricTable};

#[derive(Debug, Clone, Parser)]
#[command(name = "epslens", version, about = "Certified stability analysis of weighted bipartite structures")]
pub struct RunConfig {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomized orderings.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Search for a chain of length k+1 at level epsilon.
    Detect(DetectArgs),
    /// Compute eps_1..eps_kmax.
    Profile(ProfileArgs),
    /// Build a certified definition of a type.
    Define(DefineArgs),
    /// Check the seminorm laws on a table (and a second one for subadditivity).
    AuditSeminorm(SeminormArgs),
    /// Compare psi_p(q) with psi_q(p) on a two-layer fixture.
    Symmetry(SymmetryArgs),
    /// Finite-satisfiability level of rows of a two-layer fixture.
    FsLevel(FsLevelArgs),
    /// Measure a definition over M against a row of N.
    Extension(ExtensionArgs),
    /// Cover the rows by parts of diameter at most 2 epsilon.
    Cover(CoverArgs),
    /// Cantor-Bendixson analysis of a finite topometric space.
    Cb(CbArgs),
    /// Evaluate a formula on a finite structure.
    Eval(EvalArgs),
    /// Embed a finite metric isometrically into a sup-norm space.
    Embed(EmbedArgs),
    /// Re-check every certificate in a report.
    Verify(VerifyArgs),
    /// Verify a small diagonal Ramsey number.
    Ramsey(RamseyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Plain,
    Biconstant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Glue,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoverArg {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "plain")]
    pub mode: ModeArg,
    /// Tolerance around the two constants in bi-constant mode.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long)]
    pub heuristic: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub kmax: usize,
    #[arg(long)]
    pub heuristic: bool,
    /// Also write the profile as CSV (k,epsilon_k) for plotting.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct WitnessArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.3)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long, value_enum, default_value = "glue")]
    pub strategy: StrategyArg,
    /// Largest median size tried exhaustively.
    #[arg(long, default_value_t = 7)]
    pub n_max: usize,
}

impl WitnessArgs {
    fn params(&self) -> Result<WitnessParams> {
        WitnessParams::new(self.epsilon, self.gamma, self.delta, self.zeta)
    }

    fn strategy(&self) -> Strategy {
        match self.strategy {
            StrategyArg::Glue => Strategy::Glue,
            StrategyArg::Median => Strategy::Median { epsilon: self.epsilon, n_max: self.n_max },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DefineArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Label of the row realizing the type.
    #[arg(long, conflicts_with = "type_file", required_unless_present = "type_file")]
    pub row: Option<String>,
    /// CSV of `column,value` lines giving an external type.
    #[arg(long = "type")]
    pub type_file: Option<PathBuf>,
    #[command(flatten)]
    pub witness: WitnessArgs,
    /// Write the definition alone as JSON.
    #[arg(long)]
    pub definition_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SeminormArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub other: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 2.0, -1.0])]
    pub scalars: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0])]
    pub shifts: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SymmetryArgs {
    #[arg(long)]
    pub fixture: PathBuf,
    #[arg(long)]
    pub p_row: String,
    #[arg(long)]
    pub q_col: String,
    #[command(flatten)]
    pub witness: WitnessArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FsLevelArgs {
    #[arg(long)]
    pub fixture: PathBuf,
    /// Row labels; all rows when omitted.
    #[arg(long)]
    pub row: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ExtensionArgs {
    #[arg(long)]
    pub fixture: PathBuf,
    /// Row whose type is defined over M.
    #[arg(long)]
    pub p_row: String,
    /// Row of N the definition is measured against.
    #[arg(long)]
    pub q_row: String,
    #[command(flatten)]
    pub witness: WitnessArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CoverArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: CoverArg,
}

#[derive(Debug, Clone, Args)]
pub struct CbArgs {
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    /// Accept a space with no closed sets given and treat it as discrete.
    #[arg(long)]
    pub force_discrete: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub structure: PathBuf,
    #[arg(long)]
    pub formula: String,
    /// Variable assignment `var=element`, repeatable.
    #[arg(long = "assign")]
    pub assign: Vec<String>,
    /// Row variables `var` or `var:sort` for a materialized matrix.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<String>,
    /// Column variables for a materialized matrix.
    #[arg(long, value_delimiter = ',')]
    pub y: Vec<String>,
    /// Write the materialized matrix as CSV.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    /// Report the sup over all assignments of the pairwise distance.
    #[arg(long)]
    pub diam: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub metric: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub base: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RamseyArgs {
    #[arg(long, default_value_t = 3)]
    pub s: usize,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn at_least_one(name: &str, v: usize) -> Result<()> {
    if v >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be at least 1")))
    }
}

/// Checks parameter domains before any input is read.
pub fn validate(cfg: &RunConfig) -> Result<()> {
    match &cfg.command {
        Command::Detect(a) => {
            positive("epsilon", a.epsilon)?;
            at_least_one("k", a.k)
        }
        Command::Profile(a) => at_least_one("kmax", a.kmax),
        Command::Define(a) => a.witness.params().map(drop),
        Command::AuditSeminorm(a) => at_least_one("k", a.k),
        Command::Symmetry(a) => a.witness.params().map(drop),
        Command::Extension(a) => a.witness.params().map(drop),
        Command::Cover(a) => positive("epsilon", a.epsilon),
        Command::Cb(a) => positive("epsilon", a.epsilon),
        Command::FsLevel(_) | Command::Eval(_) | Command::Embed(_) | Command::Verify(_) | Command::Ramsey(_) => Ok(()),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn load_matrix(p: &Path) -> Result<WeightedBipartiteStructure> {
    WeightedBipartiteStructure::from_csv_path(p).map_err(|e| in_file(p, e))
}

fn load_fixture(p: &Path) -> Result<TwoLayerFixture> {
    TwoLayerFixture::from_json_path(p).map_err(|e| in_file(p, e))
}

fn in_file(p: &Path, e: Error) -> Error {
    match e {
        Error::Input(m) => Error::Input(format!("{}: {m}", p.display())),
        Error::Syntax { pos, msg } => Error::Input(format!("{}: position {pos}: {msg}", p.display())),
        other => other,
    }
}

fn write_text(p: &Path, text: &str) -> Result<()> {
    std::fs::write(p, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", p.display())))
}

fn defined(outcome: DefineOutcome) -> Result<Definition> {
    match outcome {
        DefineOutcome::Defined(d) => Ok(d),
        DefineOutcome::Unstable(ev) => Err(Error::Uncertified(format!(
            "the table is unstable at epsilon = {}: chain on rows {:?}",
            ev.epsilon, ev.chain.rows
        ))),
    }
}

/// Runs one command and returns its report.
pub fn execute_command(cfg: &RunConfig) -> Result<Report> {
    validate(cfg)?;
    let start = Instant::now();
    let limits = SearchLimits::from_env();
    let mut report = match &cfg.command {
        Command::Detect(a) => {
            let f = load_matrix(&a.matrix)?;
            let mode = match a.mode {
                ModeArg::Plain => ChainMode::Plain,
                ModeArg::Biconstant => ChainMode::BiConstant { delta: a.delta },
            };
            let search = if a.heuristic { SearchMode::Heuristic } else { SearchMode::Exact };
            let d = detect_chain(&f, a.epsilon, a.k, mode, search, &limits)?;
            let mut certs = Vec::new();
            match &d.chain {
                Some(c) => certs.push(Certificate::Chain { matrix: f.clone(), epsilon: a.epsilon, strict: false, chain: c.clone() }),
                None if d.exhaustive => certs.push(Certificate::NoChain { matrix: f.clone(), epsilon: a.epsilon, k: a.k, mode }),
                None => {}
            }
            let results = json!({
                "found": d.chain.is_some(),
                "exhaustive": d.exhaustive,
                "epsilon": a.epsilon,
                "k": a.k,
                "chain": d.chain,
            });
            Report::new("detect", json!({"matrix": a.matrix, "epsilon": a.epsilon, "k": a.k, "mode": format!("{:?}", a.mode).to_lowercase(), "delta": a.delta, "heuristic": a.heuristic}), results, certs)
        }
        Command::Profile(a) => {
            let f = load_matrix(&a.matrix)?;
            let search = if a.heuristic { SearchMode::Heuristic } else { SearchMode::Exact };
            let p = stability_profile(&f, a.kmax, search, &limits, cfg.seed)?;
            if let Some(path) = &a.csv {
                write_text(path, &p.to_csv_string())?;
            }
            let results = to_value(&p);
            Report::new(
                "profile",
                json!({"matrix": a.matrix, "kmax": a.kmax, "heuristic": a.heuristic, "seed": cfg.seed}),
                results,
                vec![Certificate::Profile { matrix: f, profile: p }],
            )
        }
        Command::Define(a) => {
            let f = load_matrix(&a.matrix)?;
            let p = match (&a.row, &a.type_file) {
                (Some(label), _) => TypeFunction::realized(&f, f.row_index(label)?)?,
                (None, Some(path)) => TypeFunction::from_csv_path(&f, path).map_err(|e| in_file(path, e))?,
                (None, None) => return Err(Error::InvalidParameter("give --row or --type".into())),
            };
            let outcome = build_definition(&f, &p, a.witness.params()?, a.witness.strategy())?;
            let type_values = p.values().to_vec();
            let mut certs = Vec::new();
            match &outcome {
                DefineOutcome::Defined(d) => {
                    if let Definition::Glue(g) = d {
                        certs.push(Certificate::Witness { matrix: f.clone(), type_values: type_values.clone(), witness: g.witness.clone() });
                    }
                    certs.push(Certificate::Definition { matrix: f.clone(), type_values, definition: d.clone() });
                    if let Some(path) = &a.definition_out {
                        write_text(path, &d.to_json_string()?)?;
                    }
                }
                DefineOutcome::Unstable(ev) => certs.push(Certificate::Instability { matrix: f.clone(), evidence: ev.clone() }),
            }
            let results = match &outcome {
                DefineOutcome::Defined(d) => json!({"outcome": "defined", "certified_error": d.certified_error(), "definition": d}),
                DefineOutcome::Unstable(ev) => json!({"outcome": "unstable", "evidence": ev}),
            };
            let w = &a.witness;
            Report::new(
                "define",
                json!({"matrix": a.matrix, "row": a.row, "type": a.type_file, "epsilon": w.epsilon, "gamma": w.gamma, "delta": w.delta, "zeta": w.zeta, "strategy": format!("{:?}", w.strategy).to_lowercase(), "n_max": w.n_max}),
                results,
                certs,
            )
        }
        Command::AuditSeminorm(a) => {
            let f = load_matrix(&a.matrix)?;
            let g = a.other.as_deref().map(load_matrix).transpose()?;
            let options = AuditOptions { k: a.k, scalars: a.scalars.clone(), shifts: a.shifts.clone(), ramsey_node_budget: None };
            let r = seminorm_audit(&f, g.as_ref(), &options, &limits)?;
            let results = json!({"all_pass": r.all_pass(), "report": r});
            Report::new(
                "audit-seminorm",
                json!({"matrix": a.matrix, "other": a.other, "k": a.k, "scalars": a.scalars, "shifts": a.shifts}),
                results,
                vec![Certificate::Seminorm { matrix: f, other: g, options, report: r }],
            )
        }
        Command::Symmetry(a) => {
            let fx = load_fixture(&a.fixture)?;
            let p_row = fx.table.row_index(&a.p_row)?;
            let q_col = fx.table.col_index(&a.q_col)?;
            let params = a.witness.params()?;
            let def_p = defined(define_over_m(&fx, p_row, true, params, a.witness.strategy())?)?;
            let def_q = defined(define_over_m(&fx, q_col, false, params, a.witness.strategy())?)?;
            let audit = symmetry_audit(&fx, p_row, &def_p, q_col, &def_q, a.witness.epsilon)?;
            let results = to_value(&audit);
            let w = &a.witness;
            Report::new(
                "symmetry",
                json!({"fixture": a.fixture, "p_row": a.p_row, "q_col": a.q_col, "epsilon": w.epsilon, "gamma": w.gamma, "delta": w.delta, "zeta": w.zeta, "strategy": format!("{:?}", w.strategy).to_lowercase()}),
                results,
                vec![Certificate::Symmetry { fixture: fx, def_p, def_q, audit }],
            )
        }
        Command::FsLevel(a) => {
            let fx = load_fixture(&a.fixture)?;
            let rows: Vec<usize> = if a.row.is_empty() {
                (0..fx.table.n_rows()).collect()
            } else {
                a.row.iter().map(|l| fx.table.row_index(l)).collect::<Result<_>>()?
            };
            let mut levels = Vec::new();
            let mut certs = Vec::new();
            for r in rows {
                let level = fs_level(&fx, r)?;
                levels.push(json!({"row": fx.table.row_labels()[r], "in_m": fx.is_m_row(r), "level": level}));
                certs.push(Certificate::FsLevel { fixture: fx.clone(), row: r, level });
            }
            Report::new("fs-level", json!({"fixture": a.fixture, "rows": a.row}), json!({"levels": levels}), certs)
        }
        Command::Extension(a) => {
            let fx = load_fixture(&a.fixture)?;
            let p_row = fx.table.row_index(&a.p_row)?;
            let q = fx.table.row_index(&a.q_row)?;
            let def = defined(define_over_m(&fx, p_row, true, a.witness.params()?, a.witness.strategy())?)?;
            let delta = def.certified_error();
            let audit = extension_audit(&fx, &def, q, delta, a.witness.epsilon)?;
            let results = to_value(&audit);
            let w = &a.witness;
            Report::new(
                "extension",
                json!({"fixture": a.fixture, "p_row": a.p_row, "q_row": a.q_row, "epsilon": w.epsilon, "gamma": w.gamma, "delta": w.delta, "zeta": w.zeta, "strategy": format!("{:?}", w.strategy).to_lowercase()}),
                results,
                vec![Certificate::Extension { fixture: fx, definition: def, audit, delta, epsilon: w.epsilon }],
            )
        }
        Command::Cover(a) => {
            let f = load_matrix(&a.matrix)?;
            let method = match a.method {
                CoverArg::Exact => CoverMethod::Exact,
                CoverArg::Greedy => CoverMethod::Greedy,
            };
            let c = cover_rows(&f, a.epsilon, method)?;
            let parts: Vec<Vec<&str>> = c.parts.iter().map(|p| p.iter().map(|&r| f.row_labels()[r].as_str()).collect()).collect();
            let results = json!({"count": c.count(), "parts": parts, "diameters": c.diameters});
            Report::new(
                "cover",
                json!({"matrix": a.matrix, "epsilon": a.epsilon, "method": format!("{:?}", a.method).to_lowercase()}),
                results,
                vec![Certificate::Cover { matrix: f, cover: c }],
            )
        }
        Command::Cb(a) => {
            let sp = TopometricSpace::from_json_path(&a.space, a.force_discrete).map_err(|e| in_file(&a.space, e))?;
            let r = cb_analyze(&sp, a.epsilon)?;
            let results = to_value(&r);
            Report::new(
                "cb",
                json!({"space": a.space, "epsilon": a.epsilon, "force_discrete": a.force_discrete}),
                results,
                vec![Certificate::Cb { space: sp.to_json_value(), report: r }],
            )
        }
        Command::Eval(a) => eval_command(a)?,
        Command::Embed(a) => {
            let m = MetricTable::from_csv_path(&a.metric).map_err(|e| in_file(&a.metric, e))?;
            let pts = embed_finite_metric(&m, a.base)?;
            let results = json!({"dimension": m.len(), "points": pts});
            Report::new(
                "embed",
                json!({"metric": a.metric, "base": a.base}),
                results,
                vec![Certificate::Embedding { metric: m, base: a.base, points: pts }],
            )
        }
        Command::Verify(a) => {
            let text = std::fs::read_to_string(&a.report).map_err(|e| Error::Input(format!("cannot read {}: {e}", a.report.display())))?;
            let inner = Report::from_json_str(&text).map_err(|e| in_file(&a.report, e))?;
            let checks = verify_report(&inner, &limits);
            let failures = checks.iter().filter(|c| !c.ok).count();
            let results = json!({"command": inner.command, "checked": checks.len(), "failures": failures, "checks": checks});
            let r = Report::new("verify", json!({"report": a.report}), results, Vec::new());
            if failures > 0 {
                let msg = checks
                    .iter()
                    .filter(|c| !c.ok)
                    .map(|c| format!("certificate {} ({}): {}", c.index, c.kind, c.detail.as_deref().unwrap_or("")))
                    .collect::<Vec<_>>()
                    .join("; ");
                return Err(Error::Uncertified(msg));
            }
            r
        }
        Command::Ramsey(a) => {
            let c = verify_ramsey(a.s)?;
            let results = to_value(&c);
            Report::new("ramsey", json!({"s": a.s}), results, vec![Certificate::Ramsey { certificate: c }])
        }
    };
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

fn eval_command(a: &EvalArgs) -> Result<Report> {
    let st = FiniteStructure::from_json_path(&a.structure).map_err(|e| in_file(&a.structure, e))?;
    let f = parse_formula(&a.formula, st.language())?;
    let structure = st.to_json_value();
    let formula = f.to_string();
    let mut valuation = BTreeMap::new();
    for s in &a.assign {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("assignment `{s}` is not of the form var=element")))?;
        valuation.insert(k.trim().to_string(), v.trim().to_string());
    }
    let mut results = serde_json::Map::new();
    let mut certs = Vec::new();
    results.insert("formula".into(), json!(formula));
    results.insert("envelope".into(), json!(f.envelope.to_string()));
    let materialize = !a.x.is_empty() || !a.y.is_empty();
    if materialize {
        let xs: Vec<&str> = a.x.iter().map(String::as_str).collect();
        let ys: Vec<&str> = a.y.iter().map(String::as_str).collect();
        let x = tuple_spec(&f, &xs)?;
        let y = tuple_spec(&f, &ys)?;
        let m = materialize_matrix(&f, &st, &x, &y)?;
        if let Some(p) = &a.matrix_out {
            write_text(p, &m.to_csv_string())?;
        }
        results.insert("matrix".into(), json!({"rows": m.n_rows(), "cols": m.n_cols(), "diameter": m.diameter()}));
        certs.push(Certificate::Materialized { structure: structure.clone(), formula: formula.clone(), x, y, matrix: m });
    }
    if a.diam {
        let d = diam_structure(&f, &st)?;
        results.insert("diameter".into(), json!(d));
        certs.push(Certificate::Diameter { structure: structure.clone(), formula: formula.clone(), diameter: d });
    }
    if !materialize && !a.diam || !valuation.is_empty() {
        let v = evaluate_formula(&f, &st, &valuation)?;
        results.insert("value".into(), to_value(&v));
        certs.push(Certificate::Evaluation { structure, formula, valuation: valuation.clone(), value: v });
    }
    Ok(Report::new(
        "eval",
        json!({"structure": a.structure, "formula": a.formula, "assign": a.assign, "x": a.x, "y": a.y, "diam": a.diam}),
        Value::Object(results),
        certs,
    ))
}

/// Process exit code for an outcome: 0 success, 2 size-guard refusal,
/// 1 any other error.
pub fn exit_code(r: &Result<Report>) -> i32 {
    match r {
        Ok(_) => 0,
        Err(Error::SizeGuard(_)) => 2,
        Err(_) => 1,
    }
}

/// Parses `args`, runs the command, writes the report and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = execute_command(&cfg);
    match &outcome {
        Ok(report) => {
            let text = match report.to_json_string() {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 1;
                }
            };
            match &cfg.output {
                Some(p) => {
                    if let Err(e) = write_text(p, &text) {
                        eprintln!("error: {e}");
                        return 1;
                    }
                }
                None => {
                    use std::io::Write;
                    let mut out = std::io::stdout().lock();
                    // a closed pipe is not an error of the command
                    let _ = writeln!(out, "{text}");
                }
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    exit_code(&outcome)
}
