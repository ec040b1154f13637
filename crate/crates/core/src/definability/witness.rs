use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainKind, WitnessChain};
use crate::error::{Error, Result};
use crate::matrix::{parse_cell, WeightedBipartiteStructure};
use crate::value_space::ValuePoint;

/// Supplies rows approximating a type on finite sets of columns.
pub trait ApproxOracle: Send + Sync + fmt::Debug {
    /// A row `a` with `d(f(a, b), p(b)) < zeta` for every `b` in `support`,
    /// or `None` when there is none.
    fn approximate(&self, f: &WeightedBipartiteStructure, p: &[ValuePoint], support: &[usize], zeta: f64) -> Option<usize>;
}

/// Scans the table and returns the first row that works.
#[derive(Debug, Clone, Copy, Default)]
pub struct TableOracle;

impl ApproxOracle for TableOracle {
    fn approximate(&self, f: &WeightedBipartiteStructure, p: &[ValuePoint], support: &[usize], zeta: f64) -> Option<usize> {
        (0..f.n_rows()).find(|&a| support.iter().all(|&b| f.dist(f.get(a, b), &p[b]) < zeta))
    }
}

#[derive(Debug, Clone)]
pub enum TypeFlavor {
    Realized(usize),
    External(Arc<dyn ApproxOracle>),
}

/// A function `p: W -> values`, either a row of the table or supplied from
/// outside together with an approximation oracle.
#[derive(Debug, Clone)]
pub struct TypeFunction {
    values: Vec<ValuePoint>,
    flavor: TypeFlavor,
}

impl TypeFunction {
    pub fn realized(f: &WeightedBipartiteStructure, row: usize) -> Result<Self> {
        if row >= f.n_rows() {
            return Err(Error::IndexOutOfRange { index: row, size: f.n_rows() });
        }
        Ok(TypeFunction { values: f.row(row).to_vec(), flavor: TypeFlavor::Realized(row) })
    }

    pub fn external(f: &WeightedBipartiteStructure, values: Vec<ValuePoint>, oracle: Arc<dyn ApproxOracle>) -> Result<Self> {
        if values.len() != f.n_cols() {
            return Err(Error::ShapeMismatch(format!("type has {} values for {} columns", values.len(), f.n_cols())));
        }
        for v in &values {
            f.space().check(v)?;
        }
        Ok(TypeFunction { values, flavor: TypeFlavor::External(oracle) })
    }

    /// An external type approximated by scanning the table.
    pub fn from_values(f: &WeightedBipartiteStructure, values: Vec<ValuePoint>) -> Result<Self> {
        Self::external(f, values, Arc::new(TableOracle))
    }

    /// Reads `label,value` lines keyed by the column labels of `f`. A header
    /// line is skipped when its value field is not a number.
    pub fn from_csv_str(f: &WeightedBipartiteStructure, text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
        let mut values: Vec<Option<ValuePoint>> = vec![None; f.n_cols()];
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = rec.position().map_or(i as u64 + 1, |p| p.line());
            if rec.len() != 2 {
                return Err(Error::Input(format!("line {line}: expected `label,value`, found {} fields", rec.len())));
            }
            let (label, cell) = (rec[0].trim(), rec[1].trim());
            let v = match parse_cell(cell) {
                Ok(v) => v,
                Err(_) if i == 0 => continue,
                Err(e) => return Err(Error::Input(format!("line {line}, column 2: {e}"))),
            };
            let b = f.col_index(label).map_err(|e| Error::Input(format!("line {line}: {e}")))?;
            if values[b].replace(v).is_some() {
                return Err(Error::Input(format!("line {line}: `{label}` is given twice")));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(b, v)| v.ok_or_else(|| Error::Input(format!("no value for column `{}`", f.col_labels()[b]))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(f, values)
    }

    pub fn from_csv_path(f: &WeightedBipartiteStructure, path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(f, &std::fs::read_to_string(path)?)
    }

    pub fn values(&self) -> &[ValuePoint] {
        &self.values
    }

    pub fn flavor(&self) -> &TypeFlavor {
        &self.flavor
    }

    fn approximate(&self, f: &WeightedBipartiteStructure, support: &[usize], zeta: f64) -> Option<usize> {
        match &self.flavor {
            TypeFlavor::Realized(a) => Some(*a),
            TypeFlavor::External(o) => o.approximate(f, &self.values, support, zeta),
        }
    }
}

/// Parameters of a witness-row construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessParams {
    pub epsilon: f64,
    pub gamma: f64,
    pub delta: f64,
    pub zeta: f64,
}

impl WitnessParams {
    /// `zeta` defaults to `(gamma - delta) / 2`.
    pub fn new(epsilon: f64, gamma: f64, delta: f64, zeta: Option<f64>) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be nonnegative")));
        }
        if !(gamma > delta && delta > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("need gamma > delta > 0, got gamma = {gamma}, delta = {delta}")));
        }
        let zeta = zeta.unwrap_or((gamma - delta) / 2.0);
        if !(zeta > 0.0 && zeta <= (gamma - delta) / 2.0) {
            return Err(Error::InvalidParameter(format!("zeta = {zeta} must lie in (0, (gamma - delta) / 2]")));
        }
        Ok(WitnessParams { epsilon, gamma, delta, zeta })
    }

    /// The separation `2 epsilon + gamma` the witness rows guarantee.
    pub fn bound(&self) -> f64 {
        2.0 * self.epsilon + self.gamma
    }
}

/// Rows `A` such that columns agreeing within `delta` on every row of `A`
/// have type values closer than `2 epsilon + gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSet {
    pub rows: Vec<usize>,
    pub params: WitnessParams,
    pub verified: bool,
    /// Violating column pairs met during the construction, in order.
    pub history: Vec<(usize, usize)>,
}

/// A chain with all discrepancies above `epsilon`, extracted from a
/// construction run that needed at least two rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstabilityEvidence {
    pub chain: WitnessChain,
    pub epsilon: f64,
    /// Which column sequence the chain uses: `b` or `c`.
    pub side: char,
    /// Rows and column pairs of the run.
    pub run_rows: Vec<usize>,
    pub run_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WitnessOutcome {
    Witness(WitnessSet),
    Instability(InstabilityEvidence),
}

/// Scans every column pair and returns the first pair that breaks the
/// witness property for `rows`, if any.
pub fn witness_violation(
    f: &WeightedBipartiteStructure,
    p: &[ValuePoint],
    rows: &[usize],
    delta: f64,
    bound: f64,
) -> Option<(usize, usize)> {
    let n = f.n_cols();
    for b in 0..n {
        for c in b + 1..n {
            if f.dist(&p[b], &p[c]) >= bound && rows.iter().all(|&a| f.dist(f.get(a, b), f.get(a, c)) < delta) {
                return Some((b, c));
            }
        }
    }
    None
}

/// Runs the witness-row construction. Starting from no rows, while some
/// column pair `(b, c)` agrees within `delta` on every chosen row but has
/// `d(p(b), p(c)) >= 2 epsilon + gamma`, a new row `zeta`-close to `p` on all
/// earlier pairs is requested and the pair recorded.
///
/// A fresh row always separates every earlier pair, so the run stops after
/// at most `|W|^2` rounds. When it needed two rounds or more, any two rounds
/// `i < j` already give a 2-chain with discrepancy above `epsilon`, and the
/// largest monochromatic set of the pair 2-colouring is returned as the
/// instability evidence instead.
pub fn find_witness_rows(f: &WeightedBipartiteStructure, p: &TypeFunction, params: WitnessParams) -> Result<WitnessOutcome> {
    if p.values.len() != f.n_cols() {
        return Err(Error::ShapeMismatch(format!("type has {} values for {} columns", p.values.len(), f.n_cols())));
    }
    let pv = &p.values;
    let bound = params.bound();
    let n = f.n_cols();
    let mut rows: Vec<usize> = Vec::new();
    let mut history: Vec<(usize, usize)> = Vec::new();

    if witness_violation(f, pv, &rows, params.delta, bound).is_some() {
        let cap = n * n + 1;
        let mut support: Vec<usize> = Vec::new();
        loop {
            if history.len() >= cap {
                break;
            }
            let a = p
                .approximate(f, &support, params.zeta)
                .ok_or_else(|| Error::NotFinitelySatisfiable { zeta: params.zeta, points: support.len() })?;
            rows.push(a);
            match witness_violation(f, pv, &rows, params.delta, bound) {
                None => break,
                Some((b, c)) => {
                    history.push((b, c));
                    for x in [b, c] {
                        if !support.contains(&x) {
                            support.push(x);
                        }
                    }
                }
            }
        }
    }

    if history.len() >= 2 {
        return extract_instability(f, pv, &rows, &history, params).map(WitnessOutcome::Instability);
    }
    let verified = witness_violation(f, pv, &rows, params.delta, bound).is_none();
    if !verified {
        return Err(Error::Uncertified("witness rows fail the postcondition scan".into()));
    }
    Ok(WitnessOutcome::Witness(WitnessSet { rows, params, verified, history }))
}

fn largest_clique(adj: &[Vec<bool>], budget: &mut u64) -> Vec<usize> {
    fn go(adj: &[Vec<bool>], cur: &mut Vec<usize>, cand: Vec<usize>, best: &mut Vec<usize>, budget: &mut u64) {
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        if *budget == 0 {
            return;
        }
        *budget -= 1;
        for (k, &v) in cand.iter().enumerate() {
            if cur.len() + cand.len() - k <= best.len() {
                return;
            }
            let next = cand[k + 1..].iter().copied().filter(|&w| adj[v][w]).collect();
            cur.push(v);
            go(adj, cur, next, best, budget);
            cur.pop();
        }
    }
    let mut best = Vec::new();
    go(adj, &mut Vec::new(), (0..adj.len()).collect(), &mut best, budget);
    best
}

fn extract_instability(
    f: &WeightedBipartiteStructure,
    p: &[ValuePoint],
    rows: &[usize],
    history: &[(usize, usize)],
    params: WitnessParams,
) -> Result<InstabilityEvidence> {
    let m = history.len();
    let level = params.epsilon + params.zeta;
    // S_b and S_c: i < j coloured by how far row a_i is from p at b_j, c_j
    let colour = |side: usize| -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let (x, xi) = if side == 0 { (history[j].0, history[i].0) } else { (history[j].1, history[i].1) };
                let hit = f.dist(f.get(rows[i], x), &p[xi]) >= level;
                adj[i][j] = hit;
                adj[j][i] = hit;
            }
        }
        adj
    };
    let mut best: Option<(char, Vec<usize>)> = None;
    for (side, name) in [(0, 'b'), (1, 'c')] {
        let mut budget = 1_000_000;
        let set = largest_clique(&colour(side), &mut budget);
        if best.as_ref().is_none_or(|(_, s)| set.len() > s.len()) {
            best = Some((name, set));
        }
    }
    let (side, set) = best.expect("two colour classes were searched");
    if set.len() < 2 {
        return Err(Error::Uncertified("a pair of rounds lies in neither colour class".into()));
    }
    let chain_rows = set.iter().map(|&i| rows[i]).collect();
    let chain_cols = set.iter().map(|&i| if side == 'b' { history[i].0 } else { history[i].1 }).collect();
    let chain = WitnessChain::from_indices(f, chain_rows, chain_cols, ChainKind::Plain)?;
    chain.verify(f, params.epsilon, true).map_err(Error::Uncertified)?;
    Ok(InstabilityEvidence {
        chain,
        epsilon: params.epsilon,
        side,
        run_rows: rows.to_vec(),
        run_pairs: history.to_vec(),
    })
}
