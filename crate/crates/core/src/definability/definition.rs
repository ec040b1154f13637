use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::WeightedBipartiteStructure;
use crate::value_space::{sup_dist, ValuePoint, ValueSpace, TOL};

use super::witness::{find_witness_rows, InstabilityEvidence, TypeFunction, WitnessOutcome, WitnessParams, WitnessSet};

/// A single-coordinate glued function
/// `h(t) = offset + max_q (v(q) - offset) * max(0, 1 - |t - q|_inf / delta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlueCore {
    pub anchors: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// Index of the input point each anchor value was taken from.
    pub anchor_points: Vec<usize>,
    pub offset: f64,
    pub delta: f64,
    /// `sup f - inf f`.
    pub spread: f64,
    pub lipschitz: f64,
    pub certified_error: f64,
}

impl GlueCore {
    pub fn eval(&self, t: &[f64]) -> f64 {
        let bump = self
            .anchors
            .iter()
            .zip(&self.values)
            .map(|(q, v)| (v - self.offset) * (1.0 - sup_dist(t, q) / self.delta).max(0.0))
            .fold(0.0, f64::max);
        // offset + (v - offset) can overshoot v by an ulp
        let top = self.values.iter().copied().fold(self.offset, f64::max);
        (self.offset + bump).min(top)
    }
}

/// Glues values `f_values[i]` at points `g_values[i]` into a function of the
/// points. Requires that points closer than `delta` have values closer than
/// `epsilon`; the result is then within `epsilon` of every value, is
/// `spread / delta`-Lipschitz and takes values in `[inf f, sup f]`. All three
/// properties are checked before returning.
pub fn lipschitz_glue(g_values: &[Vec<f64>], f_values: &[f64], delta: f64, epsilon: f64) -> Result<GlueCore> {
    if g_values.len() != f_values.len() {
        return Err(Error::ShapeMismatch(format!("{} points but {} values", g_values.len(), f_values.len())));
    }
    if g_values.is_empty() {
        return Err(Error::InvalidParameter("nothing to glue".into()));
    }
    if !(delta > 0.0) || !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("need delta > 0 and epsilon > 0, got {delta} and {epsilon}")));
    }
    let dim = g_values[0].len();
    if let Some(bad) = g_values.iter().find(|g| g.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
    }
    let n = g_values.len();
    for i in 0..n {
        for j in i + 1..n {
            if sup_dist(&g_values[i], &g_values[j]) < delta && (f_values[i] - f_values[j]).abs() >= epsilon {
                return Err(Error::GlueHypothesis(i, j));
            }
        }
    }
    let lo = f_values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = f_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut anchors, mut values, mut anchor_points) = (Vec::<Vec<f64>>::new(), Vec::new(), Vec::new());
    for (i, g) in g_values.iter().enumerate() {
        if !anchors.contains(g) {
            anchors.push(g.clone());
            values.push(f_values[i]);
            anchor_points.push(i);
        }
    }
    let spread = hi - lo;
    let mut core = GlueCore {
        anchors,
        values,
        anchor_points,
        offset: lo,
        delta,
        spread,
        lipschitz: spread / delta,
        certified_error: 0.0,
    };

    let err = g_values
        .iter()
        .zip(f_values)
        .map(|(g, v)| (core.eval(g) - v).abs())
        .fold(0.0, f64::max);
    if err > epsilon {
        return Err(Error::Uncertified(format!("glued error {err} exceeds {epsilon}")));
    }
    let at: Vec<f64> = core.anchors.iter().map(|q| core.eval(q)).collect();
    for i in 0..at.len() {
        if at[i] < lo - TOL || at[i] > hi + TOL {
            return Err(Error::Uncertified(format!("glued value {} leaves [{lo}, {hi}]", at[i])));
        }
        for j in i + 1..at.len() {
            let d = sup_dist(&core.anchors[i], &core.anchors[j]);
            if (at[i] - at[j]).abs() > core.lipschitz * d + TOL {
                return Err(Error::Uncertified(format!("Lipschitz bound fails between anchors {i} and {j}")));
            }
        }
    }
    core.certified_error = err;
    Ok(core)
}

/// A definition `psi(b) = h(g(b))` with `g(b) = (f(a, b))_{a in A}`, glued
/// separately for each value coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluedDefinition {
    pub rows: Vec<usize>,
    pub row_labels: Vec<String>,
    /// Dimension of vector values, or `None` for reals.
    pub dim: Option<usize>,
    pub coords: Vec<GlueCore>,
    pub witness: WitnessSet,
    /// Guaranteed bound `2 epsilon + gamma`.
    pub bound: f64,
    pub lipschitz: f64,
    pub certified_error: f64,
}

/// `psi(b) = median of f(a_n, b)` over a multiset of rows of odd size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianDefinition {
    pub rows: Vec<usize>,
    pub row_labels: Vec<String>,
    pub epsilon: f64,
    pub certified_error: f64,
    /// Whether the rows came from the exhaustive search or the greedy phase.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Definition {
    Glue(GluedDefinition),
    Median(MedianDefinition),
}

impl Definition {
    pub fn rows(&self) -> &[usize] {
        match self {
            Definition::Glue(g) => &g.rows,
            Definition::Median(m) => &m.rows,
        }
    }

    pub fn certified_error(&self) -> f64 {
        match self {
            Definition::Glue(g) => g.certified_error,
            Definition::Median(m) => m.certified_error,
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    Glue,
    Median { epsilon: f64, n_max: usize },
}

impl Strategy {
    pub fn median(epsilon: f64) -> Self {
        Strategy::Median { epsilon, n_max: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DefineOutcome {
    Defined(Definition),
    Unstable(InstabilityEvidence),
}

fn flatten(column: &[ValuePoint]) -> Result<Vec<f64>> {
    let mut t = Vec::new();
    for v in column {
        match v {
            ValuePoint::Real(x) => t.push(*x),
            ValuePoint::Vector(c) => t.extend_from_slice(c),
            ValuePoint::Finite { .. } => return Err(Error::KindMismatch("definitions need real or vector values".into())),
        }
    }
    Ok(t)
}

fn coord(v: &ValuePoint, k: usize) -> f64 {
    match v {
        ValuePoint::Real(x) => *x,
        ValuePoint::Vector(c) => c[k],
        ValuePoint::Finite { index } => *index as f64,
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

/// Evaluates a definition at the column data `(f(a, b))_{a in A}`, one value
/// per definition row, for a column `b` that may come from an extension.
pub fn evaluate_definition(def: &Definition, column: &[ValuePoint]) -> Result<ValuePoint> {
    let rows = def.rows();
    if column.len() != rows.len() {
        return Err(Error::DimensionMismatch { expected: rows.len(), got: column.len() });
    }
    match def {
        Definition::Glue(g) => {
            if let Some(d) = g.dim {
                if let Some(bad) = column.iter().find(|v| v.coords().map(<[f64]>::len) != Some(d)) {
                    return Err(Error::KindMismatch(format!("expected {d}-vectors, got {bad}")));
                }
            } else if let Some(bad) = column.iter().find(|v| v.as_real().is_none()) {
                return Err(Error::KindMismatch(format!("expected reals, got {bad}")));
            }
            let t = flatten(column)?;
            let out: Vec<f64> = g.coords.iter().map(|c| c.eval(&t)).collect();
            Ok(match g.dim {
                None => ValuePoint::Real(out[0]),
                Some(_) => ValuePoint::Vector(out),
            })
        }
        Definition::Median(_) => {
            let xs = column
                .iter()
                .map(|v| v.as_real().ok_or_else(|| Error::KindMismatch(format!("median needs reals, got {v}"))))
                .collect::<Result<Vec<_>>>()?;
            if xs.is_empty() {
                return Err(Error::InvalidParameter("empty median".into()));
            }
            Ok(ValuePoint::Real(median(xs)))
        }
    }
}

/// Evaluates the definition on every column of `f`.
pub fn definition_values(def: &Definition, f: &WeightedBipartiteStructure) -> Result<Vec<ValuePoint>> {
    (0..f.n_cols())
        .map(|b| {
            let col: Vec<ValuePoint> = def.rows().iter().map(|&a| f.get(a, b).clone()).collect();
            evaluate_definition(def, &col)
        })
        .collect()
}

/// Builds a definition of `p` over `f` and certifies its error by a full
/// column scan.
pub fn build_definition(
    f: &WeightedBipartiteStructure,
    p: &TypeFunction,
    params: WitnessParams,
    strategy: Strategy,
) -> Result<DefineOutcome> {
    match strategy {
        Strategy::Glue => match find_witness_rows(f, p, params)? {
            WitnessOutcome::Instability(ev) => Ok(DefineOutcome::Unstable(ev)),
            WitnessOutcome::Witness(w) => glue_definition(f, p, w).map(|d| DefineOutcome::Defined(Definition::Glue(d))),
        },
        Strategy::Median { epsilon, n_max } => {
            median_definition(f, p, epsilon, n_max).map(|d| DefineOutcome::Defined(Definition::Median(d)))
        }
    }
}

fn glue_definition(f: &WeightedBipartiteStructure, p: &TypeFunction, w: WitnessSet) -> Result<GluedDefinition> {
    let dim = match f.space() {
        ValueSpace::Real => None,
        ValueSpace::SupVector { dim } => Some(*dim),
        ValueSpace::FiniteMetric { .. } => {
            return Err(Error::KindMismatch("gluing needs real or vector values; embed the metric first".into()))
        }
    };
    let bound = w.params.bound();
    let gs = (0..f.n_cols())
        .map(|b| flatten(&w.rows.iter().map(|&a| f.get(a, b).clone()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let coords = (0..dim.unwrap_or(1))
        .map(|k| {
            let target: Vec<f64> = p.values().iter().map(|v| coord(v, k)).collect();
            lipschitz_glue(&gs, &target, w.params.delta, bound)
        })
        .collect::<Result<Vec<_>>>()?;
    let lipschitz = coords.iter().map(|c| c.lipschitz).fold(0.0, f64::max);
    let mut def = GluedDefinition {
        row_labels: w.rows.iter().map(|&a| f.row_labels()[a].clone()).collect(),
        rows: w.rows.clone(),
        dim,
        coords,
        witness: w,
        bound,
        lipschitz,
        certified_error: 0.0,
    };
    let wrapped = Definition::Glue(def.clone());
    let vals = definition_values(&wrapped, f)?;
    let err = vals.iter().zip(p.values()).map(|(a, b)| f.dist(a, b)).fold(0.0, f64::max);
    if err > bound {
        return Err(Error::Uncertified(format!("definition error {err} exceeds {bound}")));
    }
    def.certified_error = err;
    Ok(def)
}

fn median_error(f: &WeightedBipartiteStructure, p: &[f64], rows: &[usize], scratch: &mut Vec<f64>) -> f64 {
    let mut err: f64 = 0.0;
    for (b, &pb) in p.iter().enumerate() {
        scratch.clear();
        scratch.extend(rows.iter().map(|&a| f.get(a, b).as_real().unwrap_or(f64::NAN)));
        scratch.sort_by(f64::total_cmp);
        err = err.max((scratch[scratch.len() / 2] - pb).abs());
    }
    err
}

/// Upper limit on multisets examined by the exhaustive phase.
const MEDIAN_EXHAUSTIVE_BUDGET: u64 = 2_000_000;

fn median_definition(f: &WeightedBipartiteStructure, p: &TypeFunction, epsilon: f64, n_max: usize) -> Result<MedianDefinition> {
    if *f.space() != ValueSpace::Real {
        return Err(Error::KindMismatch("median definitions need real values".into()));
    }
    if !(epsilon >= 0.0) || n_max == 0 {
        return Err(Error::InvalidParameter(format!("need epsilon >= 0 and n_max >= 1, got {epsilon} and {n_max}")));
    }
    let pv = p
        .values()
        .iter()
        .map(|v| v.as_real().ok_or_else(|| Error::KindMismatch(format!("type value {v} is not real"))))
        .collect::<Result<Vec<_>>>()?;
    let m = f.n_rows();
    let mut scratch = Vec::new();
    let done = |rows: Vec<usize>, err: f64, exhaustive: bool| MedianDefinition {
        row_labels: rows.iter().map(|&a| f.row_labels()[a].clone()).collect(),
        rows,
        epsilon,
        certified_error: err,
        exhaustive,
    };

    let mut budget = MEDIAN_EXHAUSTIVE_BUDGET;
    let mut size = 1;
    while size <= n_max && budget > 0 {
        // nondecreasing index sequences enumerate multisets of this size
        let mut idx = vec![0usize; size];
        loop {
            if budget == 0 {
                break;
            }
            budget -= 1;
            let err = median_error(f, &pv, &idx, &mut scratch);
            if err <= epsilon {
                return Ok(done(idx, err, true));
            }
            let Some(k) = (0..size).rev().find(|&k| idx[k] + 1 < m) else { break };
            idx[k] += 1;
            let v = idx[k];
            for slot in &mut idx[k + 1..] {
                *slot = v;
            }
        }
        size += 2;
    }

    // greedy: best single row, then the best pair of rows to add each round
    let mut rows = vec![(0..m)
        .min_by(|&a, &b| median_error(f, &pv, &[a], &mut scratch).total_cmp(&median_error(f, &pv, &[b], &mut scratch)))
        .expect("tables have at least one row")];
    let mut err = median_error(f, &pv, &rows, &mut scratch);
    let greedy_max = (2 * m + 1).max(n_max);
    while err > epsilon && rows.len() + 2 <= greedy_max {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..m {
            for b in a..m {
                let mut cand = rows.clone();
                cand.extend([a, b]);
                let e = median_error(f, &pv, &cand, &mut scratch);
                if best.is_none_or(|(be, _, _)| e < be) {
                    best = Some((e, a, b));
                }
            }
        }
        let (e, a, b) = best.expect("at least one candidate pair");
        if e >= err {
            break;
        }
        rows.extend([a, b]);
        err = e;
    }
    if err <= epsilon {
        rows.sort_unstable();
        let err = median_error(f, &pv, &rows, &mut scratch);
        return Ok(done(rows, err, false));
    }
    Err(Error::Uncertified(format!(
        "no median of at most {n_max} rows (or greedy extension) is within {epsilon}; best error {err}"
    )))
}
