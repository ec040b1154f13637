use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::definability::{build_definition, evaluate_definition, DefineOutcome, Definition, Strategy, TypeFunction, WitnessParams};
use crate::error::{Error, Result};
use crate::matrix::WeightedBipartiteStructure;
use crate::value_space::{ValuePoint, TOL};

/// Sup-metric distance between rows `a` and `c` of `f`.
pub fn row_distance(f: &WeightedBipartiteStructure, a: usize, c: usize) -> f64 {
    (0..f.n_cols()).map(|b| f.dist(f.get(a, b), f.get(c, b))).fold(0.0, f64::max)
}

/// A table `N` with marked rows and columns forming the smaller table `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLayerFixture {
    pub table: WeightedBipartiteStructure,
    pub m_rows: Vec<usize>,
    pub m_cols: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TableRef {
    Path(PathBuf),
    Inline(WeightedBipartiteStructure),
}

#[derive(Deserialize)]
struct RawFixture {
    table: TableRef,
    m_rows: Vec<String>,
    m_cols: Vec<String>,
}

impl TwoLayerFixture {
    pub fn new(table: WeightedBipartiteStructure, m_rows: Vec<usize>, m_cols: Vec<usize>) -> Result<Self> {
        if m_rows.is_empty() || m_cols.is_empty() {
            return Err(Error::InvalidParameter("the marked rows and columns must be nonempty".into()));
        }
        for (set, size) in [(&m_rows, table.n_rows()), (&m_cols, table.n_cols())] {
            for (k, &i) in set.iter().enumerate() {
                if i >= size {
                    return Err(Error::IndexOutOfRange { index: i, size });
                }
                if set[..k].contains(&i) {
                    return Err(Error::InvalidParameter(format!("index {i} marked twice")));
                }
            }
        }
        Ok(TwoLayerFixture { table, m_rows, m_cols })
    }

    /// Reads `{"table": <csv path or inline table>, "m_rows": [labels],
    /// "m_cols": [labels]}`. Relative table paths are resolved against
    /// `base`.
    pub fn from_json_str(text: &str, base: Option<&Path>) -> Result<Self> {
        let raw: RawFixture = serde_json::from_str(text)?;
        let table = match raw.table {
            TableRef::Inline(t) => t,
            TableRef::Path(p) => {
                let p = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p,
                };
                WeightedBipartiteStructure::from_csv_path(&p)?
            }
        };
        let rows = raw.m_rows.iter().map(|l| table.row_index(l)).collect::<Result<Vec<_>>>()?;
        let cols = raw.m_cols.iter().map(|l| table.col_index(l)).collect::<Result<Vec<_>>>()?;
        Self::new(table, rows, cols)
    }

    pub fn from_json_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json_str(&std::fs::read_to_string(path)?, path.parent())
    }

    /// The marked table `M`.
    pub fn m_table(&self) -> Result<WeightedBipartiteStructure> {
        self.table.submatrix(&self.m_rows, &self.m_cols)
    }

    pub fn is_m_row(&self, a: usize) -> bool {
        self.m_rows.contains(&a)
    }

    pub fn is_m_col(&self, b: usize) -> bool {
        self.m_cols.contains(&b)
    }
}

/// How well `M` approximates row `c` of `N`: the least sup-distance over all
/// columns of `N` from row `c` to a marked row.
pub fn fs_level(fx: &TwoLayerFixture, c: usize) -> Result<f64> {
    let t = &fx.table;
    if c >= t.n_rows() {
        return Err(Error::IndexOutOfRange { index: c, size: t.n_rows() });
    }
    Ok(fx.m_rows.iter().map(|&a| row_distance(t, a, c)).fold(f64::INFINITY, f64::min))
}

fn definition_rows(fx: &TwoLayerFixture, labels: &[String], by_row: bool) -> Result<Vec<usize>> {
    labels
        .iter()
        .map(|l| {
            let r = if by_row { fx.table.row_index(l) } else { fx.table.col_index(l) };
            r.map_err(|_| Error::Input(format!("definition anchor `{l}` is missing from the fixture")))
        })
        .collect()
}

fn anchor_labels(def: &Definition) -> &[String] {
    match def {
        Definition::Glue(g) => &g.row_labels,
        Definition::Median(m) => &m.row_labels,
    }
}

/// Evaluates a definition whose rows are rows of the fixture at column `b`.
fn eval_at_column(fx: &TwoLayerFixture, def: &Definition, anchors: &[usize], b: usize) -> Result<ValuePoint> {
    let col: Vec<ValuePoint> = anchors.iter().map(|&a| fx.table.get(a, b).clone()).collect();
    evaluate_definition(def, &col)
}

/// Evaluates a definition whose rows are columns of the fixture at row `a`.
fn eval_at_row(fx: &TwoLayerFixture, def: &Definition, anchors: &[usize], a: usize) -> Result<ValuePoint> {
    let row: Vec<ValuePoint> = anchors.iter().map(|&b| fx.table.get(a, b).clone()).collect();
    evaluate_definition(def, &row)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionAudit {
    pub q: usize,
    pub fs_level: f64,
    pub m_error: f64,
    pub n_error: f64,
    /// Column of `N` attaining the `N` error.
    pub worst_column: Option<usize>,
    pub bound: f64,
    pub bound_holds: bool,
}

/// Measures how far a definition built over `M` is from row `q` of `N`, on
/// the marked columns and on all columns, against the bound `delta + epsilon`.
/// Nothing is asserted: marked containment does not give elementarity.
pub fn extension_audit(fx: &TwoLayerFixture, def: &Definition, q: usize, delta: f64, epsilon: f64) -> Result<ExtensionAudit> {
    let t = &fx.table;
    if q >= t.n_rows() {
        return Err(Error::IndexOutOfRange { index: q, size: t.n_rows() });
    }
    let anchors = definition_rows(fx, anchor_labels(def), true)?;
    let (mut m_error, mut n_error, mut worst) = (0.0f64, 0.0f64, None);
    for b in 0..t.n_cols() {
        let e = t.dist(t.get(q, b), &eval_at_column(fx, def, &anchors, b)?);
        if fx.is_m_col(b) {
            m_error = m_error.max(e);
        }
        if worst.is_none() || e > n_error {
            n_error = e;
            worst = Some(b);
        }
    }
    let bound = delta + epsilon;
    Ok(ExtensionAudit {
        q,
        fs_level: fs_level(fx, q)?,
        m_error,
        n_error,
        worst_column: worst,
        bound,
        bound_holds: n_error <= bound + TOL,
    })
}

/// Defines, over `M`, the type of row `index` of `N` (or of column `index`
/// when `by_row` is false, using the transposed tables). The type is
/// restricted to the marked columns; a marked element gives a realized type.
pub fn define_over_m(
    fx: &TwoLayerFixture,
    index: usize,
    by_row: bool,
    params: WitnessParams,
    strategy: Strategy,
) -> Result<DefineOutcome> {
    let (m, marked, t) = if by_row {
        (fx.m_table()?, &fx.m_rows, fx.table.clone())
    } else {
        (fx.m_table()?.transpose(), &fx.m_cols, fx.table.transpose())
    };
    let other = if by_row { &fx.m_cols } else { &fx.m_rows };
    if index >= t.n_rows() {
        return Err(Error::IndexOutOfRange { index, size: t.n_rows() });
    }
    let p = match marked.iter().position(|&a| a == index) {
        Some(i) => TypeFunction::realized(&m, i)?,
        None => TypeFunction::from_values(&m, other.iter().map(|&b| t.get(index, b).clone()).collect())?,
    };
    build_definition(&m, &p, params, strategy)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryAudit {
    pub p_row: usize,
    pub q_col: usize,
    pub psi_p_at_q: ValuePoint,
    pub psi_q_at_p: ValuePoint,
    pub distance: f64,
    pub delta_p: f64,
    pub delta_q: f64,
    pub epsilon: f64,
    /// Both realizing elements are marked, so `delta_p + delta_q` is a
    /// theorem and is enforced.
    pub both_in_m: bool,
    pub strong_bound: f64,
    pub strong_holds: bool,
    pub bound: f64,
    pub bound_holds: bool,
}

/// Compares `psi_p` at the column realizing `q` with `psi_q` at the row
/// realizing `p`. `def_p` is a definition over rows of the fixture and
/// `def_q` a definition over its columns (built on the transposed table).
pub fn symmetry_audit(
    fx: &TwoLayerFixture,
    p_row: usize,
    def_p: &Definition,
    q_col: usize,
    def_q: &Definition,
    epsilon: f64,
) -> Result<SymmetryAudit> {
    let t = &fx.table;
    if p_row >= t.n_rows() {
        return Err(Error::IndexOutOfRange { index: p_row, size: t.n_rows() });
    }
    if q_col >= t.n_cols() {
        return Err(Error::IndexOutOfRange { index: q_col, size: t.n_cols() });
    }
    let ap = definition_rows(fx, anchor_labels(def_p), true)?;
    let aq = definition_rows(fx, anchor_labels(def_q), false)?;
    let psi_p_at_q = eval_at_column(fx, def_p, &ap, q_col)?;
    let psi_q_at_p = eval_at_row(fx, def_q, &aq, p_row)?;
    let distance = t.dist(&psi_p_at_q, &psi_q_at_p);
    let (delta_p, delta_q) = (def_p.certified_error(), def_q.certified_error());
    let both_in_m = fx.is_m_row(p_row) && fx.is_m_col(q_col);
    let strong_bound = delta_p + delta_q;
    let strong_holds = distance <= strong_bound + TOL;
    if both_in_m && !strong_holds {
        return Err(Error::Uncertified(format!(
            "symmetry bound {strong_bound} fails ({distance}); the certified errors do not hold at the realizing elements"
        )));
    }
    let bound = strong_bound + epsilon;
    Ok(SymmetryAudit {
        p_row,
        q_col,
        psi_p_at_q,
        psi_q_at_p,
        distance,
        delta_p,
        delta_q,
        epsilon,
        both_in_m,
        strong_bound,
        strong_holds,
        bound,
        bound_holds: distance <= bound + TOL,
    })
}
