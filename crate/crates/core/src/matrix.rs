//! Weighted bipartite structures `<V, W, f>`: a table of values indexed by
//! row labels and column labels.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value_space::{diameter, ValuePoint, ValueSpace};

/// A total table `f: V x W -> K` with values in one value space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStructure", into = "RawStructure")]
pub struct WeightedBipartiteStructure {
    rows: Vec<String>,
    cols: Vec<String>,
    values: Vec<ValuePoint>,
    space: ValueSpace,
    diameter: f64,
}

#[derive(Serialize, Deserialize)]
struct RawStructure {
    rows: Vec<String>,
    cols: Vec<String>,
    space: ValueSpace,
    table: Vec<Vec<ValuePoint>>,
}

impl TryFrom<RawStructure> for WeightedBipartiteStructure {
    type Error = Error;
    fn try_from(r: RawStructure) -> Result<Self> {
        let cols = r.cols.len();
        if let Some(bad) = r.table.iter().find(|row| row.len() != cols) {
            return Err(Error::ShapeMismatch(format!("row of length {} in a table with {cols} columns", bad.len())));
        }
        Self::new(r.rows, r.cols, r.table.into_iter().flatten().collect(), r.space)
    }
}

impl From<WeightedBipartiteStructure> for RawStructure {
    fn from(s: WeightedBipartiteStructure) -> Self {
        let table = (0..s.n_rows()).map(|a| s.row(a).to_vec()).collect();
        RawStructure {
            rows: s.rows,
            cols: s.cols,
            space: s.space,
            table,
        }
    }
}

/// Pointwise operations used by the seminorm laws.
#[derive(Debug, Clone)]
pub enum Transform<'a> {
    Scale(f64),
    AddPointwise(&'a WeightedBipartiteStructure),
    Transpose,
    ShiftConstant(ValuePoint),
}

fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

impl WeightedBipartiteStructure {
    /// Builds a structure from a row-major value list.
    pub fn new(rows: Vec<String>, cols: Vec<String>, values: Vec<ValuePoint>, space: ValueSpace) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::ShapeMismatch("a structure needs at least one row and one column".into()));
        }
        if values.len() != rows.len() * cols.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {}x{} table",
                values.len(),
                rows.len(),
                cols.len()
            )));
        }
        for v in &values {
            space.check(v)?;
        }
        let diameter = diameter(&space, &values);
        Ok(WeightedBipartiteStructure {
            rows,
            cols,
            values,
            space,
            diameter,
        })
    }

    /// Real-valued structure with labels `r0.., c0..`.
    pub fn from_real_rows(table: &[Vec<f64>]) -> Result<Self> {
        let n_cols = table.first().map_or(0, Vec::len);
        if table.iter().any(|r| r.len() != n_cols) {
            return Err(Error::ShapeMismatch("ragged table".into()));
        }
        let values = table.iter().flatten().map(|&v| ValuePoint::Real(v)).collect();
        Self::new(
            default_labels("r", table.len()),
            default_labels("c", n_cols),
            values,
            ValueSpace::Real,
        )
    }

    /// The half-graph `H_n`: `f(i, j) = 1` if `i <= j`, else `0`.
    pub fn half_graph(n: usize) -> Result<Self> {
        let t: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i <= j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_real_rows(&t)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[String] {
        &self.cols
    }

    pub fn space(&self) -> &ValueSpace {
        &self.space
    }

    pub fn values(&self) -> &[ValuePoint] {
        &self.values
    }

    /// Largest distance between two table values.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> &ValuePoint {
        &self.values[a * self.cols.len() + b]
    }

    pub fn row(&self, a: usize) -> &[ValuePoint] {
        let n = self.cols.len();
        &self.values[a * n..(a + 1) * n]
    }

    pub fn column(&self, b: usize) -> Vec<ValuePoint> {
        (0..self.n_rows()).map(|a| self.get(a, b).clone()).collect()
    }

    #[inline]
    pub fn dist(&self, p: &ValuePoint, q: &ValuePoint) -> f64 {
        self.space.distance_unchecked(p, q)
    }

    pub fn row_index(&self, label: &str) -> Result<usize> {
        self.rows
            .iter()
            .position(|r| r == label)
            .ok_or_else(|| Error::Input(format!("unknown row label `{label}`")))
    }

    pub fn col_index(&self, label: &str) -> Result<usize> {
        self.cols
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::Input(format!("unknown column label `{label}`")))
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|v| v == &self.values[0])
    }

    /// Distinct table values in increasing order.
    pub fn realized_values(&self) -> Vec<ValuePoint> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup();
        v
    }

    /// Restriction to the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        for &a in rows {
            if a >= self.n_rows() {
                return Err(Error::IndexOutOfRange { index: a, size: self.n_rows() });
            }
        }
        for &b in cols {
            if b >= self.n_cols() {
                return Err(Error::IndexOutOfRange { index: b, size: self.n_cols() });
            }
        }
        let values = rows
            .iter()
            .flat_map(|&a| cols.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.get(a, b).clone())
            .collect();
        Self::new(
            rows.iter().map(|&a| self.rows[a].clone()).collect(),
            cols.iter().map(|&b| self.cols[b].clone()).collect(),
            values,
            self.space.clone(),
        )
    }

    pub fn transpose(&self) -> Self {
        let values = (0..self.n_cols())
            .flat_map(|b| (0..self.n_rows()).map(move |a| (a, b)))
            .map(|(a, b)| self.get(a, b).clone())
            .collect();
        WeightedBipartiteStructure {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            values,
            space: self.space.clone(),
            diameter: self.diameter,
        }
    }

    fn map_linear(&self, f: impl Fn(&ValuePoint, usize) -> Result<ValuePoint>) -> Result<Self> {
        if !self.space.is_linear() {
            return Err(Error::KindMismatch("arithmetic on finite-metric values".into()));
        }
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| f(v, i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.rows.clone(), self.cols.clone(), values, self.space.clone())
    }

    pub fn transform(&self, op: &Transform<'_>) -> Result<Self> {
        use crate::envelope::Connective;
        match op {
            Transform::Transpose => Ok(self.transpose()),
            Transform::Scale(r) => self.map_linear(|v, _| Connective::Scale(*r).apply(std::slice::from_ref(v), None)),
            Transform::AddPointwise(g) => {
                if g.n_rows() != self.n_rows() || g.n_cols() != self.n_cols() {
                    return Err(Error::ShapeMismatch(format!(
                        "{}x{} plus {}x{}",
                        self.n_rows(),
                        self.n_cols(),
                        g.n_rows(),
                        g.n_cols()
                    )));
                }
                if !g.space.is_linear() {
                    return Err(Error::KindMismatch("arithmetic on finite-metric values".into()));
                }
                self.map_linear(|v, i| Connective::Add.apply(&[v.clone(), g.values[i].clone()], None))
            }
            Transform::ShiftConstant(c) => self.map_linear(|v, _| Connective::Add.apply(&[v.clone(), c.clone()], None)),
        }
    }

    /// Reads the matrix CSV format: the first row holds column labels (its
    /// first cell is ignored), the first column holds row labels, and cells
    /// are reals or semicolon-joined vectors.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut records = rdr.records();
        let header = records
            .next()
            .ok_or_else(|| Error::Input("empty matrix file".into()))??;
        let cols: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
        let mut rows = Vec::new();
        let mut values = Vec::new();
        for (k, rec) in records.enumerate() {
            let rec = rec?;
            let line = k + 2;
            if rec.len() != cols.len() + 1 {
                return Err(Error::Input(format!(
                    "line {line}: expected {} cells, found {}",
                    cols.len() + 1,
                    rec.len()
                )));
            }
            rows.push(rec[0].to_owned());
            for (c, cell) in rec.iter().skip(1).enumerate() {
                values.push(parse_cell(cell).map_err(|e| Error::Input(format!("line {line}, column {}: {e}", c + 2)))?);
            }
        }
        let space = ValueSpace::infer(&values)?;
        Self::new(rows, cols, values, space)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("");
        for c in &self.cols {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for a in 0..self.n_rows() {
            out.push_str(&self.rows[a]);
            for v in self.row(a) {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn parse_cell(cell: &str) -> std::result::Result<ValuePoint, String> {
    if cell.contains(';') {
        let coords = cell
            .split(';')
            .map(|s| s.trim().replace('\u{2212}', "-").parse::<f64>().map_err(|e| format!("`{cell}`: {e}")))
            .collect::<std::result::Result<Vec<f64>, String>>()?;
        Ok(ValuePoint::Vector(coords))
    } else {
        let v = cell
            .replace('\u{2212}', "-")
            .parse::<f64>()
            .map_err(|e| format!("`{cell}`: {e}"))?;
        if !v.is_finite() {
            return Err(format!("`{cell}` is not finite"));
        }
        Ok(ValuePoint::Real(v))
    }
}
