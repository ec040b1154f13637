//! Finite-dimensional truncations of the sup-metric value space.
//!
//! Values live in one of three carriers: the real line, `R^d` with the
//! sup norm, or an explicit finite metric space given by its distance
//! table. Every finite metric space embeds isometrically into `R^n` with
//! the sup norm via [`embed_finite_metric`].

use std::cmp::Ordering;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for floating-point comparisons.
pub const TOL: f64 = 1e-9;

/// Tolerance used when validating metric tables and isometries.
pub const METRIC_TOL: f64 = 1e-12;

/// A point of the value space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValuePoint {
    Real(f64),
    Vector(Vec<f64>),
    Finite { index: usize },
}

impl ValuePoint {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            ValuePoint::Real(v) => Some(*v),
            _ => None,
        }
    }

    /// Coordinates of a real or vector point; `None` for finite-metric points.
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            ValuePoint::Real(v) => Some(std::slice::from_ref(v)),
            ValuePoint::Vector(c) => Some(c),
            ValuePoint::Finite { .. } => None,
        }
    }

    /// A total order used for deterministic enumeration of realized values.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        fn rank(p: &ValuePoint) -> u8 {
            match p {
                ValuePoint::Real(_) => 0,
                ValuePoint::Vector(_) => 1,
                ValuePoint::Finite { .. } => 2,
            }
        }
        match (self, other) {
            (ValuePoint::Real(a), ValuePoint::Real(b)) => a.total_cmp(b),
            (ValuePoint::Vector(a), ValuePoint::Vector(b)) => {
                for (x, y) in a.iter().zip(b) {
                    match x.total_cmp(y) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                }
                a.len().cmp(&b.len())
            }
            (ValuePoint::Finite { index: a }, ValuePoint::Finite { index: b }) => a.cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl std::fmt::Display for ValuePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValuePoint::Real(v) => write!(f, "{v}"),
            ValuePoint::Vector(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(";"))
            }
            ValuePoint::Finite { index } => write!(f, "#{index}"),
        }
    }
}

/// A validated symmetric distance table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct MetricTable {
    n: usize,
    d: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for MetricTable {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        MetricTable::new(rows)
    }
}

impl From<MetricTable> for Vec<Vec<f64>> {
    fn from(t: MetricTable) -> Self {
        t.rows()
    }
}

impl MetricTable {
    /// Builds a table, checking the metric axioms within [`METRIC_TOL`].
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMetric("empty table".into()));
        }
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            d.extend_from_slice(row);
        }
        let t = MetricTable { n, d };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j);
                if !v.is_finite() || v < -METRIC_TOL {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) = {v} is not a finite nonnegative number")));
                }
                if i == j && v.abs() > METRIC_TOL {
                    return Err(Error::InvalidMetric(format!("d({i},{i}) = {v} is not zero")));
                }
                if i != j && v <= METRIC_TOL {
                    return Err(Error::InvalidMetric(format!("distinct points {i},{j} at distance {v}")));
                }
                if (v - self.get(j, i)).abs() > METRIC_TOL {
                    return Err(Error::InvalidMetric(format!("asymmetric entries at ({i},{j})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.get(i, k) > self.get(i, j) + self.get(j, k) + METRIC_TOL {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails for ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.d.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Reads a square numeric matrix from CSV. A header row is skipped when
    /// its first cell does not parse as a number.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(r) => rows.push(r),
                Err(_) if line == 0 => continue,
                Err(e) => return Err(Error::Input(format!("line {}: {e}", line + 1))),
            }
        }
        Self::new(rows)
    }
}

/// The carrier a family of values lives in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValueSpace {
    Real,
    SupVector { dim: usize },
    FiniteMetric { table: Arc<MetricTable> },
}

impl ValueSpace {
    pub fn finite(table: MetricTable) -> Self {
        ValueSpace::FiniteMetric {
            table: Arc::new(table),
        }
    }

    /// Checks that `p` is a point of this space.
    pub fn check(&self, p: &ValuePoint) -> Result<()> {
        match (self, p) {
            (ValueSpace::Real, ValuePoint::Real(_)) => Ok(()),
            (ValueSpace::SupVector { dim }, ValuePoint::Vector(c)) => {
                if c.len() == *dim {
                    Ok(())
                } else {
                    Err(Error::DimensionMismatch {
                        expected: *dim,
                        got: c.len(),
                    })
                }
            }
            (ValueSpace::FiniteMetric { table }, ValuePoint::Finite { index }) => {
                if *index < table.len() {
                    Ok(())
                } else {
                    Err(Error::IndexOutOfRange {
                        index: *index,
                        size: table.len(),
                    })
                }
            }
            _ => Err(Error::KindMismatch(format!("point {p} does not belong to {}", self.name()))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ValueSpace::Real => "R".into(),
            ValueSpace::SupVector { dim } => format!("R^{dim} (sup)"),
            ValueSpace::FiniteMetric { table } => format!("finite metric on {} points", table.len()),
        }
    }

    /// Distance between two points of the space.
    pub fn distance(&self, p: &ValuePoint, q: &ValuePoint) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.distance_unchecked(p, q))
    }

    /// Distance without membership checks. Callers must guarantee that both
    /// points belong to the space.
    #[inline]
    pub fn distance_unchecked(&self, p: &ValuePoint, q: &ValuePoint) -> f64 {
        match (self, p, q) {
            (_, ValuePoint::Real(a), ValuePoint::Real(b)) => (a - b).abs(),
            (_, ValuePoint::Vector(a), ValuePoint::Vector(b)) => sup_dist(a, b),
            (ValueSpace::FiniteMetric { table }, ValuePoint::Finite { index: i }, ValuePoint::Finite { index: j }) => {
                table.get(*i, *j)
            }
            _ => f64::NAN,
        }
    }

    /// Whether pointwise arithmetic (sums, scalar multiples) is available.
    pub fn is_linear(&self) -> bool {
        !matches!(self, ValueSpace::FiniteMetric { .. })
    }

    /// Infers the space from a nonempty list of points.
    pub fn infer(points: &[ValuePoint]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Input("cannot infer a value space from no values".into()))?;
        let space = match first {
            ValuePoint::Real(_) => ValueSpace::Real,
            ValuePoint::Vector(c) => ValueSpace::SupVector { dim: c.len() },
            ValuePoint::Finite { .. } => {
                return Err(Error::KindMismatch(
                    "finite-metric points need an explicit table".into(),
                ))
            }
        };
        for p in points {
            space.check(p)?;
        }
        Ok(space)
    }
}

/// Sup-norm distance between two coordinate vectors of equal length.
#[inline]
pub fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Distance between `p` and `q` in `space`.
pub fn metric_distance(space: &ValueSpace, p: &ValuePoint, q: &ValuePoint) -> Result<f64> {
    space.distance(p, q)
}

/// Embeds a finite metric space isometrically into `R^n` with the sup norm,
/// sending `x` to `(d(x, y) - d(y, base))_y`.
pub fn embed_finite_metric(table: &MetricTable, base: usize) -> Result<Vec<ValuePoint>> {
    let n = table.len();
    if base >= n {
        return Err(Error::IndexOutOfRange { index: base, size: n });
    }
    Ok((0..n)
        .map(|x| ValuePoint::Vector((0..n).map(|y| table.get(x, y) - table.get(y, base)).collect()))
        .collect())
}

/// Largest pairwise distance among `points`; zero for fewer than two points.
pub fn diameter(space: &ValueSpace, points: &[ValuePoint]) -> f64 {
    match space {
        ValueSpace::Real | ValueSpace::SupVector { .. } => {
            let dim = points.first().and_then(|p| p.coords()).map_or(0, <[f64]>::len);
            let mut best = 0.0_f64;
            for c in 0..dim {
                let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    let v = p.coords().map_or(f64::NAN, |x| x[c]);
                    (lo.min(v), hi.max(v))
                });
                best = best.max(hi - lo);
            }
            best
        }
        ValueSpace::FiniteMetric { .. } => {
            let mut best = 0.0_f64;
            for (i, p) in points.iter().enumerate() {
                for q in &points[i + 1..] {
                    best = best.max(space.distance_unchecked(p, q));
                }
            }
            best
        }
    }
}
