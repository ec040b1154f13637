//! Compact envelopes and their propagation through builtin connectives.
//!
//! An envelope is an outer approximation of the set of values a formula can
//! take: a finite union of intervals (real values), a finite union of
//! axis-aligned boxes (sup-normed vectors), or a set of points of a finite
//! metric space. For the builtin connectives the image of a product of
//! intervals is computed exactly from the endpoints.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value_space::{sup_dist, MetricTable, ValuePoint, TOL};

/// Components kept before neighbouring pieces are merged into their hull.
const MAX_COMPONENTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidParameter(format!("[{lo}, {hi}] is not a compact interval")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lo - tol && v <= self.hi + tol
    }

    fn add(self, o: Self) -> Self {
        Interval { lo: self.lo + o.lo, hi: self.hi + o.hi }
    }

    fn sub(self, o: Self) -> Self {
        Interval { lo: self.lo - o.hi, hi: self.hi - o.lo }
    }

    fn scale(self, r: f64) -> Self {
        if r >= 0.0 {
            Interval { lo: r * self.lo, hi: r * self.hi }
        } else {
            Interval { lo: r * self.hi, hi: r * self.lo }
        }
    }

    fn max(self, o: Self) -> Self {
        Interval { lo: self.lo.max(o.lo), hi: self.hi.max(o.hi) }
    }

    fn min(self, o: Self) -> Self {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.min(o.hi) }
    }

    fn monus(self, o: Self) -> Self {
        Interval {
            lo: (self.lo - o.hi).max(0.0),
            hi: (self.hi - o.lo).max(0.0),
        }
    }

    fn abs_diff(self, o: Self) -> Self {
        let d = self.sub(o);
        if d.lo >= 0.0 {
            d
        } else if d.hi <= 0.0 {
            Interval { lo: -d.hi, hi: -d.lo }
        } else {
            Interval { lo: 0.0, hi: (-d.lo).max(d.hi) }
        }
    }

    fn hull(self, o: Self) -> Self {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }
}

/// Builtin continuous connectives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "arg", rename_all = "snake_case")]
pub enum Connective {
    Add,
    Sub,
    Scale(f64),
    Max,
    Min,
    /// Truncated subtraction `max(x - y, 0)`.
    Monus,
    Dist,
    Const(f64),
    /// Coordinate projection onto the reals.
    Proj(usize),
}

impl Connective {
    pub fn arity(&self) -> usize {
        match self {
            Connective::Const(_) => 0,
            Connective::Scale(_) | Connective::Proj(_) => 1,
            _ => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Connective::Add => "add",
            Connective::Sub => "sub",
            Connective::Scale(_) => "scale",
            Connective::Max => "max",
            Connective::Min => "min",
            Connective::Monus => "monus",
            Connective::Dist => "dist",
            Connective::Const(_) => "const",
            Connective::Proj(_) => "proj",
        }
    }

    fn check_arity(&self, got: usize) -> Result<()> {
        if got != self.arity() {
            return Err(Error::Arity {
                name: self.name().into(),
                expected: self.arity(),
                got,
            });
        }
        Ok(())
    }

    /// Applies the connective pointwise. `metric` is needed only for `dist`
    /// on finite-metric points.
    pub fn apply(&self, args: &[ValuePoint], metric: Option<&MetricTable>) -> Result<ValuePoint> {
        self.check_arity(args.len())?;
        use ValuePoint::*;
        let lift = |f: &dyn Fn(f64, f64) -> f64| -> Result<ValuePoint> {
            match (&args[0], &args[1]) {
                (Real(a), Real(b)) => Ok(Real(f(*a, *b))),
                (Vector(a), Vector(b)) if a.len() == b.len() => {
                    Ok(Vector(a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()))
                }
                (Vector(a), Vector(b)) => Err(Error::DimensionMismatch { expected: a.len(), got: b.len() }),
                (a, b) => Err(Error::KindMismatch(format!("{} applied to {a} and {b}", self.name()))),
            }
        };
        match *self {
            Connective::Add => lift(&|x, y| x + y),
            Connective::Sub => lift(&|x, y| x - y),
            Connective::Max => lift(&f64::max),
            Connective::Min => lift(&f64::min),
            Connective::Monus => lift(&|x, y| (x - y).max(0.0)),
            Connective::Scale(r) => match &args[0] {
                Real(a) => Ok(Real(r * a)),
                Vector(c) => Ok(Vector(c.iter().map(|x| r * x).collect())),
                p => Err(Error::KindMismatch(format!("scale applied to {p}"))),
            },
            Connective::Dist => match (&args[0], &args[1]) {
                (Real(a), Real(b)) => Ok(Real((a - b).abs())),
                (Vector(a), Vector(b)) if a.len() == b.len() => Ok(Real(sup_dist(a, b))),
                (Finite { index: i }, Finite { index: j }) => {
                    let t = metric.ok_or_else(|| Error::KindMismatch("dist on finite points needs a table".into()))?;
                    Ok(Real(t.get(*i, *j)))
                }
                (a, b) => Err(Error::KindMismatch(format!("dist applied to {a} and {b}"))),
            },
            Connective::Const(c) => Ok(Real(c)),
            Connective::Proj(i) => match &args[0] {
                Real(a) if i == 0 => Ok(Real(*a)),
                Vector(c) if i < c.len() => Ok(Real(c[i])),
                p => Err(Error::KindMismatch(format!("proj[{i}] applied to {p}"))),
            },
        }
    }
}

/// An outer approximation of a compact value set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CompactEnvelope {
    Real { parts: Vec<Interval> },
    Boxes { dim: usize, boxes: Vec<Vec<Interval>> },
    Finite { table: Arc<MetricTable>, indices: BTreeSet<usize> },
}

impl CompactEnvelope {
    pub fn real(parts: Vec<Interval>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("empty envelope".into()));
        }
        Ok(CompactEnvelope::Real { parts: normalize_intervals(parts) })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::real(vec![Interval::new(lo, hi)?])
    }

    pub fn boxes(boxes: Vec<Vec<Interval>>) -> Result<Self> {
        let dim = boxes
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidParameter("empty envelope".into()))?;
        if dim == 0 {
            return Err(Error::InvalidParameter("zero-dimensional box".into()));
        }
        if let Some(b) = boxes.iter().find(|b| b.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: b.len() });
        }
        Ok(CompactEnvelope::Boxes { dim, boxes: normalize_boxes(boxes) })
    }

    pub fn finite(table: Arc<MetricTable>, indices: BTreeSet<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter("empty envelope".into()));
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= table.len()) {
            return Err(Error::IndexOutOfRange { index: i, size: table.len() });
        }
        Ok(CompactEnvelope::Finite { table, indices })
    }

    /// Smallest envelope containing a single point.
    pub fn singleton(p: &ValuePoint) -> Result<Self> {
        match p {
            ValuePoint::Real(v) => Self::real(vec![Interval::point(*v)]),
            ValuePoint::Vector(c) => Self::boxes(vec![c.iter().map(|&v| Interval::point(v)).collect()]),
            ValuePoint::Finite { .. } => Err(Error::KindMismatch("finite point needs its table".into())),
        }
    }

    pub fn contains(&self, p: &ValuePoint) -> bool {
        self.contains_tol(p, TOL)
    }

    pub fn contains_tol(&self, p: &ValuePoint, tol: f64) -> bool {
        match (self, p) {
            (CompactEnvelope::Real { parts }, ValuePoint::Real(v)) => parts.iter().any(|i| i.contains(*v, tol)),
            (CompactEnvelope::Boxes { dim, boxes }, ValuePoint::Vector(c)) => {
                c.len() == *dim && boxes.iter().any(|b| b.iter().zip(c).all(|(i, v)| i.contains(*v, tol)))
            }
            (CompactEnvelope::Finite { indices, .. }, ValuePoint::Finite { index }) => indices.contains(index),
            _ => false,
        }
    }

    /// Exact diameter of the envelope in its own metric.
    pub fn diameter(&self) -> f64 {
        match self {
            CompactEnvelope::Real { parts } => parts.last().unwrap().hi - parts[0].lo,
            CompactEnvelope::Boxes { dim, boxes } => (0..*dim)
                .map(|c| {
                    let hi = boxes.iter().map(|b| b[c].hi).fold(f64::NEG_INFINITY, f64::max);
                    let lo = boxes.iter().map(|b| b[c].lo).fold(f64::INFINITY, f64::min);
                    hi - lo
                })
                .fold(0.0, f64::max),
            CompactEnvelope::Finite { table, indices } => {
                let v: Vec<usize> = indices.iter().copied().collect();
                let mut best = 0.0_f64;
                for (k, &i) in v.iter().enumerate() {
                    for &j in &v[k + 1..] {
                        best = best.max(table.get(i, j));
                    }
                }
                best
            }
        }
    }

    /// True when the envelope is real-valued and contained in `[0, inf)`.
    pub fn is_nonnegative_real(&self) -> bool {
        match self {
            CompactEnvelope::Real { parts } => parts[0].lo >= 0.0,
            _ => false,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, CompactEnvelope::Real { .. })
    }

    /// Bounding interval of a real envelope.
    pub fn real_hull(&self) -> Option<Interval> {
        match self {
            CompactEnvelope::Real { parts } => Some(Interval { lo: parts[0].lo, hi: parts.last().unwrap().hi }),
            _ => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            CompactEnvelope::Boxes { dim, .. } => Some(*dim),
            _ => None,
        }
    }
}

impl fmt::Display for CompactEnvelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let iv = |i: &Interval| format!("[{}, {}]", i.lo, i.hi);
        match self {
            CompactEnvelope::Real { parts } => {
                write!(f, "{}", parts.iter().map(iv).collect::<Vec<_>>().join(" u "))
            }
            CompactEnvelope::Boxes { boxes, .. } => {
                let bs: Vec<String> = boxes
                    .iter()
                    .map(|b| b.iter().map(iv).collect::<Vec<_>>().join(" x "))
                    .collect();
                write!(f, "{}", bs.join(" u "))
            }
            CompactEnvelope::Finite { indices, .. } => write!(f, "{indices:?}"),
        }
    }
}

fn normalize_intervals(mut parts: Vec<Interval>) -> Vec<Interval> {
    parts.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
    for p in parts {
        match out.last_mut() {
            Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
            _ => out.push(p),
        }
    }
    while out.len() > MAX_COMPONENTS {
        // merge across the narrowest gap
        let k = (0..out.len() - 1)
            .min_by(|&a, &b| {
                let ga = out[a + 1].lo - out[a].hi;
                let gb = out[b + 1].lo - out[b].hi;
                ga.total_cmp(&gb)
            })
            .unwrap();
        let next = out.remove(k + 1);
        out[k].hi = out[k].hi.max(next.hi);
    }
    out
}

fn box_contains(outer: &[Interval], inner: &[Interval]) -> bool {
    outer.iter().zip(inner).all(|(o, i)| o.lo <= i.lo && i.hi <= o.hi)
}

fn normalize_boxes(mut boxes: Vec<Vec<Interval>>) -> Vec<Vec<Interval>> {
    let key = |b: &Vec<Interval>| b.iter().flat_map(|i| [i.lo, i.hi]).collect::<Vec<f64>>();
    boxes.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        ka.iter()
            .zip(&kb)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out: Vec<Vec<Interval>> = Vec::new();
    for (i, b) in boxes.iter().enumerate() {
        let dominated = boxes
            .iter()
            .enumerate()
            .any(|(j, o)| j != i && box_contains(o, b) && (o != b || j < i));
        if !dominated {
            out.push(b.clone());
        }
    }
    if out.len() > MAX_COMPONENTS {
        let hull = out[1..].iter().fold(out[0].clone(), |acc, b| {
            acc.iter().zip(b).map(|(x, y)| x.hull(*y)).collect()
        });
        out = vec![hull];
    }
    out
}

fn product_map<T: Clone, U>(a: &[T], b: &[T], f: impl Fn(&T, &T) -> U) -> Vec<U> {
    a.iter().flat_map(|x| b.iter().map(move |y| (x, y))).map(|(x, y)| f(x, y)).collect()
}

/// Propagates envelopes through a connective, returning an outer
/// approximation of the image of the product of the inputs.
pub fn envelope_propagate(connective: &Connective, inputs: &[CompactEnvelope]) -> Result<CompactEnvelope> {
    connective.check_arity(inputs.len())?;
    use CompactEnvelope as E;
    let binary_iv = |f: fn(Interval, Interval) -> Interval| -> Result<E> {
        match (&inputs[0], &inputs[1]) {
            (E::Real { parts: a }, E::Real { parts: b }) => E::real(product_map(a, b, |x, y| f(*x, *y))),
            (E::Boxes { dim: da, boxes: a }, E::Boxes { dim: db, boxes: b }) => {
                if da != db {
                    return Err(Error::DimensionMismatch { expected: *da, got: *db });
                }
                E::boxes(product_map(a, b, |x, y| x.iter().zip(y).map(|(p, q)| f(*p, *q)).collect()))
            }
            (a, b) => Err(Error::KindMismatch(format!("{} applied to envelopes {a} and {b}", connective.name()))),
        }
    };
    match *connective {
        Connective::Add => binary_iv(Interval::add),
        Connective::Sub => binary_iv(Interval::sub),
        Connective::Max => binary_iv(Interval::max),
        Connective::Min => binary_iv(Interval::min),
        Connective::Monus => binary_iv(Interval::monus),
        Connective::Scale(r) => match &inputs[0] {
            E::Real { parts } => E::real(parts.iter().map(|i| i.scale(r)).collect()),
            E::Boxes { boxes, .. } => E::boxes(boxes.iter().map(|b| b.iter().map(|i| i.scale(r)).collect()).collect()),
            e => Err(Error::KindMismatch(format!("scale applied to envelope {e}"))),
        },
        Connective::Const(c) => E::real(vec![Interval::point(c)]),
        Connective::Proj(i) => match &inputs[0] {
            E::Real { parts } if i == 0 => E::real(parts.clone()),
            E::Boxes { dim, boxes } if i < *dim => E::real(boxes.iter().map(|b| b[i]).collect()),
            e => Err(Error::KindMismatch(format!("proj[{i}] applied to envelope {e}"))),
        },
        Connective::Dist => match (&inputs[0], &inputs[1]) {
            (E::Real { parts: a }, E::Real { parts: b }) => E::real(product_map(a, b, |x, y| x.abs_diff(*y))),
            (E::Boxes { dim: da, boxes: a }, E::Boxes { dim: db, boxes: b }) => {
                if da != db {
                    return Err(Error::DimensionMismatch { expected: *da, got: *db });
                }
                // coordinates vary independently, so the max of the per-coordinate
                // ranges is again an interval
                E::real(product_map(a, b, |x, y| {
                    x.iter().zip(y).map(|(p, q)| p.abs_diff(*q)).fold(Interval::point(0.0), Interval::max)
                }))
            }
            (E::Finite { table: ta, indices: a }, E::Finite { table: tb, indices: b }) => {
                if ta != tb {
                    return Err(Error::KindMismatch("dist across different finite metric spaces".into()));
                }
                E::real(
                    a.iter()
                        .flat_map(|&i| b.iter().map(move |&j| (i, j)))
                        .map(|(i, j)| Interval::point(ta.get(i, j)))
                        .collect(),
                )
            }
            (a, b) => Err(Error::KindMismatch(format!("dist applied to envelopes {a} and {b}"))),
        },
    }
}
