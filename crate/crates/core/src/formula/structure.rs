use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::envelope::{CompactEnvelope, Interval};
use crate::error::{Error, Result};
use crate::value_space::{MetricTable, ValuePoint};

use super::ast::{Language, PredicateSymbol};

/// A dense table of predicate values, indexed by tuples of carrier positions.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateTable {
    dims: Vec<usize>,
    values: Vec<ValuePoint>,
}

impl PredicateTable {
    fn offset(&self, args: &[usize]) -> usize {
        args.iter().zip(&self.dims).fold(0, |acc, (&a, &d)| acc * d + a)
    }

    pub fn get(&self, args: &[usize]) -> &ValuePoint {
        &self.values[self.offset(args)]
    }

    pub fn values(&self) -> &[ValuePoint] {
        &self.values
    }
}

/// A finite many-sorted structure.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteStructure {
    sorts: BTreeMap<String, Vec<String>>,
    language: Language,
    tables: BTreeMap<String, PredicateTable>,
}

/// Visits every tuple of `dims` in lexicographic order.
pub(crate) fn for_each_tuple(dims: &[usize], mut visit: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if dims.iter().any(|&d| d == 0) {
        return Ok(());
    }
    let mut t = vec![0; dims.len()];
    loop {
        visit(&t)?;
        let mut i = dims.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            t[i] += 1;
            if t[i] < dims[i] {
                break;
            }
            t[i] = 0;
        }
    }
}

impl FiniteStructure {
    /// Builds a structure from carriers and per-predicate maps from label
    /// tuples to values. Every tuple must be present and every value must lie
    /// in the declared envelope.
    pub fn new(
        sorts: BTreeMap<String, Vec<String>>,
        language: Language,
        entries: BTreeMap<String, Vec<(Vec<String>, ValuePoint)>>,
    ) -> Result<Self> {
        for (name, carrier) in &sorts {
            if carrier.is_empty() {
                return Err(Error::Input(format!("sort `{name}` has an empty carrier")));
            }
            let mut seen = std::collections::BTreeSet::new();
            for l in carrier {
                if !seen.insert(l) {
                    return Err(Error::Input(format!("sort `{name}` repeats the label `{l}`")));
                }
            }
        }
        let mut tables = BTreeMap::new();
        for (name, sym) in &language.predicates {
            let dims = sym
                .sorts
                .iter()
                .map(|s| {
                    sorts
                        .get(s)
                        .map(Vec::len)
                        .ok_or_else(|| Error::SortMismatch(format!("predicate `{name}` uses undeclared sort `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let size: usize = dims.iter().product();
            let mut values: Vec<Option<ValuePoint>> = vec![None; size];
            let mut table = PredicateTable { dims, values: Vec::new() };
            let rows = entries.get(name).map(Vec::as_slice).unwrap_or(&[]);
            for (labels, v) in rows {
                if labels.len() != sym.sorts.len() {
                    return Err(Error::Arity { name: name.clone(), expected: sym.sorts.len(), got: labels.len() });
                }
                let idx = labels
                    .iter()
                    .zip(&sym.sorts)
                    .map(|(l, s)| index_of(&sorts, s, l))
                    .collect::<Result<Vec<_>>>()?;
                if !sym.envelope.contains(v) {
                    return Err(Error::Input(format!(
                        "{name}({}) = {v} lies outside the declared envelope {}",
                        labels.join(", "),
                        sym.envelope
                    )));
                }
                let slot = &mut values[table.offset(&idx)];
                if slot.is_some() {
                    return Err(Error::Input(format!("{name}({}) is given twice", labels.join(", "))));
                }
                *slot = Some(v.clone());
            }
            if let Some(missing) = values.iter().position(Option::is_none) {
                let mut rest = missing;
                let mut labels = vec![String::new(); sym.sorts.len()];
                for (i, s) in sym.sorts.iter().enumerate().rev() {
                    let d = table.dims[i];
                    labels[i] = sorts[s][rest % d].clone();
                    rest /= d;
                }
                return Err(Error::Input(format!("{name}({}) has no value", labels.join(", "))));
            }
            table.values = values.into_iter().map(Option::unwrap).collect();
            tables.insert(name.clone(), table);
        }
        for name in entries.keys() {
            if !language.predicates.contains_key(name) {
                return Err(Error::UnknownPredicate(name.clone()));
            }
        }
        Ok(FiniteStructure { sorts, language, tables })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawStructure = serde_json::from_str(text)?;
        raw.build()
    }

    pub fn from_json_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_value(&self) -> Value {
        let mut preds = serde_json::Map::new();
        for (name, sym) in &self.language.predicates {
            let t = &self.tables[name];
            let mut table = serde_json::Map::new();
            let mut k = 0;
            let _ = for_each_tuple(&t.dims, |idx| {
                let labels: Vec<&str> = idx.iter().zip(&sym.sorts).map(|(&i, s)| self.sorts[s][i].as_str()).collect();
                table.insert(labels.join(","), serde_json::to_value(&t.values[k]).unwrap_or(Value::Null));
                k += 1;
                Ok(())
            });
            preds.insert(
                name.clone(),
                serde_json::json!({
                    "sorts": sym.sorts,
                    "envelope": envelope_to_json(&sym.envelope),
                    "table": table,
                }),
            );
        }
        serde_json::json!({ "sorts": self.sorts, "predicates": preds })
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    pub fn sorts(&self) -> &BTreeMap<String, Vec<String>> {
        &self.sorts
    }

    pub fn carrier(&self, sort: &str) -> Result<&[String]> {
        self.sorts
            .get(sort)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::SortMismatch(format!("unknown sort `{sort}`")))
    }

    pub fn element_index(&self, sort: &str, label: &str) -> Result<usize> {
        index_of(&self.sorts, sort, label)
    }

    pub fn table(&self, pred: &str) -> Result<&PredicateTable> {
        self.tables.get(pred).ok_or_else(|| Error::UnknownPredicate(pred.to_owned()))
    }

    /// The predicate's value at a tuple of carrier positions.
    pub fn value(&self, pred: &str, args: &[usize]) -> Result<&ValuePoint> {
        let t = self.table(pred)?;
        if args.len() != t.dims.len() {
            return Err(Error::Arity { name: pred.to_owned(), expected: t.dims.len(), got: args.len() });
        }
        for (&a, &d) in args.iter().zip(&t.dims) {
            if a >= d {
                return Err(Error::IndexOutOfRange { index: a, size: d });
            }
        }
        Ok(t.get(args))
    }
}

fn index_of(sorts: &BTreeMap<String, Vec<String>>, sort: &str, label: &str) -> Result<usize> {
    let carrier = sorts.get(sort).ok_or_else(|| Error::SortMismatch(format!("unknown sort `{sort}`")))?;
    carrier
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| Error::Input(format!("`{label}` is not an element of sort `{sort}`")))
}

#[derive(Deserialize, Serialize)]
struct RawStructure {
    sorts: BTreeMap<String, Vec<String>>,
    predicates: BTreeMap<String, RawPredicate>,
}

#[derive(Deserialize, Serialize)]
struct RawPredicate {
    #[serde(default)]
    sorts: Vec<String>,
    envelope: Value,
    #[serde(default)]
    modulus: Option<f64>,
    table: BTreeMap<String, Value>,
}

fn pair(v: &Value) -> Option<Interval> {
    let a = v.as_array()?;
    if a.len() != 2 {
        return None;
    }
    Interval::new(a[0].as_f64()?, a[1].as_f64()?).ok()
}

/// Reads an envelope in one of three forms: `[[lo, hi], ...]` for reals,
/// `{"boxes": [[[lo, hi], ...], ...]}` for vectors, and
/// `{"metric": [[...]], "indices": [...]}` for a finite metric space.
pub fn envelope_from_json(v: &Value) -> Result<CompactEnvelope> {
    let bad = || Error::Input(format!("unreadable envelope {v}"));
    if let Some(parts) = v.as_array() {
        return CompactEnvelope::real(parts.iter().map(pair).collect::<Option<Vec<_>>>().ok_or_else(bad)?);
    }
    if let Some(boxes) = v.get("boxes") {
        let boxes = boxes
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|b| b.as_array().and_then(|c| c.iter().map(pair).collect::<Option<Vec<_>>>()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(bad)?;
        return CompactEnvelope::boxes(boxes);
    }
    if let Some(m) = v.get("metric") {
        let rows: Vec<Vec<f64>> = serde_json::from_value(m.clone())?;
        let table = MetricTable::new(rows)?;
        let indices = match v.get("indices") {
            Some(ix) => serde_json::from_value(ix.clone())?,
            None => (0..table.len()).collect(),
        };
        return CompactEnvelope::finite(Arc::new(table), indices);
    }
    Err(bad())
}

fn envelope_to_json(e: &CompactEnvelope) -> Value {
    let iv = |i: &Interval| serde_json::json!([i.lo, i.hi]);
    match e {
        CompactEnvelope::Real { parts } => Value::Array(parts.iter().map(iv).collect()),
        CompactEnvelope::Boxes { boxes, .. } => serde_json::json!({
            "boxes": boxes.iter().map(|b| b.iter().map(iv).collect::<Vec<_>>()).collect::<Vec<_>>()
        }),
        CompactEnvelope::Finite { table, indices } => serde_json::json!({
            "metric": table.rows(),
            "indices": indices,
        }),
    }
}

fn point_from_json(v: &Value, env: &CompactEnvelope) -> Result<ValuePoint> {
    let p: ValuePoint = match env {
        CompactEnvelope::Finite { .. } => match v {
            Value::Number(n) => ValuePoint::Finite {
                index: n.as_u64().ok_or_else(|| Error::Input(format!("bad finite-metric index {v}")))? as usize,
            },
            _ => serde_json::from_value(v.clone())?,
        },
        _ => serde_json::from_value(v.clone())?,
    };
    match (&p, env) {
        (ValuePoint::Finite { .. }, CompactEnvelope::Finite { .. })
        | (ValuePoint::Real(_), CompactEnvelope::Real { .. })
        | (ValuePoint::Vector(_), CompactEnvelope::Boxes { .. }) => Ok(p),
        _ => Err(Error::KindMismatch(format!("value {v} does not match envelope {env}"))),
    }
}

impl RawStructure {
    fn build(self) -> Result<FiniteStructure> {
        let mut language = Language::default();
        let mut entries = BTreeMap::new();
        for (name, p) in self.predicates {
            let envelope = envelope_from_json(&p.envelope)?;
            let mut rows = Vec::with_capacity(p.table.len());
            for (key, v) in &p.table {
                let labels: Vec<String> = if p.sorts.is_empty() && key.is_empty() {
                    Vec::new()
                } else {
                    key.split(',').map(|s| s.trim().to_owned()).collect()
                };
                rows.push((labels, point_from_json(v, &envelope)?));
            }
            language.predicates.insert(
                name.clone(),
                PredicateSymbol { name: name.clone(), sorts: p.sorts, envelope, modulus: p.modulus },
            );
            entries.insert(name, rows);
        }
        FiniteStructure::new(self.sorts, language, entries)
    }
}
