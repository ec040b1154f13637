use std::collections::BTreeMap;

use crate::envelope::{CompactEnvelope, Connective};
use crate::error::{Error, Result};
use crate::matrix::WeightedBipartiteStructure;
use crate::value_space::{diameter, ValuePoint, ValueSpace};

use super::ast::{Formula, FormulaKind, Term, Variable};
use super::structure::{for_each_tuple, FiniteStructure};

/// The value space a formula's values live in, read off its envelope.
pub fn envelope_space(e: &CompactEnvelope) -> ValueSpace {
    match e {
        CompactEnvelope::Real { .. } => ValueSpace::Real,
        CompactEnvelope::Boxes { dim, .. } => ValueSpace::SupVector { dim: *dim },
        CompactEnvelope::Finite { table, .. } => ValueSpace::FiniteMetric { table: table.clone() },
    }
}

struct Env<'a> {
    s: &'a FiniteStructure,
    // innermost binding last
    bindings: Vec<(&'a str, usize)>,
}

impl<'a> Env<'a> {
    fn lookup(&self, name: &str) -> Result<usize> {
        self.bindings
            .iter()
            .rev()
            .find(|(n, _)| *n == name)
            .map(|&(_, i)| i)
            .ok_or_else(|| Error::UnassignedVariable(name.to_owned()))
    }

    fn eval(&mut self, f: &'a Formula) -> Result<ValuePoint> {
        match &f.kind {
            FormulaKind::Atomic { pred, args } => {
                let sym = self.s.language().get(pred)?;
                let idx = args
                    .iter()
                    .zip(&sym.sorts)
                    .map(|(t, sort)| match t {
                        Term::Var(v) => self.lookup(v),
                        Term::Element(l) => self.s.element_index(sort, l),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(self.s.value(pred, &idx)?.clone())
            }
            FormulaKind::Apply { op, args } => {
                let vals = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>>>()?;
                let metric = match (op, args.first().map(|a| &a.envelope)) {
                    (Connective::Dist, Some(CompactEnvelope::Finite { table, .. })) => Some(table.as_ref()),
                    _ => None,
                };
                op.apply(&vals, metric)
            }
            FormulaKind::Sup { var, body } => self.quantify(var, body, true),
            FormulaKind::Inf { var, body } => self.quantify(var, body, false),
        }
    }

    fn quantify(&mut self, var: &'a Variable, body: &'a Formula, sup: bool) -> Result<ValuePoint> {
        let Some(sort) = &var.sort else {
            // the variable does not occur in the body
            return self.eval(body);
        };
        let n = self.s.carrier(sort)?.len();
        let mut best = if sup { f64::NEG_INFINITY } else { f64::INFINITY };
        for i in 0..n {
            self.bindings.push((&var.name, i));
            let v = self.eval(body);
            self.bindings.pop();
            let v = v?.as_real().ok_or_else(|| Error::KindMismatch("quantified body is not real".into()))?;
            best = if sup { best.max(v) } else { best.min(v) };
        }
        Ok(ValuePoint::Real(best))
    }
}

fn resolve<'a>(f: &'a Formula, s: &FiniteStructure, valuation: &BTreeMap<String, String>) -> Result<Vec<(&'a str, usize)>> {
    f.free_vars
        .iter()
        .map(|v| {
            let label = valuation.get(&v.name).ok_or_else(|| Error::UnassignedVariable(v.name.clone()))?;
            let sort = v.sort.as_deref().expect("free variables always carry a sort");
            Ok((v.name.as_str(), s.element_index(sort, label)?))
        })
        .collect()
}

fn eval_indexed<'a>(f: &'a Formula, s: &'a FiniteStructure, bindings: Vec<(&'a str, usize)>) -> Result<ValuePoint> {
    Env { s, bindings }.eval(f)
}

/// Evaluates `f` in `s` at the assignment of free variables to element
/// labels. Extra entries in the valuation are ignored.
pub fn evaluate_formula(f: &Formula, s: &FiniteStructure, valuation: &BTreeMap<String, String>) -> Result<ValuePoint> {
    check_language(f, s)?;
    eval_indexed(f, s, resolve(f, s, valuation)?)
}

fn check_language(f: &Formula, s: &FiniteStructure) -> Result<()> {
    match &f.kind {
        FormulaKind::Atomic { pred, args } => {
            let sym = s.language().get(pred)?;
            if sym.sorts.len() != args.len() {
                return Err(Error::Arity { name: pred.clone(), expected: sym.sorts.len(), got: args.len() });
            }
            Ok(())
        }
        FormulaKind::Apply { args, .. } => args.iter().try_for_each(|a| check_language(a, s)),
        FormulaKind::Sup { var, body } | FormulaKind::Inf { var, body } => {
            if let Some(sort) = &var.sort {
                s.carrier(sort)?;
            }
            check_language(body, s)
        }
    }
}

fn all_values(f: &Formula, s: &FiniteStructure) -> Result<Vec<ValuePoint>> {
    check_language(f, s)?;
    let sorts: Vec<&str> = f.free_vars.iter().map(|v| v.sort.as_deref().unwrap_or_default()).collect();
    let dims = sorts.iter().map(|so| s.carrier(so).map(<[String]>::len)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for_each_tuple(&dims, |t| {
        let b = f.free_vars.iter().zip(t).map(|(v, &i)| (v.name.as_str(), i)).collect();
        out.push(eval_indexed(f, s, b)?);
        Ok(())
    })?;
    Ok(out)
}

/// `max d(f(a), f(b))` over all pairs of assignments to the free variables;
/// zero for sentences.
pub fn diam_structure(f: &Formula, s: &FiniteStructure) -> Result<f64> {
    Ok(diameter(&envelope_space(&f.envelope), &all_values(f, s)?))
}

/// Resolves `name` or `name:sort` specifications of a variable tuple
/// against the formula's free variables.
pub fn tuple_spec(f: &Formula, specs: &[&str]) -> Result<Vec<(String, String)>> {
    specs
        .iter()
        .map(|spec| match spec.split_once(':') {
            Some((n, so)) => {
                if let Some(v) = f.free_var(n) {
                    if v.sort.as_deref() != Some(so) {
                        return Err(Error::SortMismatch(format!("`{n}` has sort {:?}, not `{so}`", v.sort)));
                    }
                }
                Ok((n.to_owned(), so.to_owned()))
            }
            None => {
                let v = f
                    .free_var(spec)
                    .ok_or_else(|| Error::InvalidParameter(format!("`{spec}` is not free in the formula; write `{spec}:Sort`")))?;
                Ok(((*spec).to_owned(), v.sort.clone().unwrap_or_default()))
            }
        })
        .collect()
}

/// Tabulates `f(x; y)` with rows indexed by the `x` tuple and columns by the
/// `y` tuple. Each tuple entry is `(variable, sort)`; tuple labels join the
/// element labels with `|`.
pub fn materialize_matrix(
    f: &Formula,
    s: &FiniteStructure,
    x: &[(String, String)],
    y: &[(String, String)],
) -> Result<WeightedBipartiteStructure> {
    check_language(f, s)?;
    let mut seen = BTreeMap::new();
    for (n, so) in x.iter().chain(y) {
        if seen.insert(n.as_str(), so.as_str()).is_some() {
            return Err(Error::InvalidParameter(format!("variable `{n}` appears twice in the partition")));
        }
        if let Some(v) = f.free_var(n) {
            if v.sort.as_deref() != Some(so.as_str()) {
                return Err(Error::SortMismatch(format!("`{n}` has sort {:?}, not `{so}`", v.sort)));
            }
        }
    }
    let leftover: Vec<&str> = f.free_vars.iter().map(|v| v.name.as_str()).filter(|n| !seen.contains_key(n)).collect();
    if !leftover.is_empty() {
        return Err(Error::InvalidParameter(format!("free variables not in the partition: {}", leftover.join(", "))));
    }
    let tuples = |part: &[(String, String)]| -> Result<(Vec<Vec<usize>>, Vec<String>)> {
        let dims = part.iter().map(|(_, so)| s.carrier(so).map(<[String]>::len)).collect::<Result<Vec<_>>>()?;
        let (mut idx, mut labels) = (Vec::new(), Vec::new());
        for_each_tuple(&dims, |t| {
            let l: Vec<&str> = t.iter().zip(part).map(|(&i, (_, so))| s.sorts()[so][i].as_str()).collect();
            labels.push(l.join("|"));
            idx.push(t.to_vec());
            Ok(())
        })?;
        Ok((idx, labels))
    };
    let (xi, xl) = tuples(x)?;
    let (yi, yl) = tuples(y)?;
    let mut values = Vec::with_capacity(xi.len() * yi.len());
    for a in &xi {
        for b in &yi {
            let bind = x
                .iter()
                .zip(a)
                .chain(y.iter().zip(b))
                .map(|((n, _), &i)| (n.as_str(), i))
                .collect();
            values.push(eval_indexed(f, s, bind)?);
        }
    }
    WeightedBipartiteStructure::new(xl, yl, values, envelope_space(&f.envelope))
}
