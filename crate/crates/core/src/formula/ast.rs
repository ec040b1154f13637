use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::envelope::{envelope_propagate, CompactEnvelope, Connective};
use crate::error::{Error, Result};

/// A predicate symbol with its argument sorts and value envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateSymbol {
    pub name: String,
    pub sorts: Vec<String>,
    pub envelope: CompactEnvelope,
    /// Declared modulus of uniform continuity. Kept as metadata only: it
    /// carries no constraint on a finite structure.
    pub modulus: Option<f64>,
}

/// Predicate declarations.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Language {
    pub predicates: BTreeMap<String, PredicateSymbol>,
}

impl Language {
    pub fn declare(&mut self, name: &str, sorts: &[&str], envelope: CompactEnvelope) -> &mut Self {
        self.predicates.insert(
            name.to_owned(),
            PredicateSymbol {
                name: name.to_owned(),
                sorts: sorts.iter().map(|s| (*s).to_owned()).collect(),
                envelope,
                modulus: None,
            },
        );
        self
    }

    pub fn get(&self, name: &str) -> Result<&PredicateSymbol> {
        self.predicates.get(name).ok_or_else(|| Error::UnknownPredicate(name.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    /// A named element of the carrier, written `@label`.
    Element(String),
}

/// A variable together with its inferred sort. Bound variables that never
/// occur in their body have no sort.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub sort: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FormulaKind {
    Atomic { pred: String, args: Vec<Term> },
    Apply { op: Connective, args: Vec<Formula> },
    Sup { var: Variable, body: Box<Formula> },
    Inf { var: Variable, body: Box<Formula> },
}

/// A formula with its cached envelope and free variables (in order of
/// first occurrence).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Formula {
    pub kind: FormulaKind,
    pub envelope: CompactEnvelope,
    pub free_vars: Vec<Variable>,
}

fn merge_vars(into: &mut Vec<Variable>, from: &[Variable]) -> Result<()> {
    for v in from {
        match into.iter().find(|w| w.name == v.name) {
            Some(w) if w.sort != v.sort => {
                return Err(Error::SortMismatch(format!(
                    "variable `{}` used with sorts {:?} and {:?}",
                    v.name, w.sort, v.sort
                )))
            }
            Some(_) => {}
            None => into.push(v.clone()),
        }
    }
    Ok(())
}

impl Formula {
    pub fn atomic(lang: &Language, pred: &str, args: Vec<Term>) -> Result<Self> {
        let sym = lang.get(pred)?;
        if sym.sorts.len() != args.len() {
            return Err(Error::Arity {
                name: pred.to_owned(),
                expected: sym.sorts.len(),
                got: args.len(),
            });
        }
        let mut free_vars = Vec::new();
        for (t, sort) in args.iter().zip(&sym.sorts) {
            if let Term::Var(name) = t {
                merge_vars(&mut free_vars, &[Variable { name: name.clone(), sort: Some(sort.clone()) }])?;
            }
        }
        Ok(Formula {
            kind: FormulaKind::Atomic { pred: pred.to_owned(), args },
            envelope: sym.envelope.clone(),
            free_vars,
        })
    }

    pub fn apply(op: Connective, args: Vec<Formula>) -> Result<Self> {
        let envs: Vec<CompactEnvelope> = args.iter().map(|a| a.envelope.clone()).collect();
        let envelope = envelope_propagate(&op, &envs)?;
        let mut free_vars = Vec::new();
        for a in &args {
            merge_vars(&mut free_vars, &a.free_vars)?;
        }
        Ok(Formula {
            kind: FormulaKind::Apply { op, args },
            envelope,
            free_vars,
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("constant {c} is not finite")));
        }
        Self::apply(Connective::Const(c), vec![])
    }

    fn quantify(var: &str, body: Formula, sup: bool) -> Result<Self> {
        if !body.envelope.is_nonnegative_real() {
            return Err(Error::QuantifierGuard(body.envelope.to_string()));
        }
        let sort = body.free_vars.iter().find(|v| v.name == var).and_then(|v| v.sort.clone());
        let free_vars = body.free_vars.iter().filter(|v| v.name != var).cloned().collect();
        let envelope = body.envelope.clone();
        let var = Variable { name: var.to_owned(), sort };
        let body = Box::new(body);
        Ok(Formula {
            kind: if sup { FormulaKind::Sup { var, body } } else { FormulaKind::Inf { var, body } },
            envelope,
            free_vars,
        })
    }

    /// `sup_var body`; the body must take values in `[0, inf)`.
    pub fn sup(var: &str, body: Formula) -> Result<Self> {
        Self::quantify(var, body, true)
    }

    /// `inf_var body`; the body must take values in `[0, inf)`.
    pub fn inf(var: &str, body: Formula) -> Result<Self> {
        Self::quantify(var, body, false)
    }

    /// The envelope recomputed from the leaves.
    pub fn infer_envelope(&self, lang: &Language) -> Result<CompactEnvelope> {
        match &self.kind {
            FormulaKind::Atomic { pred, .. } => Ok(lang.get(pred)?.envelope.clone()),
            FormulaKind::Apply { op, args } => {
                let envs = args.iter().map(|a| a.infer_envelope(lang)).collect::<Result<Vec<_>>>()?;
                envelope_propagate(op, &envs)
            }
            FormulaKind::Sup { body, .. } | FormulaKind::Inf { body, .. } => body.infer_envelope(lang),
        }
    }

    pub fn free_var(&self, name: &str) -> Option<&Variable> {
        self.free_vars.iter().find(|v| v.name == name)
    }
}

/// The envelope of a formula, recomputed recursively.
pub fn infer_envelope(f: &Formula, lang: &Language) -> Result<CompactEnvelope> {
    f.infer_envelope(lang)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Element(e) => write!(f, "@{e}"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FormulaKind::Atomic { pred, args } => {
                let a: Vec<String> = args.iter().map(ToString::to_string).collect();
                write!(f, "{pred}({})", a.join(", "))
            }
            FormulaKind::Apply { op, args } => {
                let a: Vec<String> = args.iter().map(ToString::to_string).collect();
                match op {
                    Connective::Const(c) => write!(f, "{c}"),
                    Connective::Scale(r) => write!(f, "scale[{r}]({})", a.join(", ")),
                    Connective::Proj(i) => write!(f, "proj[{i}]({})", a.join(", ")),
                    _ => write!(f, "{}({})", op.name(), a.join(", ")),
                }
            }
            FormulaKind::Sup { var, body } => write!(f, "sup {} . {body}", var.name),
            FormulaKind::Inf { var, body } => write!(f, "inf {} . {body}", var.name),
        }
    }
}
