use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value_space::MetricTable;

/// Largest closed-set family the closure computation will build.
pub const FAMILY_CAP: usize = 1 << 16;

/// A subset of the points of a finite space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointSet(Vec<u64>);

impl PointSet {
    pub fn empty(n: usize) -> Self {
        PointSet(vec![0; n.div_ceil(64).max(1)])
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in idx {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn union(&self, o: &Self) -> Self {
        PointSet(self.0.iter().zip(&o.0).map(|(a, b)| a | b).collect())
    }

    pub fn intersection(&self, o: &Self) -> Self {
        PointSet(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    pub fn difference(&self, o: &Self) -> Self {
        PointSet(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }

    pub fn is_subset(&self, o: &Self) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b))
    }
}

/// A finite set with a metric and a family of closed sets.
#[derive(Debug, Clone, PartialEq)]
pub struct TopometricSpace {
    labels: Vec<String>,
    metric: MetricTable,
    /// The closed sets, or `None` for the discrete topology.
    closed: Option<Vec<PointSet>>,
}

#[derive(Deserialize, Serialize)]
struct RawSpace {
    points: Vec<String>,
    metric: Vec<Vec<f64>>,
    #[serde(default)]
    closed_generators: Option<Vec<Vec<String>>>,
}

impl TopometricSpace {
    /// Closes the generators under finite unions and intersections and adds
    /// the empty set and the whole space.
    pub fn new(labels: Vec<String>, metric: MetricTable, generators: &[PointSet]) -> Result<Self> {
        let n = labels.len();
        if metric.len() != n {
            return Err(Error::ShapeMismatch(format!("{n} points but a {}-point metric", metric.len())));
        }
        let mut family: Vec<PointSet> = vec![PointSet::empty(n), PointSet::full(n)];
        let mut seen: HashSet<PointSet> = family.iter().cloned().collect();
        for g in generators {
            if g.0.len() != PointSet::empty(n).0.len() || g.iter().any(|i| i >= n) {
                return Err(Error::InvalidParameter("closed generator mentions a point outside the space".into()));
            }
            if seen.insert(g.clone()) {
                family.push(g.clone());
            }
        }
        // each new set is combined with every set so far, so the result is
        // closed once the frontier is exhausted
        let mut k = 0;
        while k < family.len() {
            let s = family[k].clone();
            for j in 0..k {
                for t in [s.union(&family[j]), s.intersection(&family[j])] {
                    if seen.insert(t.clone()) {
                        if family.len() >= FAMILY_CAP {
                            return Err(Error::SizeGuard(format!("closed-set family exceeds {FAMILY_CAP} sets")));
                        }
                        family.push(t);
                    }
                }
            }
            k += 1;
        }
        family.sort_by_key(|s| (s.len(), s.clone()));
        Ok(TopometricSpace { labels, metric, closed: Some(family) })
    }

    /// The discrete topology: every set is closed.
    pub fn discrete(labels: Vec<String>, metric: MetricTable) -> Result<Self> {
        if metric.len() != labels.len() {
            return Err(Error::ShapeMismatch(format!("{} points but a {}-point metric", labels.len(), metric.len())));
        }
        Ok(TopometricSpace { labels, metric, closed: None })
    }

    /// Reads `{"points": [...], "metric": [[...]], "closed_generators":
    /// [[labels]]}`. Without generators the topology would be discrete,
    /// which makes the analysis trivial, so that is refused unless
    /// `force_discrete` is set.
    pub fn from_json_str(text: &str, force_discrete: bool) -> Result<Self> {
        let raw: RawSpace = serde_json::from_str(text)?;
        let metric = MetricTable::new(raw.metric)?;
        let n = raw.points.len();
        let index: BTreeMap<&str, usize> = raw.points.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if index.len() != n {
            return Err(Error::Input("point labels must be distinct".into()));
        }
        match raw.closed_generators {
            Some(gens) => {
                let gens = gens
                    .iter()
                    .map(|g| {
                        g.iter()
                            .map(|l| index.get(l.as_str()).copied().ok_or_else(|| Error::Input(format!("unknown point `{l}`"))))
                            .collect::<Result<Vec<_>>>()
                            .map(|ix| PointSet::from_indices(n, ix))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::new(raw.points, metric, &gens)
            }
            None if force_discrete => Self::discrete(raw.points, metric),
            None => Err(Error::InvalidParameter(
                "no closed_generators given; the discrete topology makes every point rank 0 (force it to proceed)".into(),
            )),
        }
    }

    /// The JSON form read by [`TopometricSpace::from_json_str`], listing
    /// the whole closed family as generators.
    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = RawSpace {
            points: self.labels.clone(),
            metric: self.metric.rows(),
            closed_generators: self.closed.as_ref().map(|fam| {
                fam.iter().map(|s| s.iter().map(|i| self.labels[i].clone()).collect()).collect()
            }),
        };
        serde_json::to_value(raw).expect("plain data serializes")
    }

    pub fn from_json_path(path: impl AsRef<Path>, force_discrete: bool) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?, force_discrete)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn metric(&self) -> &MetricTable {
        &self.metric
    }

    pub fn is_discrete(&self) -> bool {
        self.closed.is_none()
    }

    /// The closed sets, or `None` for the discrete topology.
    pub fn closed_sets(&self) -> Option<&[PointSet]> {
        self.closed.as_deref()
    }

    /// Diameter of a subset, zero for the empty set.
    pub fn diameter(&self, s: &PointSet) -> f64 {
        let pts: Vec<usize> = s.iter().collect();
        let mut d: f64 = 0.0;
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                d = d.max(self.metric.get(a, b));
            }
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CBReport {
    pub epsilon: f64,
    /// `X`, then each derivative, ending at the fixpoint; as point labels.
    pub derivatives: Vec<Vec<String>>,
    /// Rank of each point, `None` for points of the kernel.
    pub ranks: Vec<Option<usize>>,
    pub kernel: Vec<String>,
    pub analyzable: bool,
    pub family_size: Option<usize>,
}

/// One derivative step: `y` minus the union of its relatively open subsets
/// `y \ C` (for closed `C`) of diameter at most `epsilon`.
pub fn cb_derivative(space: &TopometricSpace, y: &PointSet, epsilon: f64) -> PointSet {
    match &space.closed {
        // singletons are open and have diameter 0
        None => PointSet::empty(space.len()),
        Some(family) => {
            let mut removed = PointSet::empty(space.len());
            for c in family {
                let u = y.difference(c);
                if !u.is_subset(&removed) && space.diameter(&u) <= epsilon {
                    removed = removed.union(&u);
                }
            }
            y.difference(&removed)
        }
    }
}

/// Iterates the epsilon-derivative from the whole space to its fixpoint.
pub fn cb_analyze(space: &TopometricSpace, epsilon: f64) -> Result<CBReport> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be nonnegative")));
    }
    let n = space.len();
    let names = |s: &PointSet| s.iter().map(|i| space.labels[i].clone()).collect::<Vec<_>>();
    let mut ranks = vec![None; n];
    let mut y = PointSet::full(n);
    let mut derivatives = vec![names(&y)];
    for alpha in 0..=n {
        let next = cb_derivative(space, &y, epsilon);
        if next == y {
            break;
        }
        for i in y.difference(&next).iter() {
            ranks[i] = Some(alpha);
        }
        derivatives.push(names(&next));
        y = next;
    }
    Ok(CBReport {
        epsilon,
        derivatives,
        ranks,
        kernel: names(&y),
        analyzable: y.is_empty(),
        family_size: space.closed.as_ref().map(Vec::len),
    })
}
