//! Witness chains for the approximate order property and the exact
//! branch-and-bound search that finds them.
//!
//! A chain of length `k + 1` is a list of distinct (row, column) pairs
//! `(a_i, b_i)`. Its discrepancy matrix holds
//! `disc(i, j) = d(f(a_i, b_j), f(a_j, b_i))`, which is symmetric, so a plain
//! chain at level `eps` is exactly a `(k + 1)`-clique in the graph on pairs
//! whose edges have discrepancy at least `eps`.
//!
//! Searches visit chains whose pairs use pairwise distinct rows and columns
//! first, then all chains, each tier in lexicographic order of pair indices
//! (`a * |W| + b`). The first hit is returned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::WeightedBipartiteStructure;
use crate::value_space::ValuePoint;

/// Environment variable that overrides [`SearchLimits::max_pairs`].
pub const SIZE_GUARD_ENV: &str = "EPSLENS_SIZE_GUARD";

/// Caps for exact search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Maximum number of (row, column) pairs, i.e. `|V| * |W|`.
    pub max_pairs: usize,
    /// Maximum number of search nodes per exhaustive search.
    pub node_budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_pairs: 1024,
            node_budget: 200_000_000,
        }
    }
}

impl SearchLimits {
    /// Defaults, with `max_pairs` taken from `EPSLENS_SIZE_GUARD` when set.
    pub fn from_env() -> Self {
        let mut l = Self::default();
        if let Some(v) = std::env::var(SIZE_GUARD_ENV).ok().and_then(|s| s.trim().parse().ok()) {
            l.max_pairs = v;
        }
        l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ChainMode {
    Plain,
    /// Above-diagonal values within `delta` of `r`, below-diagonal within
    /// `delta` of `s`, with `d(r, s) >= eps`.
    BiConstant { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainKind {
    Plain,
    BiConstant {
        r: ValuePoint,
        s: ValuePoint,
        delta: f64,
        /// `d(r, s)`.
        witness: f64,
    },
}

/// Paired sequences `(a_i, b_i)` with their discrepancy data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessChain {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub kind: ChainKind,
    pub discrepancy: Vec<Vec<f64>>,
    pub min_discrepancy: f64,
}

impl WitnessChain {
    /// Builds a chain from explicit index sequences, computing its
    /// discrepancy data. Fails if the pairs are not pairwise distinct.
    pub fn from_indices(f: &WeightedBipartiteStructure, rows: Vec<usize>, cols: Vec<usize>, kind: ChainKind) -> Result<Self> {
        if rows.len() != cols.len() || rows.len() < 2 {
            return Err(Error::InvalidParameter("a chain needs two equally long sequences of length >= 2".into()));
        }
        for (&a, &b) in rows.iter().zip(&cols) {
            if a >= f.n_rows() {
                return Err(Error::IndexOutOfRange { index: a, size: f.n_rows() });
            }
            if b >= f.n_cols() {
                return Err(Error::IndexOutOfRange { index: b, size: f.n_cols() });
            }
        }
        let n = rows.len();
        for i in 0..n {
            for j in i + 1..n {
                if rows[i] == rows[j] && cols[i] == cols[j] {
                    return Err(Error::InvalidParameter(format!("repeated pair at positions {i} and {j}")));
                }
            }
        }
        let mut discrepancy = vec![vec![0.0; n]; n];
        let mut min_discrepancy = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let d = f.dist(f.get(rows[i], cols[j]), f.get(rows[j], cols[i]));
                discrepancy[i][j] = d;
                discrepancy[j][i] = d;
                min_discrepancy = min_discrepancy.min(d);
            }
        }
        Ok(WitnessChain {
            rows,
            cols,
            kind,
            discrepancy,
            min_discrepancy,
        })
    }

    /// Number of pairs, `k + 1`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The chain with rows and columns swapped, a chain of the transpose.
    pub fn transposed(&self) -> Self {
        WitnessChain {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            kind: self.kind.clone(),
            discrepancy: self.discrepancy.clone(),
            min_discrepancy: self.min_discrepancy,
        }
    }

    /// Re-checks the chain against `f` at level `epsilon`. With `strict`,
    /// discrepancies must exceed `epsilon`; otherwise they must reach it.
    pub fn verify(&self, f: &WeightedBipartiteStructure, epsilon: f64, strict: bool) -> std::result::Result<(), String> {
        let again = WitnessChain::from_indices(f, self.rows.clone(), self.cols.clone(), self.kind.clone()).map_err(|e| e.to_string())?;
        if again.discrepancy != self.discrepancy || again.min_discrepancy != self.min_discrepancy {
            return Err("stored discrepancy data does not match the table".into());
        }
        let ok = if strict {
            self.min_discrepancy > epsilon
        } else {
            self.min_discrepancy >= epsilon
        };
        if !ok {
            return Err(format!("minimum discrepancy {} below level {epsilon}", self.min_discrepancy));
        }
        if let ChainKind::BiConstant { r, s, delta, witness } = &self.kind {
            f.space().check(r).map_err(|e| e.to_string())?;
            f.space().check(s).map_err(|e| e.to_string())?;
            let d = f.dist(r, s);
            if d != *witness || d < epsilon {
                return Err(format!("d(r, s) = {d} does not witness level {epsilon}"));
            }
            let n = self.len();
            for i in 0..n {
                for j in i + 1..n {
                    if f.dist(f.get(self.rows[i], self.cols[j]), r) > *delta {
                        return Err(format!("f(a_{i}, b_{j}) is not within {delta} of r"));
                    }
                    if f.dist(f.get(self.rows[j], self.cols[i]), s) > *delta {
                        return Err(format!("f(a_{j}, b_{i}) is not within {delta} of s"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Result of a chain search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub chain: Option<WitnessChain>,
    /// True when absence of a chain is backed by exhaustive search.
    pub exhaustive: bool,
}

// ---------------------------------------------------------------------------
// bitsets

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub(crate) fn zeros(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    pub(crate) fn ones(n: usize) -> Self {
        let mut b = Self::zeros(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub(crate) fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub(crate) fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    pub(crate) fn and_not(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }

    pub(crate) fn or_assign(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }

    /// Keeps only indices strictly greater than `i`.
    pub(crate) fn above(&self, i: usize) -> Bits {
        let mut out = self.clone();
        let w = i / 64;
        for x in &mut out.0[..w] {
            *x = 0;
        }
        let bit = i % 64;
        out.0[w] &= if bit == 63 { 0 } else { !0u64 << (bit + 1) };
        out
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut x = word;
            std::iter::from_fn(move || {
                if x == 0 {
                    None
                } else {
                    let t = x.trailing_zeros() as usize;
                    x &= x - 1;
                    Some(w * 64 + t)
                }
            })
        })
    }

    pub(crate) fn first(&self) -> Option<usize> {
        self.iter().next()
    }
}

// ---------------------------------------------------------------------------
// plain search

/// Pairwise discrepancies between all (row, column) pairs of a structure.
pub struct PairGraph {
    n_pairs: usize,
    n_cols: usize,
    disc: Vec<f64>,
    conflicts: Vec<Bits>,
}

impl PairGraph {
    pub fn new(f: &WeightedBipartiteStructure, limits: &SearchLimits) -> Result<Self> {
        let n_cols = f.n_cols();
        let n_pairs = f.n_rows() * n_cols;
        if n_pairs > limits.max_pairs {
            return Err(Error::SizeGuard(format!(
                "{n_pairs} row/column pairs exceed the exact-search cap of {}",
                limits.max_pairs
            )));
        }
        let mut disc = vec![0.0; n_pairs * n_pairs];
        let mut conflicts = vec![Bits::zeros(n_pairs); n_pairs];
        for p in 0..n_pairs {
            let (ap, bp) = (p / n_cols, p % n_cols);
            for q in p + 1..n_pairs {
                let (aq, bq) = (q / n_cols, q % n_cols);
                let d = f.dist(f.get(ap, bq), f.get(aq, bp));
                disc[p * n_pairs + q] = d;
                disc[q * n_pairs + p] = d;
                if ap == aq || bp == bq {
                    conflicts[p].set(q);
                    conflicts[q].set(p);
                }
            }
        }
        Ok(PairGraph {
            n_pairs,
            n_cols,
            disc,
            conflicts,
        })
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    #[inline]
    pub fn disc(&self, p: usize, q: usize) -> f64 {
        self.disc[p * self.n_pairs + q]
    }

    pub fn pair(&self, p: usize) -> (usize, usize) {
        (p / self.n_cols, p % self.n_cols)
    }

    /// Distinct positive discrepancy values, increasing.
    pub fn realized_discrepancies(&self) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.n_pairs)
            .flat_map(|p| (p + 1..self.n_pairs).map(move |q| (p, q)))
            .map(|(p, q)| self.disc(p, q))
            .filter(|&d| d > 0.0)
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    fn adjacency(&self, epsilon: f64) -> Vec<Bits> {
        (0..self.n_pairs)
            .map(|p| {
                let mut b = Bits::zeros(self.n_pairs);
                for q in 0..self.n_pairs {
                    if q != p && self.disc(p, q) >= epsilon {
                        b.set(q);
                    }
                }
                b
            })
            .collect()
    }

    /// Lexicographically least `target`-clique at level `epsilon`, trying
    /// row- and column-injective chains first.
    pub fn find_chain(&self, epsilon: f64, target: usize, budget: u64) -> Result<Option<Vec<usize>>> {
        if target > self.n_pairs {
            return Ok(None);
        }
        let adj = self.adjacency(epsilon);
        let injective: Vec<Bits> = adj.iter().zip(&self.conflicts).map(|(a, c)| a.and_not(c)).collect();
        let mut nodes = 0u64;
        if let Some(c) = clique_search(&injective, self.n_pairs, target, budget, &mut nodes)? {
            return Ok(Some(c));
        }
        clique_search(&adj, self.n_pairs, target, budget, &mut nodes)
    }

    /// Whether any `target`-clique exists at level `epsilon`.
    pub fn exists_chain(&self, epsilon: f64, target: usize, budget: u64) -> Result<bool> {
        if target > self.n_pairs {
            return Ok(false);
        }
        let adj = self.adjacency(epsilon);
        let mut nodes = 0u64;
        Ok(clique_search(&adj, self.n_pairs, target, budget, &mut nodes)?.is_some())
    }

    /// Minimum discrepancy over all pairs of a set of pair indices.
    pub fn min_disc(&self, set: &[usize]) -> f64 {
        let mut m = f64::INFINITY;
        for (i, &p) in set.iter().enumerate() {
            for &q in &set[i + 1..] {
                m = m.min(self.disc(p, q));
            }
        }
        m
    }
}

/// Greedy colouring bound: number of colour classes needed for `cand`,
/// stopping once `cap` classes are reached.
fn colour_bound(adj: &[Bits], cand: &Bits, cap: usize) -> usize {
    let mut uncoloured = cand.clone();
    let mut colours = 0;
    while !uncoloured.is_empty() {
        colours += 1;
        if colours >= cap {
            return colours;
        }
        let mut q = uncoloured.clone();
        while let Some(v) = q.first() {
            uncoloured.clear(v);
            q.clear(v);
            q = q.and_not(&adj[v]);
        }
    }
    colours
}

fn clique_search(adj: &[Bits], n: usize, target: usize, budget: u64, nodes: &mut u64) -> Result<Option<Vec<usize>>> {
    fn rec(adj: &[Bits], cand: Bits, chosen: &mut Vec<usize>, target: usize, budget: u64, nodes: &mut u64) -> Result<bool> {
        if chosen.len() == target {
            return Ok(true);
        }
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::SizeGuard(format!("exact chain search exceeded {budget} nodes")));
        }
        let need = target - chosen.len();
        if cand.count() < need {
            return Ok(false);
        }
        if need > 2 && colour_bound(adj, &cand, need) < need {
            return Ok(false);
        }
        let verts: Vec<usize> = cand.iter().collect();
        for (k, &v) in verts.iter().enumerate() {
            if verts.len() - k < need {
                break;
            }
            let next = cand.and(&adj[v]).above(v);
            chosen.push(v);
            if rec(adj, next, chosen, target, budget, nodes)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
    let mut chosen = Vec::with_capacity(target);
    if rec(adj, Bits::ones(n), &mut chosen, target, budget, nodes)? {
        Ok(Some(chosen))
    } else {
        Ok(None)
    }
}

// ---------------------------------------------------------------------------
// bi-constant search

struct BiConstantSearch<'a> {
    f: &'a WeightedBipartiteStructure,
    n_pairs: usize,
    candidates: Vec<(ValuePoint, ValuePoint)>,
    /// after[c][p]: pairs q that may follow p under candidate c.
    after: Vec<Vec<Bits>>,
}

impl<'a> BiConstantSearch<'a> {
    fn new(f: &'a WeightedBipartiteStructure, epsilon: f64, delta: f64, limits: &SearchLimits) -> Result<Self> {
        let n_cols = f.n_cols();
        let n_pairs = f.n_rows() * n_cols;
        if n_pairs > limits.max_pairs {
            return Err(Error::SizeGuard(format!(
                "{n_pairs} row/column pairs exceed the exact-search cap of {}",
                limits.max_pairs
            )));
        }
        let values = f.realized_values();
        let mut candidates = Vec::new();
        for r in &values {
            for s in &values {
                if f.dist(r, s) >= epsilon {
                    candidates.push((r.clone(), s.clone()));
                }
            }
        }
        let after = candidates
            .iter()
            .map(|(r, s)| {
                (0..n_pairs)
                    .map(|p| {
                        let (ap, bp) = (p / n_cols, p % n_cols);
                        let mut b = Bits::zeros(n_pairs);
                        for q in 0..n_pairs {
                            let (aq, bq) = (q / n_cols, q % n_cols);
                            if q != p && f.dist(f.get(ap, bq), r) <= delta && f.dist(f.get(aq, bp), s) <= delta {
                                b.set(q);
                            }
                        }
                        b
                    })
                    .collect()
            })
            .collect();
        Ok(BiConstantSearch {
            f,
            n_pairs,
            candidates,
            after,
        })
    }

    fn search(&self, target: usize, injective: bool, budget: u64, nodes: &mut u64) -> Result<Option<(Vec<usize>, usize)>> {
        let n_cols = self.f.n_cols();
        let conflicts = |p: usize| {
            let (ap, bp) = (p / n_cols, p % n_cols);
            let mut b = Bits::zeros(self.n_pairs);
            for q in 0..self.n_pairs {
                if q / n_cols == ap || q % n_cols == bp {
                    b.set(q);
                }
            }
            b
        };
        #[allow(clippy::too_many_arguments)]
        fn rec(
            s: &BiConstantSearch<'_>,
            live: Vec<(usize, Bits)>,
            chosen: &mut Vec<usize>,
            target: usize,
            injective: bool,
            conflicts: &dyn Fn(usize) -> Bits,
            budget: u64,
            nodes: &mut u64,
        ) -> Result<Option<usize>> {
            if chosen.len() == target {
                return Ok(Some(live[0].0));
            }
            *nodes += 1;
            if *nodes > budget {
                return Err(Error::SizeGuard(format!("exact chain search exceeded {budget} nodes")));
            }
            let mut union = Bits::zeros(s.n_pairs);
            for (_, c) in &live {
                union.or_assign(c);
            }
            for q in union.iter() {
                let block = if injective { Some(conflicts(q)) } else { None };
                let need = target - chosen.len() - 1;
                let next: Vec<(usize, Bits)> = live
                    .iter()
                    .filter(|(_, c)| c.get(q))
                    .map(|(ci, c)| {
                        let mut n = c.and(&s.after[*ci][q]);
                        n.clear(q);
                        if let Some(b) = &block {
                            n = n.and_not(b);
                        }
                        (*ci, n)
                    })
                    .filter(|(_, n)| n.count() >= need)
                    .collect();
                if next.is_empty() {
                    continue;
                }
                chosen.push(q);
                if let Some(c) = rec(s, next, chosen, target, injective, conflicts, budget, nodes)? {
                    return Ok(Some(c));
                }
                chosen.pop();
            }
            Ok(None)
        }
        if target > self.n_pairs || self.candidates.is_empty() {
            return Ok(None);
        }
        let live: Vec<(usize, Bits)> = (0..self.candidates.len()).map(|c| (c, Bits::ones(self.n_pairs))).collect();
        let mut chosen = Vec::new();
        let found = rec(self, live, &mut chosen, target, injective, &conflicts, budget, nodes)?;
        Ok(found.map(|c| (chosen, c)))
    }
}

fn validate(epsilon: f64, k: usize, mode: &ChainMode) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if let ChainMode::BiConstant { delta } = mode {
        if !(delta.is_finite() && *delta >= 0.0) {
            return Err(Error::InvalidParameter(format!("delta must be nonnegative, got {delta}")));
        }
    }
    Ok(())
}

/// Searches for a chain of length `k + 1` witnessing the order property at
/// level `epsilon`.
pub fn detect_chain(
    f: &WeightedBipartiteStructure,
    epsilon: f64,
    k: usize,
    mode: ChainMode,
    search: SearchMode,
    limits: &SearchLimits,
) -> Result<Detection> {
    validate(epsilon, k, &mode)?;
    let target = k + 1;
    match (mode, search) {
        (ChainMode::Plain, SearchMode::Exact) => {
            let g = PairGraph::new(f, limits)?;
            let found = g.find_chain(epsilon, target, limits.node_budget)?;
            let chain = found.map(|set| chain_from_pairs(f, &g, &set, ChainKind::Plain)).transpose()?;
            Ok(Detection { chain, exhaustive: true })
        }
        (ChainMode::Plain, SearchMode::Heuristic) => {
            let g = PairGraph::new(f, &SearchLimits { max_pairs: usize::MAX, ..*limits })?;
            let best = greedy_chain(&g, target, 0);
            let chain = match best {
                Some(set) if g.min_disc(&set) >= epsilon => Some(chain_from_pairs(f, &g, &set, ChainKind::Plain)?),
                _ => None,
            };
            Ok(Detection { chain, exhaustive: false })
        }
        (ChainMode::BiConstant { delta }, search) => {
            let budget = match search {
                SearchMode::Exact => limits.node_budget,
                SearchMode::Heuristic => limits.node_budget.min(100_000),
            };
            let s = BiConstantSearch::new(f, epsilon, delta, limits)?;
            let mut nodes = 0;
            let run = |injective: bool, nodes: &mut u64| match s.search(target, injective, budget, nodes) {
                Err(Error::SizeGuard(_)) if search == SearchMode::Heuristic => Ok((None, false)),
                other => other.map(|r| (r, true)),
            };
            let (mut found, mut exhaustive) = run(true, &mut nodes)?;
            if found.is_none() {
                (found, exhaustive) = run(false, &mut nodes)?;
            }
            let chain = match found {
                Some((seq, c)) => {
                    let (r, s_) = s.candidates[c].clone();
                    let witness = f.dist(&r, &s_);
                    let n_cols = f.n_cols();
                    Some(WitnessChain::from_indices(
                        f,
                        seq.iter().map(|p| p / n_cols).collect(),
                        seq.iter().map(|p| p % n_cols).collect(),
                        ChainKind::BiConstant { r, s: s_, delta, witness },
                    )?)
                }
                None => None,
            };
            Ok(Detection {
                chain,
                exhaustive: exhaustive && search == SearchMode::Exact,
            })
        }
    }
}

pub(crate) fn chain_from_pairs(f: &WeightedBipartiteStructure, g: &PairGraph, set: &[usize], kind: ChainKind) -> Result<WitnessChain> {
    let (rows, cols) = set.iter().map(|&p| g.pair(p)).unzip();
    WitnessChain::from_indices(f, rows, cols, kind)
}

/// Greedy chain of `target` pairs maximizing the minimum discrepancy,
/// seeded from every pair and improved by single-pair swaps.
pub(crate) fn greedy_chain(g: &PairGraph, target: usize, seed: u64) -> Option<Vec<usize>> {
    let n = g.n_pairs();
    if target > n {
        return None;
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let offset = (seed as usize) % n.max(1);
    for s in 0..n {
        let start = (s + offset) % n;
        let mut set = vec![start];
        let mut cur_min = vec![f64::INFINITY; n];
        for q in 0..n {
            cur_min[q] = if q == start { f64::NEG_INFINITY } else { g.disc(start, q) };
        }
        while set.len() < target {
            let (q, _) = cur_min
                .iter()
                .enumerate()
                .filter(|(q, _)| !set.contains(q))
                .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))?;
            set.push(q);
            for (r, m) in cur_min.iter_mut().enumerate() {
                *m = m.min(if r == q { f64::NEG_INFINITY } else { g.disc(q, r) });
            }
        }
        let mut val = g.min_disc(&set);
        // single swaps
        let mut improved = true;
        while improved {
            improved = false;
            'outer: for i in 0..set.len() {
                for q in 0..n {
                    if set.contains(&q) {
                        continue;
                    }
                    let old = set[i];
                    set[i] = q;
                    let v = g.min_disc(&set);
                    if v > val {
                        val = v;
                        improved = true;
                        break 'outer;
                    }
                    set[i] = old;
                }
            }
        }
        if best.as_ref().is_none_or(|(b, _)| val > *b) {
            let mut sorted = set.clone();
            sorted.sort_unstable();
            best = Some((val, sorted));
        }
    }
    best.map(|(_, s)| s)
}
