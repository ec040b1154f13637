use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::WeightedBipartiteStructure;

use super::fixture::row_distance;

/// Largest number of distinct rows the exact cover search accepts.
pub const EXACT_COVER_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMethod {
    Exact,
    Greedy,
}

/// A covering of the rows by parts of sup-metric diameter at most
/// `2 epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub epsilon: f64,
    pub method: CoverMethod,
    pub parts: Vec<Vec<usize>>,
    pub diameters: Vec<f64>,
}

impl Cover {
    pub fn count(&self) -> usize {
        self.parts.len()
    }

    /// Re-checks that the parts cover every row and have small diameter.
    pub fn verify(&self, f: &WeightedBipartiteStructure) -> std::result::Result<(), String> {
        let mut seen = vec![false; f.n_rows()];
        for (k, part) in self.parts.iter().enumerate() {
            let mut d: f64 = 0.0;
            for (i, &a) in part.iter().enumerate() {
                if a >= f.n_rows() {
                    return Err(format!("part {k} names row {a}, out of range"));
                }
                seen[a] = true;
                for &c in &part[i + 1..] {
                    d = d.max(row_distance(f, a, c));
                }
            }
            if d > 2.0 * self.epsilon {
                return Err(format!("part {k} has diameter {d} > {}", 2.0 * self.epsilon));
            }
            if self.diameters.get(k) != Some(&d) {
                return Err(format!("part {k}: recorded diameter does not match {d}"));
            }
        }
        match seen.iter().position(|s| !s) {
            Some(a) => Err(format!("row {a} is not covered")),
            None => Ok(()),
        }
    }
}

/// Groups identical rows; returns one representative per group and the
/// groups themselves.
fn distinct_rows(f: &WeightedBipartiteStructure) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut reps: Vec<usize> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for a in 0..f.n_rows() {
        match reps.iter().position(|&r| f.row(r) == f.row(a)) {
            Some(k) => groups[k].push(a),
            None => {
                reps.push(a);
                groups.push(vec![a]);
            }
        }
    }
    (reps, groups)
}

/// Covers the rows of `f` by parts of diameter at most `2 epsilon`. The exact
/// method finds the fewest parts (a minimum clique cover of the "within
/// `2 epsilon`" graph on distinct rows); the greedy one grows each part from
/// the first uncovered row.
pub fn cover_rows(f: &WeightedBipartiteStructure, epsilon: f64, method: CoverMethod) -> Result<Cover> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    let (reps, groups) = distinct_rows(f);
    let n = reps.len();
    let close: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| row_distance(f, reps[i], reps[j]) <= 2.0 * epsilon).collect())
        .collect();
    let rep_parts: Vec<Vec<usize>> = match method {
        CoverMethod::Exact => {
            if n > EXACT_COVER_LIMIT {
                return Err(Error::SizeGuard(format!(
                    "exact cover handles at most {EXACT_COVER_LIMIT} distinct rows, got {n}"
                )));
            }
            exact_parts(&close)
        }
        CoverMethod::Greedy => {
            let mut covered = vec![false; n];
            let mut parts = Vec::new();
            for i in 0..n {
                if covered[i] {
                    continue;
                }
                let mut part = vec![i];
                covered[i] = true;
                for j in i + 1..n {
                    if !covered[j] && part.iter().all(|&k| close[k][j]) {
                        part.push(j);
                        covered[j] = true;
                    }
                }
                parts.push(part);
            }
            parts
        }
    };
    let parts: Vec<Vec<usize>> = rep_parts
        .iter()
        .map(|p| {
            let mut rows: Vec<usize> = p.iter().flat_map(|&k| groups[k].iter().copied()).collect();
            rows.sort_unstable();
            rows
        })
        .collect();
    let diameters = parts
        .iter()
        .map(|p| {
            let mut d: f64 = 0.0;
            for (i, &a) in p.iter().enumerate() {
                for &c in &p[i + 1..] {
                    d = d.max(row_distance(f, a, c));
                }
            }
            d
        })
        .collect();
    Ok(Cover { epsilon, method, parts, diameters })
}

fn exact_parts(close: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = close.len();
    let full = (1usize << n) - 1;
    let clique: Vec<bool> = (0..=full)
        .map(|s| (0..n).filter(|&i| s >> i & 1 == 1).all(|i| (i + 1..n).filter(|&j| s >> j & 1 == 1).all(|j| close[i][j])))
        .collect();
    // best[s] = fewest cliques covering s, with the part holding the lowest element
    let mut best = vec![usize::MAX; full + 1];
    let mut choice = vec![0usize; full + 1];
    best[0] = 0;
    for s in 1..=full {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        // enumerate submasks t of rest; the part is t | low
        let mut t = rest;
        loop {
            let part = t | low;
            if clique[part] && best[s ^ part] != usize::MAX && best[s ^ part] + 1 < best[s] {
                best[s] = best[s ^ part] + 1;
                choice[s] = part;
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & rest;
        }
    }
    let mut parts = Vec::new();
    let mut s = full;
    while s != 0 {
        let part = choice[s];
        parts.push((0..n).filter(|&i| part >> i & 1 == 1).collect());
        s ^= part;
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_space_fits() {
        let f = WeightedBipartiteStructure::from_real_rows(&[vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        for m in [CoverMethod::Exact, CoverMethod::Greedy] {
            let c = cover_rows(&f, 0.5, m).unwrap();
            assert_eq!(c.count(), 1);
            c.verify(&f).unwrap();
        }
    }

    #[test]
    fn separated_rows_are_singletons() {
        let f = WeightedBipartiteStructure::half_graph(4).unwrap();
        let c = cover_rows(&f, 0.4, CoverMethod::Exact).unwrap();
        assert_eq!(c.count(), 4);
        c.verify(&f).unwrap();
    }

    #[test]
    fn duplicates_share_a_part() {
        let f = WeightedBipartiteStructure::from_real_rows(&[vec![0.0], vec![1.0], vec![0.0]]).unwrap();
        let c = cover_rows(&f, 0.1, CoverMethod::Exact).unwrap();
        assert_eq!(c.parts, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn greedy_can_lose() {
        // greedy pairs 1 with 2 and strands 0 and 3
        let f = WeightedBipartiteStructure::from_real_rows(&[vec![1.0], vec![2.0], vec![0.0], vec![3.0]]).unwrap();
        let e = cover_rows(&f, 0.5, CoverMethod::Exact).unwrap();
        let g = cover_rows(&f, 0.5, CoverMethod::Greedy).unwrap();
        assert_eq!(e.count(), 2);
        assert_eq!(g.count(), 3);
        e.verify(&f).unwrap();
        g.verify(&f).unwrap();
    }

    #[test]
    fn exact_size_guard() {
        let rows: Vec<Vec<f64>> = (0..11).map(|i| vec![i as f64]).collect();
        let f = WeightedBipartiteStructure::from_real_rows(&rows).unwrap();
        assert!(matches!(cover_rows(&f, 0.1, CoverMethod::Exact), Err(Error::SizeGuard(_))));
        assert_eq!(cover_rows(&f, 0.1, CoverMethod::Greedy).unwrap().count(), 11);
    }
}
