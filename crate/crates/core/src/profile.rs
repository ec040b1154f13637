//! Stability profiles: for each `k`, the largest `eps_k` such that some
//! `(k + 1)`-chain has all discrepancies at least `eps_k`.
//!
//! `f` is `k`-`eps`-stable exactly when `eps > eps_k`.

use serde::{Deserialize, Serialize};

use crate::chain::{chain_from_pairs, greedy_chain, ChainKind, PairGraph, SearchLimits, SearchMode, WitnessChain};
use crate::error::{Error, Result};
use crate::matrix::WeightedBipartiteStructure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub k: usize,
    pub epsilon_k: f64,
    /// True for exact computations.
    pub certified: bool,
    /// A chain attaining `epsilon_k`, when `epsilon_k > 0`.
    pub chain: Option<WitnessChain>,
    /// The next realized discrepancy above `epsilon_k`, at which no chain
    /// of this length exists.
    pub next_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityProfile {
    pub mode: SearchMode,
    pub diameter: f64,
    pub entries: Vec<ProfileEntry>,
}

impl StabilityProfile {
    pub fn epsilon(&self, k: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.k == k).map(|e| e.epsilon_k)
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("k,epsilon_k,certified\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{}\n", e.k, e.epsilon_k, e.certified));
        }
        s
    }
}

/// Computes `eps_1, ..., eps_{k_max}`.
///
/// Exact mode binary-searches the realized discrepancy values, using the
/// previous `eps_k` as an upper bound. Heuristic mode reports greedy lower
/// bounds, flagged uncertified.
pub fn stability_profile(
    f: &WeightedBipartiteStructure,
    k_max: usize,
    mode: SearchMode,
    limits: &SearchLimits,
    seed: u64,
) -> Result<StabilityProfile> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let entries = match mode {
        SearchMode::Exact => exact_entries(f, k_max, limits)?,
        SearchMode::Heuristic => {
            let g = PairGraph::new(f, &SearchLimits { max_pairs: usize::MAX, ..*limits })?;
            (1..=k_max)
                .map(|k| {
                    let set = greedy_chain(&g, k + 1, seed);
                    let (epsilon_k, chain) = match set {
                        Some(s) if g.min_disc(&s) > 0.0 => {
                            (g.min_disc(&s), Some(chain_from_pairs(f, &g, &s, ChainKind::Plain)?))
                        }
                        _ => (0.0, None),
                    };
                    Ok(ProfileEntry {
                        k,
                        epsilon_k,
                        certified: false,
                        chain,
                        next_value: None,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(StabilityProfile {
        mode,
        diameter: f.diameter(),
        entries,
    })
}

fn exact_entries(f: &WeightedBipartiteStructure, k_max: usize, limits: &SearchLimits) -> Result<Vec<ProfileEntry>> {
    let g = PairGraph::new(f, limits)?;
    let values = g.realized_discrepancies();
    let mut out = Vec::with_capacity(k_max);
    // values[..upper] are the candidates still possible for the current k
    let mut upper = values.len();
    for k in 1..=k_max {
        let target = k + 1;
        let (mut lo, mut hi) = (0usize, upper);
        // invariant: a chain exists at values[i] for i < lo, none for i >= hi
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if g.exists_chain(values[mid], target, limits.node_budget)? {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let entry = if lo == 0 {
            ProfileEntry {
                k,
                epsilon_k: 0.0,
                certified: true,
                chain: None,
                next_value: values.first().copied(),
            }
        } else {
            let eps = values[lo - 1];
            let set = g
                .find_chain(eps, target, limits.node_budget)?
                .expect("a chain exists at a level found by the binary search");
            ProfileEntry {
                k,
                epsilon_k: eps,
                certified: true,
                chain: Some(chain_from_pairs(f, &g, &set, ChainKind::Plain)?),
                next_value: values.get(lo).copied(),
            }
        };
        upper = lo;
        out.push(entry);
    }
    Ok(out)
}
