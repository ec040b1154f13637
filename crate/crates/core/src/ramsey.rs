//! Exhaustive verification of small diagonal Ramsey numbers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamseyCertificate {
    pub s: usize,
    pub value: usize,
    pub verified: bool,
    /// Number of 2-colourings of `K_value` checked for a monochromatic `K_s`.
    pub colourings_checked: u64,
    /// A 2-colouring of `K_{value-1}` with no monochromatic `K_s`, as
    /// `(i, j, colour)` triples.
    pub lower_bound_colouring: Option<Vec<(usize, usize, u8)>>,
    pub note: String,
}

fn edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn edge_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    // edges listed row by row
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Triangles of `K_n` as triples of edge indices.
fn triangles(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push([edge_index(n, a, b), edge_index(n, a, c), edge_index(n, b, c)]);
            }
        }
    }
    out
}

fn has_mono_triangle(mask: u32, tris: &[[usize; 3]]) -> bool {
    tris.iter().any(|t| {
        let c: Vec<u32> = t.iter().map(|&e| mask >> e & 1).collect();
        c[0] == c[1] && c[1] == c[2]
    })
}

/// Checks that a 2-colouring of `K_n` has no monochromatic triangle.
pub fn triangle_free_colouring(n: usize, colouring: &[(usize, usize, u8)]) -> bool {
    let mut mask = 0u32;
    let mut seen = vec![false; n * (n.saturating_sub(1)) / 2];
    for &(i, j, c) in colouring {
        if i >= n || j >= n || i == j || c > 1 {
            return false;
        }
        let e = edge_index(n, i, j);
        if seen[e] {
            return false;
        }
        seen[e] = true;
        mask |= (c as u32) << e;
    }
    seen.iter().all(|&s| s) && !has_mono_triangle(mask, &triangles(n))
}

/// The pentagon/pentagram split of `K_5`.
pub fn pentagon_colouring() -> Vec<(usize, usize, u8)> {
    edges(5)
        .into_iter()
        .map(|(i, j)| {
            let d = (j - i) % 5;
            (i, j, if d == 1 || d == 4 { 0 } else { 1 })
        })
        .collect()
}

/// `R(3,3) = 6` by exhaustion; `R(4,4) = 18` is reported from the
/// literature and flagged unverified.
pub fn verify_ramsey(s: usize) -> Result<RamseyCertificate> {
    match s {
        3 => {
            let tris = triangles(6);
            let n_edges = edges(6).len() as u32;
            let total = 1u64 << n_edges;
            let all_mono = (0..total as u32).all(|mask| has_mono_triangle(mask, &tris));
            let lower = pentagon_colouring();
            let lower_ok = triangle_free_colouring(5, &lower);
            Ok(RamseyCertificate {
                s,
                value: 6,
                verified: all_mono && lower_ok,
                colourings_checked: total,
                lower_bound_colouring: Some(lower),
                note: format!(
                    "every 2-colouring of K_6 has a monochromatic triangle: {all_mono}; pentagon colouring of K_5 is triangle-free: {lower_ok}"
                ),
            })
        }
        4 => Ok(RamseyCertificate {
            s,
            value: 18,
            verified: false,
            colourings_checked: 0,
            lower_bound_colouring: None,
            note: "table lookup, not verified".into(),
        }),
        _ => Err(Error::InvalidParameter(format!("Ramsey number R({s},{s}) is not supported; use 3 or 4"))),
    }
}
