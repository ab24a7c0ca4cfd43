//! Torus and e-torus on a row-major `t × w` array that wraps on both axes.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::quorum::Quorum;
use crate::system::QuorumSystem;

fn check_shape(kind: &str, t: usize, w: usize) -> Result<usize> {
    if t < 2 || w < 2 {
        return Err(invalid(format!("{kind}({t}×{w}) needs t ≥ 2 and w ≥ 2")));
    }
    Ok(t * w)
}

/// Column `col` in full, plus one slot in each of the next `⌊w/2⌋` columns
/// (wrapping past the rightmost column). `branch_rows[i]` is the row used in
/// column `col + i + 1`.
pub fn build_torus(t: usize, w: usize, col: usize, branch_rows: &[usize]) -> Result<Quorum> {
    let n = check_shape("torus", t, w)?;
    if col >= w {
        return Err(invalid(format!("torus({t}×{w}) has no column {col}")));
    }
    if branch_rows.len() != w / 2 {
        return Err(invalid(format!(
            "torus({t}×{w}) needs {} branch rows, got {}",
            w / 2,
            branch_rows.len()
        )));
    }
    if let Some(r) = branch_rows.iter().find(|&&r| r >= t) {
        return Err(invalid(format!("torus({t}×{w}) has no row {r}")));
    }
    let trunk = (0..t).map(|r| r * w + col);
    let branches = branch_rows
        .iter()
        .enumerate()
        .map(|(i, &r)| r * w + (col + i + 1) % w);
    Quorum::from_union(n, trunk.chain(branches))
}

/// `w · t^⌊w/2⌋`, saturating.
pub fn torus_quorum_count(t: usize, w: usize) -> u128 {
    (t as u128)
        .checked_pow((w / 2) as u32)
        .and_then(|p| p.checked_mul(w as u128))
        .unwrap_or(u128::MAX)
}

/// The complete torus family when it has at most `cap` members, otherwise
/// `cap` distinct members drawn with a seeded generator. Members are ordered
/// by `(col, branch_rows)` either way.
pub fn build_torus_system(t: usize, w: usize, cap: usize, seed: u64) -> Result<QuorumSystem> {
    let n = check_shape("torus", t, w)?;
    if cap == 0 {
        return Err(invalid("torus subfamily cap must be at least 1"));
    }
    let half = w / 2;
    let choices: BTreeSet<(usize, Vec<usize>)> = if torus_quorum_count(t, w) <= cap as u128 {
        (0..w)
            .flat_map(|c| all_rows(t, half).into_iter().map(move |rows| (c, rows)))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = BTreeSet::new();
        while picked.len() < cap {
            let c = rng.gen_range(0..w);
            let rows = (0..half).map(|_| rng.gen_range(0..t)).collect();
            picked.insert((c, rows));
        }
        picked
    };
    let quorums = choices
        .iter()
        .map(|(c, rows)| build_torus(t, w, *c, rows))
        .collect::<Result<Vec<_>>>()?;
    QuorumSystem::uniform(n, quorums)
}

fn all_rows(t: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..t).map(move |r| {
                    let mut next = prefix.clone();
                    next.push(r);
                    next
                })
            })
            .collect();
    }
    out
}

/// The "Christmas tree": column `c` as trunk plus `k_branches` half
/// diagonals of `⌊w/2⌋` cells. Branch `i` leaves the trunk at row
/// `r + ⌈i·t/k⌉`; even branches climb one row per column, odd branches
/// descend, both wrapping.
pub fn build_e_torus(t: usize, w: usize, k_branches: usize, r: usize, c: usize) -> Result<Quorum> {
    let n = check_shape("e-torus", t, w)?;
    if k_branches == 0 || k_branches > t {
        return Err(invalid(format!(
            "e-torus({t}×{w}) needs 1 ≤ k ≤ {t}, got k = {k_branches}"
        )));
    }
    if r >= t || c >= w {
        return Err(invalid(format!("e-torus({t}×{w}) has no cell ({r}, {c})")));
    }
    let mut slots: Vec<usize> = (0..t).map(|row| row * w + c).collect();
    for i in 0..k_branches {
        let origin = (r + (i * t).div_ceil(k_branches)) % t;
        for j in 1..=w / 2 {
            let row = if i % 2 == 0 {
                (origin + j) % t
            } else {
                (origin + t - j % t) % t
            };
            slots.push(row * w + (c + j) % w);
        }
    }
    Quorum::from_union(n, slots)
}

/// Every `(r, c)` choice for a fixed branch count, in row-then-column order.
pub fn build_e_torus_system(t: usize, w: usize, k_branches: usize) -> Result<QuorumSystem> {
    let n = check_shape("e-torus", t, w)?;
    let quorums = (0..t)
        .flat_map(|r| (0..w).map(move |c| (r, c)))
        .map(|(r, c)| build_e_torus(t, w, k_branches, r, c))
        .collect::<Result<Vec<_>>>()?;
    QuorumSystem::uniform(n, quorums)
}
