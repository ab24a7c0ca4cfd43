//! AS-Grid and LPS-Grid: a stride-`t` row plus a segment of column slots,
//! laid out column-major so that the last column is slots `n−t .. n−1`.

use crate::error::{invalid, Result};
use crate::quorum::Quorum;
use crate::system::QuorumSystem;

fn check_shape(kind: &str, t: usize, w: usize, row: usize) -> Result<usize> {
    if t < 2 || w < 2 {
        return Err(invalid(format!("{kind}({t}×{w}) needs t ≥ 2 and w ≥ 2")));
    }
    if row >= t {
        return Err(invalid(format!("{kind}({t}×{w}) has no row {row}")));
    }
    Ok(t * w)
}

fn row_slots(t: usize, w: usize, row: usize) -> impl Iterator<Item = usize> {
    (0..w).map(move |j| row + j * t)
}

/// Row `row`, column 0 from slot 0 down to the row, and the last column from
/// the row down to slot `n−1`. Size `t + w − 1`.
pub fn build_as_grid(t: usize, w: usize, row: usize) -> Result<Quorum> {
    let n = check_shape("AS-Grid", t, w, row)?;
    let prefix = 0..=row;
    let suffix = (n - t + row)..n;
    Quorum::from_union(n, row_slots(t, w, row).chain(prefix).chain(suffix))
}

pub fn build_as_grid_system(t: usize, w: usize) -> Result<QuorumSystem> {
    let quorums = (0..t)
        .map(|r| build_as_grid(t, w, r))
        .collect::<Result<Vec<_>>>()?;
    QuorumSystem::uniform(t * w, quorums)
}

/// Row `row` plus the `⌊t/2⌋` last-column slots after the row's own, wrapping
/// inside the last column. Size `w + ⌊t/2⌋`.
pub fn build_lps_grid(t: usize, w: usize, row: usize) -> Result<Quorum> {
    let n = check_shape("LPS-Grid", t, w, row)?;
    let last = (w - 1) * t;
    let tail = (1..=t / 2).map(move |i| last + (row + i) % t);
    Quorum::from_union(n, row_slots(t, w, row).chain(tail))
}

pub fn build_lps_grid_system(t: usize, w: usize) -> Result<QuorumSystem> {
    let quorums = (0..t)
        .map(|r| build_lps_grid(t, w, r))
        .collect::<Result<Vec<_>>>()?;
    QuorumSystem::uniform(t * w, quorums)
}
