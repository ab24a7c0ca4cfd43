use crate::error::{invalid, Result};
use crate::quorum::Quorum;
use crate::system::QuorumSystem;

pub(crate) fn grid_side(n: usize) -> Result<usize> {
    let m = n.isqrt();
    if m < 2 || m * m != n {
        return Err(invalid(format!("grid needs n = m² with m ≥ 2, got {n}")));
    }
    Ok(m)
}

/// Row `row` plus column `col` of the `√n × √n` array, row-major.
pub fn build_grid(n: usize, row: usize, col: usize) -> Result<Quorum> {
    let m = grid_side(n)?;
    if row >= m || col >= m {
        return Err(invalid(format!("grid cell ({row}, {col}) outside {m}×{m}")));
    }
    let row_slots = (0..m).map(|j| row * m + j);
    let col_slots = (0..m).map(|i| i * m + col);
    Quorum::from_union(n, row_slots.chain(col_slots))
}

/// Every `(row, col)` choice, in row-then-column order.
pub fn build_grid_system(n: usize) -> Result<QuorumSystem> {
    let m = grid_side(n)?;
    let quorums = (0..m)
        .flat_map(|r| (0..m).map(move |c| (r, c)))
        .map(|(r, c)| build_grid(n, r, c))
        .collect::<Result<Vec<_>>>()?;
    QuorumSystem::uniform(n, quorums)
}
