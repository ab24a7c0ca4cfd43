//! The quorum constructions, addressed by a [`SystemSpec`].
//!
//! Numbering is fixed per family. Grid, torus and e-torus lay the cycle out
//! row-major (`slot = row·w + col`); AS-Grid and LPS-Grid lay it out
//! column-major (`slot = col·t + row`). All row and column parameters are
//! 0-based, so "row 3, column 3" of a 1-based 4×4 drawing is `row = 2, col = 2`.

mod cyclic;
mod grid;
mod spec;
mod stepped;
mod torus;

pub use cyclic::{
    build_cyclic_system, build_fpp_system, find_difference_set, fpp_order, is_difference_cover,
    is_prime_power, DifferenceSet,
};
pub use grid::{build_grid, build_grid_system};
pub use spec::SystemSpec;
pub use stepped::{build_as_grid, build_as_grid_system, build_lps_grid, build_lps_grid_system};
pub use torus::{
    build_e_torus, build_e_torus_system, build_torus, build_torus_system, torus_quorum_count,
};

use serde::{Deserialize, Serialize};

use crate::closure::Budget;
use crate::error::Result;
use crate::system::QuorumSystem;

/// Knobs for turning a [`SystemSpec`] into a concrete family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Seed for the torus subfamily sampler.
    pub seed: u64,
    /// Maximum number of torus quorums kept; smaller families are enumerated in full.
    pub torus_cap: usize,
    /// Cap for the difference-set search behind `fpp:` specs.
    pub budget: Budget,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            torus_cap: 512,
            budget: Budget::default(),
        }
    }
}

/// Builds the full system described by `spec`.
///
/// Torus systems hold a seeded subfamily when the complete family is larger
/// than `opts.torus_cap`; every other family is complete.
pub fn build_system(spec: &SystemSpec, opts: &BuildOptions) -> Result<QuorumSystem> {
    spec.validate()?;
    match spec {
        SystemSpec::Grid { n } => build_grid_system(*n),
        SystemSpec::Torus { t, w } => build_torus_system(*t, *w, opts.torus_cap, opts.seed),
        SystemSpec::ETorus { t, w, k_branches } => build_e_torus_system(*t, *w, *k_branches),
        SystemSpec::Cyclic { n, set } => {
            build_cyclic_system(&DifferenceSet::new(*n, set.iter().copied())?)
        }
        SystemSpec::Fpp { n } => build_fpp_system(*n, &opts.budget),
        SystemSpec::AsGrid { t, w } => build_as_grid_system(*t, *w),
        SystemSpec::LpsGrid { t, w } => build_lps_grid_system(*t, *w),
    }
}
