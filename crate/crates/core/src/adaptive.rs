//! Energy-driven width selection for AS-Grid.
//!
//! Every node keeps the network-wide row count `t` and widens its grid as
//! its battery drains. Any two AS-Grid systems with the same `t` stay
//! cross-closed, so neighbours never lose each other while resizing.

use crate::constructions::SystemSpec;
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Remaining and full energy, in any consistent unit.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyState<T> {
    remaining: T,
    full: T,
}

impl<T: Scalar> EnergyState<T> {
    pub fn new(remaining: T, full: T) -> Result<Self> {
        if full <= T::zero() {
            return Err(invalid(format!("full energy must be positive, got {full}")));
        }
        if remaining < T::zero() || remaining > full {
            return Err(invalid(format!(
                "remaining energy {remaining} outside [0, {full}]"
            )));
        }
        Ok(Self { remaining, full })
    }

    /// Like [`EnergyState::new`] but clamps `remaining` into `[0, full]`.
    pub fn clamped(remaining: T, full: T) -> Result<Self> {
        let r = if remaining < T::zero() {
            T::zero()
        } else if remaining > full {
            full.clone()
        } else {
            remaining
        };
        Self::new(r, full)
    }

    pub fn remaining(&self) -> &T {
        &self.remaining
    }

    pub fn full(&self) -> &T {
        &self.full
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptivePolicy<T> {
    pub t: usize,
    pub w_base: usize,
    /// Energy band width.
    pub k_step: T,
    pub w_max: usize,
    pub full_energy: T,
    /// Extra bands added on top of the energy band, for heavy-traffic nodes.
    pub traffic_bands: usize,
}

impl<T: Scalar> AdaptivePolicy<T> {
    /// Policy with `w_max = 4·w_base` and no traffic adjustment.
    pub fn new(t: usize, w_base: usize, k_step: T, full_energy: T) -> Result<Self> {
        let p = Self {
            t,
            w_base,
            k_step,
            w_max: 4 * w_base,
            full_energy,
            traffic_bands: 0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_w_max(mut self, w_max: usize) -> Result<Self> {
        self.w_max = w_max;
        self.validate()?;
        Ok(self)
    }

    pub fn with_traffic_bands(mut self, bands: usize) -> Self {
        self.traffic_bands = bands;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t < 2 || self.w_base < 2 {
            return Err(invalid(format!(
                "adaptive policy needs t ≥ 2 and w_base ≥ 2, got t={}, w_base={}",
                self.t, self.w_base
            )));
        }
        if self.w_base > self.w_max {
            return Err(invalid(format!(
                "w_base {} exceeds w_max {}",
                self.w_base, self.w_max
            )));
        }
        let k = &self.k_step;
        if *k <= T::zero() || T::from_ratio(k.ceil_int() as i128, 1) != *k {
            return Err(invalid(format!(
                "k_step must be a positive integer, got {k}"
            )));
        }
        if self.full_energy <= T::zero() {
            return Err(invalid(format!(
                "full_energy must be positive, got {}",
                self.full_energy
            )));
        }
        Ok(())
    }

    pub fn spec(&self, w: usize) -> SystemSpec {
        SystemSpec::AsGrid { t: self.t, w }
    }
}

/// Energy band below full: 0 for `RE ∈ [f − k, f]`, 1 for `[f − 2k, f − k)`,
/// and so on. A boundary value belongs to the higher-energy band.
pub fn energy_band<T: Scalar>(e: &EnergyState<T>, k_step: &T) -> usize {
    if e.remaining >= e.full {
        return 0;
    }
    let deficit = e.full.clone() - e.remaining.clone();
    let bands = (deficit / k_step.clone()).ceil_int() - 1;
    bands.max(0) as usize
}

/// `w_base + band + traffic_bands`, clamped to `w_max`.
pub fn select_width<T: Scalar>(e: &EnergyState<T>, p: &AdaptivePolicy<T>) -> usize {
    let w = p
        .w_base
        .saturating_add(energy_band(e, &p.k_step))
        .saturating_add(p.traffic_bands);
    w.min(p.w_max)
}

/// The same AS-Grid with width `new_w`. `new_t` must equal the current `t`:
/// every node in a network shares one row count.
pub fn resize_system(old: &SystemSpec, new_t: usize, new_w: usize) -> Result<SystemSpec> {
    let SystemSpec::AsGrid { t, .. } = *old else {
        return Err(invalid(format!(
            "only AS-Grid systems can be resized, got {old}"
        )));
    };
    if new_t != t {
        return Err(invalid(format!(
            "cannot change t from {t} to {new_t}: all nodes in a network share the same t"
        )));
    }
    if new_w < 2 {
        return Err(invalid(format!(
            "resized width must be at least 2, got {new_w}"
        )));
    }
    Ok(SystemSpec::AsGrid { t, w: new_w })
}
