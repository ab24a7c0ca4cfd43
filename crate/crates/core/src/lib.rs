//! Quorum-based wake-up schedules for asynchronous neighbour discovery.
//!
//! A node divides time into cycles of `n` slots and stays awake only in the
//! slots of its quorum. Two nodes whose quorums come from a system with the
//! rotational closure property share at least one awake slot in every cycle,
//! whatever their integer clock offset.
//!
//! The crate is organised bottom-up:
//!
//! * [`quorum`], [`system`] and [`closure`]: slot sets, rotation,
//!   intersection and the exhaustive closure verifiers.
//! * [`constructions`]: grid, torus, e-torus, cyclic, FPP, AS-Grid and
//!   LPS-Grid systems, addressed by [`SystemSpec`].
//! * [`metrics`]: EQOS under three averaging conventions, active ratio, QER
//!   and the printed closed forms.
//! * [`adaptive`]: energy-driven width selection for AS-Grid.
//! * [`sim`]: a slot-synchronous multi-node simulator.
//!
//! Every numeric routine is generic over [`Scalar`]. [`Rational`] is the
//! exact instantiation used throughout the tests and the CLI; `f64` works as
//! well when speed matters more than exactness.

pub mod adaptive;
pub mod closure;
pub mod constructions;
mod error;
pub mod metrics;
pub mod quorum;
pub mod scalar;
pub mod sim;
pub mod system;

pub use closure::{Budget, ClosureReport, Witness};
pub use constructions::{BuildOptions, DifferenceSet, SystemSpec};
pub use error::{Error, Result};
pub use metrics::{ClosedForm, Convention, MetricsReport};
pub use quorum::{Quorum, SlotId};
pub use scalar::{format_decimal, parse_rational, Scalar};
pub use system::QuorumSystem;

/// Exact rational used for weights and exact metrics.
pub type Rational = num_rational::Ratio<i128>;

/// Arbitrary-precision rational, for callers who need headroom beyond `i128`.
pub type BigRational = num_rational::BigRational;

/// Metrics evaluated exactly.
pub type ExactMetrics = MetricsReport<Rational>;

/// Metrics evaluated in double precision.
pub type FloatMetrics = MetricsReport<f64>;
