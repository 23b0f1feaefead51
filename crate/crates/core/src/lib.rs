//! Simulation and hyperbolicity analysis of three falling balls.
//!
//! The crate has four layers:
//!
//! - [`dynamics`]: exact event-driven simulation of three point masses on a
//!   vertical line under unit gravity, with elastic ball-ball and floor
//!   collisions, the collision-to-collision Poincare map, its inverse, and
//!   both-branch continuation at singular (triple / floor-pair) events.
//! - [`tangent`]: the derivative cocycle of the Poincare map in energy
//!   coordinates `(h, v)`, the indefinite form `Q`, and the per-collision
//!   jump blocks used as a structural cross-check.
//! - [`cones`]: cone membership, the least expansion coefficient, strict
//!   monotonicity certificates, characteristic lines of the singularity
//!   manifolds, alignment, and growth-bound estimation.
//! - [`wedge`]: the equivalent particle-in-a-wedge picture, the wide-wedge
//!   unfolding available at the special mass ratio, the triangle projection,
//!   and floor-to-floor cycle classification.
//!
//! [`experiments`] wires these into deterministic, reproducible experiment
//! runners behind the `wedgefall` CLI.

pub mod cones;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod tangent;
pub mod wedge;

pub use dynamics::{
    EventKind, MassModel, OrbitLog, PhaseState, Section, SingularManifold, SingularPolicy,
    StepOutcome, System,
};
pub use error::{Error, Result};
