//! Exact event-driven simulation of the three falling balls.
//!
//! Positions satisfy `0 <= q1 <= q2 <= q3`; gravity is fixed to 1. Flight is
//! parabolic with closed-form event roots; collisions are elastic. The
//! Poincare map walks collision to collision, continuing singular events
//! (triple and floor-pair contacts) on both branch orderings.

pub mod events;
pub mod map;
pub mod masses;
pub mod sample;
pub mod singular;
pub mod state;

pub use events::{CollisionEvent, EventKind, TIE_TOL};
pub use map::{
    Branch, BranchPoint, OrbitEntry, OrbitLog, SingularPolicy, StepOutcome, StepRecord, System,
};
pub use masses::{gamma, MassModel, DEFAULT_SPECIAL_TOL};
pub use sample::{sample_rng, REJECTION_BUDGET};
pub use singular::{Mom, SingularManifold};
pub use state::{PhaseState, Section};
