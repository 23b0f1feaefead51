//! Error type shared by the simulation and analysis layers.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Mass ordering m1 > m2 >= m3 > 0 violated.
    InvalidMasses(String),
    /// A state failed a structural invariant (ordering, section membership).
    InvalidState(String),
    /// Collision kind does not match the section the state lies on.
    KindMismatch { expected: String, got: String },
    /// Free flight requested across an interior collision event.
    FlightOverrun { event_time: f64, requested: f64 },
    /// The next event is singular; the caller must branch.
    SingularEvent,
    /// More than two event times coincide; cannot classify.
    DegenerateEvent,
    /// No positive event time found (corrupt state).
    NoEvent,
    /// Zero-time collision cascade failed to terminate.
    CascadeOverflow,
    /// Rejection sampler exhausted its attempt budget.
    RejectionBudget { attempts: usize },
    /// Characteristic direction undefined (velocities parallel to (1,1,1)).
    DegenerateDirection,
    /// Two velocity samples are parallel; no plane is determined.
    DegeneratePlane,
    /// Wedge unfolding requires the special mass condition.
    NotSpecialMasses { residual: f64 },
    /// Orbit hit a singularity under a policy that forbids branching.
    SingularOrbit { step: usize },
    /// Experiment configuration rejected.
    Config(String),
    /// An experiment ran out of its numerical budget (samples, blocks, orbits).
    BudgetExhausted(String),
    /// File emission failed.
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMasses(msg) => write!(f, "invalid masses: {msg}"),
            Error::InvalidState(msg) => write!(f, "invalid state: {msg}"),
            Error::KindMismatch { expected, got } => {
                write!(f, "collision kind mismatch: expected {expected}, got {got}")
            }
            Error::FlightOverrun { event_time, requested } => write!(
                f,
                "free flight over {requested} crosses an event at {event_time}"
            ),
            Error::SingularEvent => write!(f, "next event is singular; use branch continuation"),
            Error::DegenerateEvent => write!(f, "three event times coincide"),
            Error::NoEvent => write!(f, "no positive event time"),
            Error::CascadeOverflow => write!(f, "zero-time collision cascade did not terminate"),
            Error::RejectionBudget { attempts } => {
                write!(f, "rejection sampling budget exhausted after {attempts} attempts")
            }
            Error::DegenerateDirection => write!(f, "characteristic direction undefined"),
            Error::DegeneratePlane => write!(f, "velocity samples are parallel"),
            Error::NotSpecialMasses { residual } => {
                write!(f, "masses violate the special condition (residual {residual:e})")
            }
            Error::SingularOrbit { step } => write!(f, "orbit hit a singularity at step {step}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::BudgetExhausted(msg) => write!(f, "numerical budget exhausted: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
