//! Singularity manifolds of the collision map and the momentum census.
//!
//! `S12-` consists of triple-contact post-collision states whose next event
//! is the floor; `S31-` of states with both lower balls at the floor whose
//! next event is Pair23. The map `T^{-1}` has two images on these sets.

use super::events::EventKind;
use super::map::System;
use super::state::{PhaseState, SECTION_POS_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SingularManifold {
    /// Triple contact `q1 = q2 = q3`, `v1 <= v2 <= v3`, next event Floor01.
    S12Minus,
    /// Floor-pair contact `q1 = q2 = 0`, `0 <= v1 <= v2`, next event Pair23.
    S31Minus,
}

impl SingularManifold {
    pub fn label(&self) -> &'static str {
        match self {
            SingularManifold::S12Minus => "S12-",
            SingularManifold::S31Minus => "S31-",
        }
    }
}

/// Momentum classes of the arrival state at the floor event following a
/// triple contact: the sign pattern of the ordered arrival velocities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Mom {
    /// `v1 < 0 <= v2 <= v3`
    Mom1,
    /// `v1 < v2 <= 0 <= v3`
    Mom2,
    /// `v1 < v2 <= v3 <= 0`
    Mom3,
}

impl Mom {
    pub fn index(&self) -> usize {
        match self {
            Mom::Mom1 => 1,
            Mom::Mom2 => 2,
            Mom::Mom3 => 3,
        }
    }
}

impl System {
    /// Membership test for a singularity manifold, using configuration
    /// equalities plus the next-event condition verified by simulation.
    pub fn on_singular_manifold(&self, s: &PhaseState, manifold: SingularManifold) -> bool {
        let tol = SECTION_POS_TOL * s.q[2].abs().max(1.0);
        match manifold {
            SingularManifold::S12Minus => {
                let contact = (s.q[1] - s.q[0]).abs() <= tol && (s.q[2] - s.q[1]).abs() <= tol;
                let ordered = s.v[0] <= s.v[1] && s.v[1] <= s.v[2];
                contact
                    && ordered
                    && matches!(
                        self.next_event(s),
                        Ok(ev) if ev.kind == EventKind::Floor01
                    )
            }
            SingularManifold::S31Minus => {
                let contact = s.q[0].abs() <= tol && s.q[1].abs() <= tol;
                let ordered = s.v[0] >= 0.0 && s.v[0] <= s.v[1];
                contact
                    && ordered
                    && matches!(
                        self.next_event(s),
                        Ok(ev) if ev.kind == EventKind::Pair23
                    )
            }
        }
    }

    /// Classify a triple-contact point by the velocity sign pattern at the
    /// floor arrival of its image. Ties at zero go to the lower-index class.
    pub fn classify_momenta(&self, x: &PhaseState) -> Result<Mom> {
        if !self.on_singular_manifold(x, SingularManifold::S12Minus) {
            return Err(Error::InvalidState(
                "classify_momenta needs a point of S12- (triple contact, next event floor)".into(),
            ));
        }
        let ev = self.next_event(x)?;
        let arrival = self.free_flight(x, ev.tau)?;
        let [v1, v2, v3] = arrival.v;
        debug_assert!(v1 < 0.0, "floor arrival must move down");
        if v2 >= 0.0 {
            Ok(Mom::Mom1)
        } else if v3 >= 0.0 {
            Ok(Mom::Mom2)
        } else {
            Ok(Mom::Mom3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::masses::MassModel;
    use crate::dynamics::state::Section;

    fn sys() -> System {
        System::new(MassModel::new(3.0, 2.0, 1.0).unwrap())
    }

    #[test]
    fn mom_classes_follow_arrival_signs() {
        let sys = sys();
        // triple contact high enough that v2,v3 stay positive at floor arrival
        let x = sys
            .state([2.0, 2.0, 2.0], [-1.0, 2.9, 3.0], Section::M2Plus)
            .unwrap();
        assert!(sys.on_singular_manifold(&x, SingularManifold::S12Minus));
        assert_eq!(sys.classify_momenta(&x).unwrap(), Mom::Mom1);

        // all velocities negative at arrival: Mom3
        let x = sys
            .state([2.0, 2.0, 2.0], [-3.0, -2.0, -1.0], Section::M2Plus)
            .unwrap();
        assert_eq!(sys.classify_momenta(&x).unwrap(), Mom::Mom3);
    }

    #[test]
    fn classify_rejects_non_members() {
        let sys = sys();
        let x = sys
            .state([0.0, 1.0, 3.0], [1.0, 0.0, 0.0], Section::M1Plus)
            .unwrap();
        assert!(sys.classify_momenta(&x).is_err());
    }
}
