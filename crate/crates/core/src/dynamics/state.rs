//! Phase states on the energy surface and the collision sections.

use super::masses::MassModel;
use crate::error::{Error, Result};

/// Position tolerance (relative to `max(1, q3)`) for section membership checks.
pub const SECTION_POS_TOL: f64 = 1e-9;

/// Collision sections. `+` sections hold states right after a collision,
/// `-` sections right before.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Section {
    M1Plus,
    M2Plus,
    M3Plus,
    M1Minus,
    M2Minus,
    M3Minus,
    Interior,
}

impl Section {
    pub fn label(&self) -> &'static str {
        match self {
            Section::M1Plus => "M1+",
            Section::M2Plus => "M2+",
            Section::M3Plus => "M3+",
            Section::M1Minus => "M1-",
            Section::M2Minus => "M2-",
            Section::M3Minus => "M3-",
            Section::Interior => "interior",
        }
    }

    pub fn is_post_collision(&self) -> bool {
        matches!(self, Section::M1Plus | Section::M2Plus | Section::M3Plus)
    }
}

/// Heights and velocities of the three balls, with the construction-time
/// energy and a section tag.
///
/// Velocities are stored rather than momenta; `p_i = m_i v_i` on demand.
/// The energy `c` is fixed at construction and never rescaled, so the drift
/// `|H(q,v) - c|` stays observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub q: [f64; 3],
    pub v: [f64; 3],
    pub c: f64,
    pub section: Section,
}

impl PhaseState {
    /// Build a state, validating ordering `0 <= q1 <= q2 <= q3` and the
    /// section tag against its defining (in)equalities.
    pub fn new(masses: &MassModel, q: [f64; 3], v: [f64; 3], section: Section) -> Result<Self> {
        let scale = q[2].abs().max(1.0);
        let tol = SECTION_POS_TOL * scale;
        if q[0] < -tol || q[1] < q[0] - tol || q[2] < q[1] - tol {
            return Err(Error::InvalidState(format!("height ordering violated: {q:?}")));
        }
        let state = PhaseState {
            q,
            v,
            c: masses.energy(&q, &v),
            section,
        };
        if section != Section::Interior && !state.on_section(section) {
            return Err(Error::InvalidState(format!(
                "state not on section {}: q={q:?} v={v:?}",
                section.label()
            )));
        }
        Ok(state)
    }

    /// Internal constructor for states produced by the exact flight/collision
    /// formulas, which preserve the invariants by construction.
    pub(crate) fn raw(q: [f64; 3], v: [f64; 3], c: f64, section: Section) -> Self {
        PhaseState { q, v, c, section }
    }

    /// Current energy `H(q, v)`; drifts from `c` only through rounding.
    pub fn energy(&self, masses: &MassModel) -> f64 {
        masses.energy(&self.q, &self.v)
    }

    /// Relative energy drift `|H - c| / c`.
    pub fn energy_drift(&self, masses: &MassModel) -> f64 {
        (self.energy(masses) - self.c).abs() / self.c
    }

    /// Check the defining (in)equalities of a section at this state.
    pub fn on_section(&self, section: Section) -> bool {
        let tol = SECTION_POS_TOL * self.q[2].abs().max(1.0);
        let [q1, q2, q3] = self.q;
        let [v1, v2, v3] = self.v;
        match section {
            Section::M1Plus => q1.abs() <= tol && v1 >= 0.0,
            Section::M1Minus => q1.abs() <= tol && v1 < 0.0,
            Section::M2Plus => (q2 - q1).abs() <= tol && v1 <= v2,
            Section::M2Minus => (q2 - q1).abs() <= tol && v1 > v2,
            Section::M3Plus => (q3 - q2).abs() <= tol && v2 <= v3,
            Section::M3Minus => (q3 - q2).abs() <= tol && v2 > v3,
            Section::Interior => true,
        }
    }

    /// Time-reversal involution `R(q, v) = (q, -v)`. Maps post-collision
    /// states to pre-collision states of the reversed orbit.
    pub fn reversed(&self) -> Self {
        let section = match self.section {
            Section::M1Plus => Section::M1Minus,
            Section::M2Plus => Section::M2Minus,
            Section::M3Plus => Section::M3Minus,
            Section::M1Minus => Section::M1Plus,
            Section::M2Minus => Section::M2Plus,
            Section::M3Minus => Section::M3Plus,
            Section::Interior => Section::Interior,
        };
        PhaseState {
            q: self.q,
            v: [-self.v[0], -self.v[1], -self.v[2]],
            c: self.c,
            section,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates_ordering_and_section() {
        let m = MassModel::new(3.0, 2.0, 1.0).unwrap();
        assert!(PhaseState::new(&m, [0.0, 1.0, 3.0], [1.0, 0.0, 0.0], Section::M1Plus).is_ok());
        assert!(PhaseState::new(&m, [1.0, 0.5, 3.0], [0.0; 3], Section::Interior).is_err());
        // M1+ needs v1 >= 0
        assert!(PhaseState::new(&m, [0.0, 1.0, 3.0], [-1.0, 0.0, 0.0], Section::M1Plus).is_err());
    }

    #[test]
    fn energy_is_derived_at_construction() {
        let m = MassModel::new(3.0, 2.0, 1.0).unwrap();
        let s = PhaseState::new(&m, [0.0, 1.0, 3.0], [1.0, 0.5, -0.25], Section::Interior).unwrap();
        assert_eq!(s.c, m.energy(&s.q, &s.v));
        assert_eq!(s.energy_drift(&m), 0.0);
    }

    #[test]
    fn reversal_is_an_involution() {
        let m = MassModel::new(3.0, 2.0, 1.0).unwrap();
        let s = PhaseState::new(&m, [0.0, 1.0, 3.0], [1.0, 0.5, -0.25], Section::M1Plus).unwrap();
        assert_eq!(s.reversed().reversed(), s);
        assert_eq!(s.reversed().section, Section::M1Minus);
    }
}
