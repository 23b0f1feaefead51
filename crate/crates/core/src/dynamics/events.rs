//! Event kinds and closed-form time-to-event roots.
//!
//! All balls share the acceleration -1, so relative motion between balls is
//! linear and the pair event time is `gap / approach`. The floor event time
//! is the positive root of `q1 + v1 t - t^2/2 = 0`.

/// Relative tolerance for declaring two event times simultaneous:
/// `|t_a - t_b| <= TIE_TOL * (1 + min(t_a, t_b))`.
pub const TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum EventKind {
    /// Bottom ball hits the floor.
    Floor01,
    /// Balls 1 and 2 collide.
    Pair12,
    /// Balls 2 and 3 collide.
    Pair23,
    /// Pair12 and Pair23 coincide: triple collision.
    TripleSingular,
    /// Floor01 and Pair12 coincide: both lower balls reach the floor together.
    FloorPairSingular,
}

impl EventKind {
    pub fn is_singular(&self) -> bool {
        matches!(self, EventKind::TripleSingular | EventKind::FloorPairSingular)
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, EventKind::Pair12 | EventKind::Pair23)
    }

    pub fn label(&self) -> &'static str {
        match self {
            EventKind::Floor01 => "(0,1)",
            EventKind::Pair12 => "(1,2)",
            EventKind::Pair23 => "(2,3)",
            EventKind::TripleSingular => "triple",
            EventKind::FloorPairSingular => "floor-pair",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    pub tau: f64,
    pub kind: EventKind,
}

/// Positive root of `q1 + v1 t - t^2/2 = 0`, in a cancellation-free branch.
///
/// Always defined for `q1 >= 0`; equals `0` exactly when `q1 = 0, v1 <= 0`
/// (a state at the floor moving down is an immediate event).
pub fn floor_time(q1: f64, v1: f64) -> f64 {
    let disc = (v1 * v1 + 2.0 * q1).max(0.0).sqrt();
    if v1 > 0.0 {
        v1 + disc
    } else {
        // v1 + disc would cancel; rationalize.
        let denom = disc - v1;
        if denom == 0.0 {
            0.0
        } else {
            2.0 * q1 / denom
        }
    }
}

/// Time until balls `i` and `i+1` meet: `gap / approach` when approaching
/// (`v_i > v_{i+1}`), otherwise `None`. A zero gap with strictly positive
/// approach speed is an immediate event; a zero gap without approach is a
/// grazing contact and produces no event.
pub fn pair_time(gap: f64, approach: f64) -> Option<f64> {
    if approach > 0.0 {
        Some((gap / approach).max(0.0))
    } else {
        None
    }
}

/// Whether two candidate event times tie within `TIE_TOL`.
pub fn times_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOL * (1.0 + a.min(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_time_roots() {
        // q1 = 0, v1 = 2: back to the floor at t = 4
        assert!((floor_time(0.0, 2.0) - 4.0).abs() < 1e-15);
        // dropped from rest at height 2: t = 2
        assert!((floor_time(2.0, 0.0) - 2.0).abs() < 1e-15);
        // at the floor, at rest or moving down: immediate
        assert_eq!(floor_time(0.0, 0.0), 0.0);
        assert_eq!(floor_time(0.0, -1.0), 0.0);
        // stable branch for downward motion with a small gap above the floor
        let t = floor_time(1e-12, -3.0);
        let resid = 1e-12 + (-3.0) * t - 0.5 * t * t;
        assert!(resid.abs() < 1e-24);
    }

    #[test]
    fn pair_time_needs_approach() {
        assert_eq!(pair_time(1.0, 2.0), Some(0.5));
        assert_eq!(pair_time(1.0, 0.0), None);
        assert_eq!(pair_time(1.0, -1.0), None);
        assert_eq!(pair_time(0.0, 1.0), Some(0.0));
    }
}
