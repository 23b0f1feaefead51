//! Free flight, collisions, the Poincare map and its inverse, and orbit logs.

use super::events::{floor_time, pair_time, times_tie, CollisionEvent, EventKind};
use super::masses::MassModel;
use super::state::{PhaseState, Section, SECTION_POS_TOL};
use crate::error::{Error, Result};

/// Cap on consecutive zero-time collisions before declaring a stuck cascade.
pub const CASCADE_LIMIT: usize = 128;

/// The three-ball system under unit gravity: all dynamics operations live here.
#[derive(Debug, Clone, Copy)]
pub struct System {
    masses: MassModel,
}

/// One regular Poincare step: flight by `tau`, then the collision `kind`.
/// `pre` is the arrival (pre-collision) state; `state` is post-collision.
#[derive(Debug, Clone, Copy)]
pub struct StepRecord {
    pub tau: f64,
    pub kind: EventKind,
    pub pre: PhaseState,
    pub state: PhaseState,
}

/// One branch continuation out of a singular event: the state right after
/// applying `applied` first. Any partner collision still pending at the same
/// instant is found by the next step as a zero-time event.
#[derive(Debug, Clone, Copy)]
pub struct Branch {
    pub applied: EventKind,
    pub state: PhaseState,
}

/// A singular event with its two continuation orderings.
#[derive(Debug, Clone, Copy)]
pub struct BranchPoint {
    pub tau: f64,
    pub kind: EventKind,
    pub pre: PhaseState,
    pub first: Branch,
    pub second: Branch,
}

#[derive(Debug, Clone, Copy)]
pub enum StepOutcome {
    Regular(StepRecord),
    Singular(BranchPoint),
}

/// Branch selection for linear orbit runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SingularPolicy {
    /// Fail with `Error::SingularOrbit`.
    Error,
    /// Always continue on the first ordering.
    First,
    /// Always continue on the second ordering.
    Second,
}

#[derive(Debug, Clone, Copy)]
pub struct OrbitEntry {
    pub kind: EventKind,
    pub time: f64,
    pub pre: PhaseState,
    pub state: PhaseState,
    /// Set when this entry came from a singular event resolved by policy.
    pub branched: bool,
}

/// Event sequence of one orbit: post-event states with absolute times.
/// Times are nondecreasing; they repeat only across the zero-time
/// resolutions of a singular event.
#[derive(Debug, Clone)]
pub struct OrbitLog {
    pub initial: PhaseState,
    pub entries: Vec<OrbitEntry>,
}

impl OrbitLog {
    pub fn collisions(&self) -> usize {
        self.entries.len()
    }

    pub fn last_state(&self) -> &PhaseState {
        self.entries.last().map(|e| &e.state).unwrap_or(&self.initial)
    }

    /// Kinds of ball-ball events between consecutive floor events, with the
    /// entry index of each delimiting floor collision.
    pub fn floor_segments(&self) -> Vec<(usize, usize)> {
        let floors: Vec<usize> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == EventKind::Floor01)
            .map(|(i, _)| i)
            .collect();
        floors.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

impl System {
    pub fn new(masses: MassModel) -> Self {
        System { masses }
    }

    #[inline]
    pub fn masses(&self) -> &MassModel {
        &self.masses
    }

    pub fn state(&self, q: [f64; 3], v: [f64; 3], section: Section) -> Result<PhaseState> {
        PhaseState::new(&self.masses, q, v, section)
    }

    /// Parabolic flight over `t` with no validity checks; exact in the model:
    /// `q_i(t) = q_i + v_i t - t^2/2`, `v_i(t) = v_i - t`.
    pub(crate) fn flight_unchecked(&self, s: &PhaseState, t: f64, section: Section) -> PhaseState {
        let half = 0.5 * t * t;
        PhaseState::raw(
            [
                s.q[0] + t * s.v[0] - half,
                s.q[1] + t * s.v[1] - half,
                s.q[2] + t * s.v[2] - half,
            ],
            [s.v[0] - t, s.v[1] - t, s.v[2] - t],
            s.c,
            section,
        )
    }

    /// Free flight over `t`, rejecting intervals that cross an event.
    pub fn free_flight(&self, s: &PhaseState, t: f64) -> Result<PhaseState> {
        if t < 0.0 {
            return Err(Error::InvalidState(format!("negative flight time {t}")));
        }
        let ev = self.next_event(s)?;
        if ev.tau < t && !times_tie(ev.tau, t) {
            return Err(Error::FlightOverrun {
                event_time: ev.tau,
                requested: t,
            });
        }
        Ok(self.flight_unchecked(s, t, Section::Interior))
    }

    /// Earliest collision event from `s`, with simultaneous pairs within the
    /// tie tolerance reported as singular kinds.
    ///
    /// The floor candidate always exists under unit gravity. A floor/Pair23
    /// tie is not singular (the collisions commute) and is reported as the
    /// floor event; Pair23 then follows as a zero-time event.
    pub fn next_event(&self, s: &PhaseState) -> Result<CollisionEvent> {
        let t_floor = floor_time(s.q[0], s.v[0]);
        let t_12 = pair_time(s.q[1] - s.q[0], s.v[0] - s.v[1]);
        let t_23 = pair_time(s.q[2] - s.q[1], s.v[1] - s.v[2]);
        if !t_floor.is_finite() {
            return Err(Error::NoEvent);
        }

        let mut best = CollisionEvent {
            tau: t_floor,
            kind: EventKind::Floor01,
        };
        if let Some(t) = t_12 {
            if t < best.tau {
                best = CollisionEvent {
                    tau: t,
                    kind: EventKind::Pair12,
                };
            }
        }
        if let Some(t) = t_23 {
            if t < best.tau {
                best = CollisionEvent {
                    tau: t,
                    kind: EventKind::Pair23,
                };
            }
        }

        let floor_ties = times_tie(t_floor, best.tau);
        let tie_12 = t_12.map(|t| times_tie(t, best.tau)).unwrap_or(false);
        let tie_23 = t_23.map(|t| times_tie(t, best.tau)).unwrap_or(false);

        match (floor_ties, tie_12, tie_23) {
            (true, true, true) => Err(Error::DegenerateEvent),
            (_, true, true) => Ok(CollisionEvent {
                tau: best.tau,
                kind: EventKind::TripleSingular,
            }),
            (true, true, _) => Ok(CollisionEvent {
                tau: best.tau,
                kind: EventKind::FloorPairSingular,
            }),
            // floor + Pair23 commute: report the floor event
            (true, _, _) => Ok(CollisionEvent {
                tau: best.tau,
                kind: EventKind::Floor01,
            }),
            _ => Ok(best),
        }
    }

    /// Elastic collision law. Pair `(i,i+1)`:
    /// `v_i+ = g v_i- + (1-g) v_{i+1}-`, `v_{i+1}+ = (1+g) v_i- - g v_{i+1}-`
    /// with `g = gamma_i`; floor: `v1+ = -v1-`.
    pub fn apply_collision(&self, s: &PhaseState, kind: EventKind) -> Result<PhaseState> {
        let tol = SECTION_POS_TOL * s.q[2].abs().max(1.0);
        match kind {
            EventKind::Floor01 => {
                if s.q[0].abs() > tol || s.v[0] > 0.0 {
                    return Err(Error::KindMismatch {
                        expected: "M1- (q1=0, v1<=0)".into(),
                        got: format!("q={:?} v={:?}", s.q, s.v),
                    });
                }
                let mut v = s.v;
                v[0] = -v[0];
                Ok(PhaseState::raw(s.q, v, s.c, Section::M1Plus))
            }
            EventKind::Pair12 => {
                if (s.q[1] - s.q[0]).abs() > tol || s.v[0] <= s.v[1] {
                    return Err(Error::KindMismatch {
                        expected: "M2- (q1=q2, v1>v2)".into(),
                        got: format!("q={:?} v={:?}", s.q, s.v),
                    });
                }
                Ok(self.pair_collision_unchecked(s, 0))
            }
            EventKind::Pair23 => {
                if (s.q[2] - s.q[1]).abs() > tol || s.v[1] <= s.v[2] {
                    return Err(Error::KindMismatch {
                        expected: "M3- (q2=q3, v2>v3)".into(),
                        got: format!("q={:?} v={:?}", s.q, s.v),
                    });
                }
                Ok(self.pair_collision_unchecked(s, 1))
            }
            _ => Err(Error::KindMismatch {
                expected: "a concrete collision kind".into(),
                got: kind.label().into(),
            }),
        }
    }

    fn pair_collision_unchecked(&self, s: &PhaseState, i: usize) -> PhaseState {
        let g = self.masses.gamma_pair(i);
        let mut v = s.v;
        let (vi, vj) = (s.v[i], s.v[i + 1]);
        v[i] = g * vi + (1.0 - g) * vj;
        v[i + 1] = (1.0 + g) * vi - g * vj;
        let section = if i == 0 { Section::M2Plus } else { Section::M3Plus };
        PhaseState::raw(s.q, v, s.c, section)
    }

    /// Flight to the next event and a single Newton polish of the floor root
    /// so contact residuals stay at rounding level.
    fn arrive(&self, s: &PhaseState, ev: &CollisionEvent) -> PhaseState {
        let mut tau = ev.tau;
        if matches!(ev.kind, EventKind::Floor01 | EventKind::FloorPairSingular) {
            let slope = s.v[0] - tau;
            if slope.abs() > 1e-8 {
                let resid = s.q[0] + tau * s.v[0] - 0.5 * tau * tau;
                tau += resid / -slope;
            }
        }
        let section = match ev.kind {
            EventKind::Floor01 => Section::M1Minus,
            EventKind::Pair12 => Section::M2Minus,
            EventKind::Pair23 => Section::M3Minus,
            _ => Section::Interior,
        };
        self.flight_unchecked(s, tau.max(0.0), section)
    }

    /// The Poincare map `T`: flight to the next event, then the collision.
    /// Singular events return both continuation orderings.
    pub fn poincare_map(&self, s: &PhaseState) -> Result<StepOutcome> {
        let ev = self.next_event(s)?;
        let pre = self.arrive(s, &ev);
        match ev.kind {
            EventKind::Floor01 | EventKind::Pair12 | EventKind::Pair23 => {
                let state = self.apply_collision(&pre, ev.kind)?;
                Ok(StepOutcome::Regular(StepRecord {
                    tau: ev.tau,
                    kind: ev.kind,
                    pre,
                    state,
                }))
            }
            EventKind::TripleSingular => Ok(StepOutcome::Singular(BranchPoint {
                tau: ev.tau,
                kind: ev.kind,
                pre,
                first: Branch {
                    applied: EventKind::Pair12,
                    state: self.apply_collision(&pre, EventKind::Pair12)?,
                },
                second: Branch {
                    applied: EventKind::Pair23,
                    state: self.apply_collision(&pre, EventKind::Pair23)?,
                },
            })),
            EventKind::FloorPairSingular => Ok(StepOutcome::Singular(BranchPoint {
                tau: ev.tau,
                kind: ev.kind,
                pre,
                first: Branch {
                    applied: EventKind::Floor01,
                    state: self.apply_collision(&pre, EventKind::Floor01)?,
                },
                second: Branch {
                    applied: EventKind::Pair12,
                    state: self.apply_collision(&pre, EventKind::Pair12)?,
                },
            })),
        }
    }

    /// One non-singular step, as a convenience for cocycle code.
    pub fn step(&self, s: &PhaseState) -> Result<StepRecord> {
        match self.poincare_map(s)? {
            StepOutcome::Regular(rec) => Ok(rec),
            StepOutcome::Singular(_) => Err(Error::SingularEvent),
        }
    }

    /// Collision kinds admissible for a pre-collision configuration.
    fn matching_pre_kinds(&self, z: &PhaseState) -> Vec<EventKind> {
        let tol = SECTION_POS_TOL * z.q[2].abs().max(1.0);
        let mut kinds = Vec::with_capacity(2);
        if z.q[0].abs() <= tol && z.v[0] < 0.0 {
            kinds.push(EventKind::Floor01);
        }
        if (z.q[1] - z.q[0]).abs() <= tol && z.v[0] > z.v[1] {
            kinds.push(EventKind::Pair12);
        }
        if (z.q[2] - z.q[1]).abs() <= tol && z.v[1] > z.v[2] {
            kinds.push(EventKind::Pair23);
        }
        kinds
    }

    /// Pre-collision step `collide then fly to the next arrival`, used by the
    /// inverse map. Returns the arrival (pre-collision) state.
    fn pre_step(&self, z: &PhaseState, kind: EventKind) -> Result<(f64, PhaseState)> {
        let w = self.apply_collision(z, kind)?;
        let ev = self.next_event(&w)?;
        if ev.kind.is_singular() {
            // Arrival where two collisions coincide: a valid pre-state for
            // either; label by the dominant contact for bookkeeping.
            let pre = self.arrive(&w, &ev);
            return Ok((ev.tau, pre));
        }
        Ok((ev.tau, self.arrive(&w, &ev)))
    }

    /// The inverse Poincare map, realized as `R . (collide; fly) . R` with
    /// `R(q, v) = (q, -v)`. On states with two admissible reversed collisions
    /// (triple contact, floor-pair contact) it returns both branches.
    pub fn poincare_inverse(&self, s: &PhaseState) -> Result<StepOutcome> {
        let z = s.reversed();
        let kinds = self.matching_pre_kinds(&z);
        match kinds.len() {
            0 => Err(Error::InvalidState(
                "state has no admissible reversed collision; not on M+".into(),
            )),
            1 => {
                let (tau, arrival) = self.pre_step(&z, kinds[0])?;
                Ok(StepOutcome::Regular(StepRecord {
                    tau,
                    kind: kinds[0],
                    pre: z,
                    state: arrival.reversed(),
                }))
            }
            2 => {
                // floor + Pair23 commute; undo the floor deterministically
                if kinds.contains(&EventKind::Floor01) && kinds.contains(&EventKind::Pair23) {
                    let (tau, arrival) = self.pre_step(&z, EventKind::Floor01)?;
                    return Ok(StepOutcome::Regular(StepRecord {
                        tau,
                        kind: EventKind::Floor01,
                        pre: z,
                        state: arrival.reversed(),
                    }));
                }
                let singular_kind = if kinds.contains(&EventKind::Floor01) {
                    EventKind::FloorPairSingular
                } else {
                    EventKind::TripleSingular
                };
                let (tau_a, arr_a) = self.pre_step(&z, kinds[0])?;
                let (tau_b, arr_b) = self.pre_step(&z, kinds[1])?;
                Ok(StepOutcome::Singular(BranchPoint {
                    tau: tau_a.min(tau_b),
                    kind: singular_kind,
                    pre: z,
                    first: Branch {
                        applied: kinds[0],
                        state: arr_a.reversed(),
                    },
                    second: Branch {
                        applied: kinds[1],
                        state: arr_b.reversed(),
                    },
                }))
            }
            _ => Err(Error::DegenerateEvent),
        }
    }

    /// Run `n` collisions forward, resolving singular events by `policy`.
    pub fn run_orbit(&self, x0: &PhaseState, n: usize, policy: SingularPolicy) -> Result<OrbitLog> {
        let mut log = OrbitLog {
            initial: *x0,
            entries: Vec::with_capacity(n),
        };
        let mut x = *x0;
        let mut t = 0.0;
        let mut zero_run = 0usize;
        for step in 0..n {
            let (entry, state) = match self.poincare_map(&x)? {
                StepOutcome::Regular(rec) => (
                    OrbitEntry {
                        kind: rec.kind,
                        time: t + rec.tau,
                        pre: rec.pre,
                        state: rec.state,
                        branched: false,
                    },
                    rec.state,
                ),
                StepOutcome::Singular(bp) => {
                    let branch = match policy {
                        SingularPolicy::Error => return Err(Error::SingularOrbit { step }),
                        SingularPolicy::First => bp.first,
                        SingularPolicy::Second => bp.second,
                    };
                    (
                        OrbitEntry {
                            kind: branch.applied,
                            time: t + bp.tau,
                            pre: bp.pre,
                            state: branch.state,
                            branched: true,
                        },
                        branch.state,
                    )
                }
            };
            if entry.time == t && step > 0 {
                zero_run += 1;
                if zero_run > CASCADE_LIMIT {
                    return Err(Error::CascadeOverflow);
                }
            } else {
                zero_run = 0;
            }
            t = entry.time;
            log.entries.push(entry);
            x = state;
        }
        Ok(log)
    }

    /// Apply all zero-time follow-up collisions after a branch continuation,
    /// returning the first state from which the next event has positive time.
    pub fn settle_instant(&self, s: &PhaseState) -> Result<PhaseState> {
        let mut x = *s;
        for _ in 0..CASCADE_LIMIT {
            let ev = self.next_event(&x)?;
            if ev.tau > 0.0 && !times_tie(ev.tau, 0.0) {
                return Ok(x);
            }
            match self.poincare_map(&x)? {
                StepOutcome::Regular(rec) => x = rec.state,
                StepOutcome::Singular(_) => return Err(Error::SingularEvent),
            }
        }
        Err(Error::CascadeOverflow)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys321() -> System {
        System::new(MassModel::new(3.0, 2.0, 1.0).unwrap())
    }

    #[test]
    fn free_flight_matches_parabola() {
        let sys = sys321();
        let s = sys
            .state([0.0, 1.0, 3.0], [1.0, 0.5, 0.0], Section::Interior)
            .unwrap();
        let out = sys.free_flight(&s, 1.0).unwrap();
        assert_eq!(out.q, [0.5, 1.0, 2.5]);
        assert_eq!(out.v, [0.0, -0.5, -1.0]);
        assert_eq!(out.energy(sys.masses()), s.c);
        // t = 0 is the identity
        let id = sys.free_flight(&s, 0.0).unwrap();
        assert_eq!(id.q, s.q);
        assert_eq!(id.v, s.v);
    }

    #[test]
    fn free_flight_overrun_is_rejected() {
        let sys = sys321();
        let s = sys
            .state([0.0, 1.0, 3.0], [2.0, 0.0, 0.0], Section::M1Plus)
            .unwrap();
        // Pair12 at tau = 0.5 blocks a flight of 1.0
        assert!(matches!(
            sys.free_flight(&s, 1.0),
            Err(Error::FlightOverrun { .. })
        ));
    }

    #[test]
    fn floor_recontact_root() {
        let sys = sys321();
        let s = sys
            .state([0.0, 10.0, 11.0], [2.0, 0.0, 0.0], Section::M1Plus)
            .unwrap();
        let ev = sys.next_event(&s).unwrap();
        assert_eq!(ev.kind, EventKind::Floor01);
        assert!((ev.tau - 4.0).abs() < 1e-14);
        let pre = sys.arrive(&s, &ev);
        assert!(pre.q[0].abs() < 1e-14);
        assert!((pre.v[0] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn next_event_picks_minimum_and_detects_triple() {
        let sys = sys321();
        let s = sys
            .state([0.0, 1.0, 3.0], [2.0, 0.0, 0.0], Section::M1Plus)
            .unwrap();
        let ev = sys.next_event(&s).unwrap();
        assert_eq!(ev.kind, EventKind::Pair12);
        assert!((ev.tau - 0.5).abs() < 1e-15);

        let s = sys
            .state([0.0, 1.0, 2.0], [2.0, 1.0, 0.0], Section::M1Plus)
            .unwrap();
        let ev = sys.next_event(&s).unwrap();
        assert_eq!(ev.kind, EventKind::TripleSingular);
        assert!((ev.tau - 1.0).abs() < 1e-15);
    }

    #[test]
    fn immediate_floor_event_at_rest_boundary() {
        let sys = sys321();
        let s = sys
            .state([0.0, 1.0, 3.0], [0.0, 0.0, 0.0], Section::M1Plus)
            .unwrap();
        let ev = sys.next_event(&s).unwrap();
        assert_eq!(ev.kind, EventKind::Floor01);
        assert_eq!(ev.tau, 0.0);
    }

    #[test]
    fn pair_collision_conserves_momentum_and_energy() {
        let sys = System::new(MassModel::new(4.0, 2.0, 1.2).unwrap());
        let s = sys
            .state([1.0, 1.0, 3.0], [1.0, -1.0, 0.0], Section::M2Minus)
            .unwrap();
        let out = sys.apply_collision(&s, EventKind::Pair12).unwrap();
        assert!((out.v[0] + 1.0 / 3.0).abs() < 1e-15);
        assert!((out.v[1] - 5.0 / 3.0).abs() < 1e-15);
        let p_before = 4.0 * 1.0 + 2.0 * (-1.0);
        let p_after = 4.0 * out.v[0] + 2.0 * out.v[1];
        assert!((p_before - p_after).abs() < 1e-12);
        let ke = |v: &[f64; 3]| 0.5 * (4.0 * v[0] * v[0] + 2.0 * v[1] * v[1]);
        assert!((ke(&s.v) - ke(&out.v)).abs() < 1e-12);
    }

    #[test]
    fn floor_collision_reverses_v1() {
        let sys = sys321();
        let s = sys
            .state([0.0, 1.0, 3.0], [-2.0, 0.0, 0.0], Section::M1Minus)
            .unwrap();
        let out = sys.apply_collision(&s, EventKind::Floor01).unwrap();
        assert_eq!(out.v[0], 2.0);
        assert_eq!(out.section, Section::M1Plus);
    }

    #[test]
    fn equal_mass_pair_swaps_velocities() {
        let sys = System::new(MassModel::new(2.0, 1.0, 1.0).unwrap());
        let s = sys
            .state([0.5, 1.0, 1.0], [0.0, 3.0, -1.0], Section::M3Minus)
            .unwrap();
        let out = sys.apply_collision(&s, EventKind::Pair23).unwrap();
        assert_eq!(out.v[1], -1.0);
        assert_eq!(out.v[2], 3.0);
    }

    #[test]
    fn kind_mismatch_rejected() {
        let sys = sys321();
        let s = sys
            .state([0.0, 1.0, 3.0], [2.0, 0.0, 0.0], Section::M1Plus)
            .unwrap();
        assert!(sys.apply_collision(&s, EventKind::Pair12).is_err());
        assert!(sys.apply_collision(&s, EventKind::Floor01).is_err()); // v1 > 0
    }

    #[test]
    fn poincare_map_composes_flight_and_collision() {
        let sys = sys321();
        let s = sys
            .state([0.0, 1.0, 3.0], [2.0, 0.0, 0.0], Section::M1Plus)
            .unwrap();
        match sys.poincare_map(&s).unwrap() {
            StepOutcome::Regular(rec) => {
                assert_eq!(rec.kind, EventKind::Pair12);
                assert!(rec.state.section.is_post_collision());
                // arrival velocities: v = (2,0,0) - 0.5
                assert!((rec.pre.v[0] - 1.5).abs() < 1e-14);
            }
            _ => panic!("expected regular step"),
        }
    }

    #[test]
    fn triple_singular_branches_differ() {
        let sys = sys321();
        let s = sys
            .state([0.0, 1.0, 2.0], [2.0, 1.0, 0.0], Section::M1Plus)
            .unwrap();
        match sys.poincare_map(&s).unwrap() {
            StepOutcome::Singular(bp) => {
                assert_eq!(bp.kind, EventKind::TripleSingular);
                assert!(bp.first.state.v != bp.second.state.v);
                let drift_a = bp.first.state.energy_drift(sys.masses());
                let drift_b = bp.second.state.energy_drift(sys.masses());
                assert!(drift_a < 1e-12 && drift_b < 1e-12);
            }
            _ => panic!("expected singular step"),
        }
    }

    #[test]
    fn inverse_undoes_forward_step() {
        let sys = sys321();
        let s = sys
            .state([0.0, 1.0, 3.0], [2.0, 0.0, -0.5], Section::M1Plus)
            .unwrap();
        let fwd = match sys.poincare_map(&s).unwrap() {
            StepOutcome::Regular(rec) => rec.state,
            _ => panic!(),
        };
        let back = match sys.poincare_inverse(&fwd).unwrap() {
            StepOutcome::Regular(rec) => rec.state,
            _ => panic!("expected regular inverse"),
        };
        for i in 0..3 {
            assert!((back.q[i] - s.q[i]).abs() < 1e-12, "q{i}");
            assert!((back.v[i] - s.v[i]).abs() < 1e-12, "v{i}");
        }
    }

    #[test]
    fn orbit_log_times_increase_on_regular_orbits() {
        let sys = sys321();
        let s = sys
            .state([0.0, 1.0, 3.0], [2.0, 0.0, -0.5], Section::M1Plus)
            .unwrap();
        let log = sys.run_orbit(&s, 200, SingularPolicy::Error).unwrap();
        assert_eq!(log.collisions(), 200);
        let mut prev = 0.0;
        for e in &log.entries {
            assert!(e.time > prev);
            prev = e.time;
        }
        // drift stays tiny
        assert!(log.last_state().energy_drift(sys.masses()) < 1e-12);
    }
}
