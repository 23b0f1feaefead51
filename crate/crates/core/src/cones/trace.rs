//! Q-growth traces along forward and backward orbits.
//!
//! Forward traces of closed-cone vectors are nondecreasing and diverge to
//! `+infinity`; backward traces mirror them to `-infinity`. Singular events
//! split a trace into one continuation per branch ordering.

use crate::dynamics::{
    Branch, BranchPoint, EventKind, PhaseState, SingularPolicy, StepOutcome, System,
};
use crate::error::{Error, Result};
use crate::tangent::{Monodromy, TangentVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum TraceDirection {
    Forward,
    Backward,
}

/// One Q-trace: `q[k] = Q(dT^{+-k} v)` with `q[0] = Q(v)`.
#[derive(Debug, Clone)]
pub struct Trace {
    pub direction: TraceDirection,
    pub q: Vec<f64>,
    /// First index with `q >= threshold` (forward) or `q <= -threshold`
    /// (backward), when a threshold was supplied.
    pub crossing: Option<usize>,
    /// Branch orderings taken at singular events along this trace.
    pub branch_choices: Vec<EventKind>,
    /// Whether the trace ended early at an unresolvable point.
    pub truncated: bool,
}

impl Trace {
    fn new(direction: TraceDirection, q0: f64) -> Self {
        Trace {
            direction,
            q: vec![q0],
            crossing: None,
            branch_choices: Vec::new(),
            truncated: false,
        }
    }

    fn crossed(&self, threshold: Option<f64>) -> bool {
        self.crossing.is_some() && threshold.is_some()
    }

    fn push(&mut self, q: f64, threshold: Option<f64>) {
        self.q.push(q);
        if self.crossing.is_none() {
            if let Some(th) = threshold {
                let hit = match self.direction {
                    TraceDirection::Forward => q >= th,
                    TraceDirection::Backward => q <= -th,
                };
                if hit {
                    self.crossing = Some(self.q.len() - 1);
                }
            }
        }
    }
}

struct Pending {
    state: PhaseState,
    vector: TangentVector,
    trace: Trace,
    steps_left: usize,
}

fn backward_branch_monodromy(
    sys: &System,
    x: &PhaseState,
    branch: &Branch,
) -> Result<Monodromy> {
    sys.inverse_monodromy_for(x, branch.applied, &branch.state)
}

/// Trace Q along the orbit of `x`, splitting at singular events (both
/// orderings, up to `max_branches` concurrent continuations). With
/// `threshold = Some(t)` each trace stops at its first crossing.
pub fn trace_branching(
    sys: &System,
    x: &PhaseState,
    v: &TangentVector,
    steps: usize,
    threshold: Option<f64>,
    direction: TraceDirection,
    max_branches: usize,
) -> Vec<Trace> {
    let mut done = Vec::new();
    let mut queue = vec![Pending {
        state: *x,
        vector: *v,
        trace: Trace::new(direction, v.q_form()),
        steps_left: steps,
    }];
    while let Some(mut p) = queue.pop() {
        let mut requeued = false;
        while p.steps_left > 0 && !p.trace.crossed(threshold) {
            p.steps_left -= 1;
            let outcome = match direction {
                TraceDirection::Forward => sys.poincare_map(&p.state),
                TraceDirection::Backward => sys.poincare_inverse(&p.state),
            };
            match outcome {
                Ok(StepOutcome::Regular(rec)) => {
                    let m = match direction {
                        TraceDirection::Forward => sys.monodromy_step(&p.state),
                        TraceDirection::Backward => sys.monodromy_inverse_step(&p.state),
                    };
                    match m {
                        Ok(m) => {
                            p.vector = m.apply(&p.vector);
                            p.state = rec.state;
                            p.trace.push(p.vector.q_form(), threshold);
                        }
                        Err(_) => {
                            p.trace.truncated = true;
                            break;
                        }
                    }
                }
                Ok(StepOutcome::Singular(bp)) => {
                    let branches = [bp.first, bp.second];
                    let mut spawned = 0usize;
                    for br in branches.iter() {
                        let m = match direction {
                            TraceDirection::Forward => {
                                Ok(sys.branch_step_with_monodromy(&p.state, &bp, br))
                            }
                            TraceDirection::Backward => backward_branch_monodromy(sys, &p.state, br),
                        };
                        let m = match m {
                            Ok(m) => m,
                            Err(_) => continue,
                        };
                        if spawned > 0 && done.len() + queue.len() >= max_branches {
                            break;
                        }
                        let mut trace = p.trace.clone();
                        trace.branch_choices.push(br.applied);
                        let vector = m.apply(&p.vector);
                        trace.push(vector.q_form(), threshold);
                        queue.push(Pending {
                            state: br.state,
                            vector,
                            trace,
                            steps_left: p.steps_left,
                        });
                        spawned += 1;
                    }
                    if spawned == 0 {
                        p.trace.truncated = true;
                        break;
                    }
                    requeued = true;
                    break;
                }
                Err(_) => {
                    p.trace.truncated = true;
                    break;
                }
            }
        }
        if !requeued {
            done.push(p.trace);
        }
    }
    done
}

impl System {
    /// Q-values of `v` along `n` forward steps (no branching; `policy`
    /// resolves singular events or fails).
    pub fn unboundedness_trace(
        &self,
        x: &PhaseState,
        v: &TangentVector,
        n: usize,
        threshold: Option<f64>,
        policy: SingularPolicy,
    ) -> Result<Trace> {
        let mut state = *x;
        let mut vector = *v;
        let mut trace = Trace::new(TraceDirection::Forward, v.q_form());
        for step in 0..n {
            if trace.crossed(threshold) {
                break;
            }
            match self.poincare_map(&state)? {
                StepOutcome::Regular(rec) => {
                    let m = self.monodromy_step(&state)?;
                    vector = m.apply(&vector);
                    state = rec.state;
                }
                StepOutcome::Singular(bp) => {
                    let branch = match policy {
                        SingularPolicy::Error => return Err(Error::SingularOrbit { step }),
                        SingularPolicy::First => bp.first,
                        SingularPolicy::Second => bp.second,
                    };
                    let m = self.branch_step_with_monodromy(&state, &bp, &branch);
                    vector = m.apply(&vector);
                    trace.branch_choices.push(branch.applied);
                    state = branch.state;
                }
            }
            trace.push(vector.q_form(), threshold);
        }
        Ok(trace)
    }

    /// Q-values of `v` along `n` backward steps.
    pub fn backward_trace(
        &self,
        x: &PhaseState,
        v: &TangentVector,
        n: usize,
        threshold: Option<f64>,
    ) -> Result<Trace> {
        let mut state = *x;
        let mut vector = *v;
        let mut trace = Trace::new(TraceDirection::Backward, v.q_form());
        for step in 0..n {
            if trace.crossed(threshold) {
                break;
            }
            let m = self.monodromy_inverse_step(&state).map_err(|e| match e {
                Error::SingularEvent => Error::SingularOrbit { step },
                other => other,
            })?;
            vector = m.apply(&vector);
            state = m.target;
            trace.push(vector.q_form(), threshold);
        }
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{sample_rng, MassModel, Section};

    fn sys() -> System {
        System::new(MassModel::new(3.0, 2.0, 1.0).unwrap())
    }

    #[test]
    fn forward_traces_are_nondecreasing() {
        let sys = sys();
        let mut rng = sample_rng(31, 0);
        use rand::Rng;
        for i in 0..30 {
            let x = sys
                .sample_phase_point(10.0, Section::M1Plus, &mut rng)
                .unwrap();
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            let v = TangentVector::new(
                [a, b, -a - b],
                [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0],
            );
            let tr = match sys.unboundedness_trace(&x, &v, 40, None, SingularPolicy::Error) {
                Ok(t) => t,
                Err(_) => continue,
            };
            for w in tr.q.windows(2) {
                assert!(
                    w[1] >= w[0] - 1e-10 * (1.0 + w[0].abs()),
                    "sample {i}: Q decreased {} -> {}",
                    w[0],
                    w[1]
                );
            }
        }
    }

    #[test]
    fn backward_traces_are_nonincreasing() {
        let sys = sys();
        let mut rng = sample_rng(32, 0);
        use rand::Rng;
        for _ in 0..20 {
            let x = sys
                .sample_phase_point(10.0, Section::M1Plus, &mut rng)
                .unwrap();
            let a: f64 = rng.gen_range(-1.0..1.0);
            let v = TangentVector::new([a, -a, 0.0], [0.0, rng.gen_range(-1.0..1.0), 0.0]);
            let tr = match sys.backward_trace(&x, &v, 30, None) {
                Ok(t) => t,
                Err(_) => continue,
            };
            for w in tr.q.windows(2) {
                assert!(w[1] <= w[0] + 1e-10 * (1.0 + w[0].abs()));
            }
        }
    }

    #[test]
    fn cone_vectors_cross_thresholds_both_ways() {
        let sys = sys();
        let x = sys
            .sample_phase_point(10.0, Section::M1Plus, &mut sample_rng(33, 4))
            .unwrap();
        let v = TangentVector::new([0.5, -0.2, -0.3], [0.4, -0.3, 0.1]);
        assert!(v.q_form() > 0.0);
        let fwd = sys
            .unboundedness_trace(&x, &v, 4000, Some(1e3), SingularPolicy::First)
            .unwrap();
        assert!(fwd.crossing.is_some(), "no forward crossing");
        let bwd = sys.backward_trace(&x, &v, 4000, Some(1e3)).unwrap();
        assert!(bwd.crossing.is_some(), "no backward crossing");
    }

    #[test]
    fn branching_tracer_follows_both_orderings() {
        let sys = sys();
        // exact triple collision ahead
        let x = sys
            .state([0.0, 1.0, 2.0], [2.0, 1.0, 0.0], Section::M1Plus)
            .unwrap();
        let v = TangentVector::new([0.5, -0.2, -0.3], [0.4, -0.3, 0.1]);
        let traces = trace_branching(&sys, &x, &v, 5, None, TraceDirection::Forward, 16);
        assert!(traces.len() >= 2, "expected both branch continuations");
        for t in &traces {
            assert!(!t.branch_choices.is_empty());
        }
    }
}
