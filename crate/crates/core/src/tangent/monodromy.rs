//! The derivative cocycle of the Poincare map in `(h, v)` coordinates.
//!
//! Along free flight `h` is constant and `dv/dt = -1` for every ball, so the
//! flight derivative is the identity and the full step derivative is the
//! collision derivative composed with the return-time correction
//! `(dh, dv) -> (dh, dv - dtau (1,1,1))`, where `dtau` comes from
//! differentiating the arrival-section constraint:
//!
//! - floor (`q1(tau) = 0`):  `dtau = dv1 - dh1 / (m1 v1-)`
//! - pair `(i,j)` (`q_i = q_j`):
//!   `dtau = (v_i- dv_i - v_j- dv_j - dh_i/m_i + dh_j/m_j) / (v_i- - v_j-)`
//!
//! The collision derivative leaves `dh` unchanged at the floor
//! (`dv1 -> -dv1`) and exchanges pair energy via
//! `dh_i -> dh_i + m_i (v_i+ dv_i+ - v_i- dv_i-)`.

use nalgebra::{Matrix6, RowVector6, Vector6};

use super::vector::TangentVector;
use crate::dynamics::{
    Branch, BranchPoint, EventKind, MassModel, PhaseState, StepOutcome, StepRecord, System,
};
use crate::error::{Error, Result};

/// A linear map between tangent spaces along the Poincare map, with the
/// provenance of the step that produced it.
#[derive(Debug, Clone)]
pub struct Monodromy {
    pub mat: Matrix6<f64>,
    pub source: PhaseState,
    pub target: PhaseState,
    /// Collision kind for single steps; `None` for products.
    pub kind: Option<EventKind>,
    /// `beta` for floor steps, `alpha_i` for pair steps, `None` for products.
    pub coeff: Option<f64>,
}

impl Monodromy {
    pub fn identity(at: PhaseState) -> Self {
        Monodromy {
            mat: Matrix6::identity(),
            source: at,
            target: at,
            kind: None,
            coeff: None,
        }
    }

    pub fn apply(&self, t: &TangentVector) -> TangentVector {
        let x = Vector6::new(t.dh[0], t.dh[1], t.dh[2], t.dv[0], t.dv[1], t.dv[2]);
        let y = self.mat * x;
        TangentVector::new([y[0], y[1], y[2]], [y[3], y[4], y[5]])
    }

    /// Compose: `other` acts after `self`.
    pub fn then(&self, other: &Monodromy) -> Monodromy {
        Monodromy {
            mat: other.mat * self.mat,
            source: self.source,
            target: other.target,
            kind: None,
            coeff: None,
        }
    }
}

/// `beta = -2 / (m1 v1-)`; positive at a floor arrival (`v1- < 0`). The floor
/// step grows Q by exactly `beta * dh1^2` on energy-reduced vectors.
pub fn beta_coeff(masses: &MassModel, v1_arrival: f64) -> f64 {
    -2.0 / (masses.m(0) * v1_arrival)
}

/// `alpha_i = 2 m_i m_j (m_i - m_j)(v_i- - v_j-) / (m_i + m_j)^2`, `j = i+1`;
/// nonnegative at a pair arrival. The pair step grows Q by exactly
/// `alpha_i * (dv_i- - dv_j-)^2`.
pub fn alpha_coeff(masses: &MassModel, pair: usize, approach: f64) -> f64 {
    let mi = masses.m(pair);
    let mj = masses.m(pair + 1);
    2.0 * mi * mj * (mi - mj) * approach / ((mi + mj) * (mi + mj))
}

/// Return-time correction: `I` on `dh`, `dv -> dv - dtau(dh,dv) (1,1,1)`.
fn flight_correction(masses: &MassModel, arrival: &PhaseState, kind: EventKind) -> Matrix6<f64> {
    let u = arrival.v;
    let mut dtau = RowVector6::zeros();
    match kind {
        EventKind::Floor01 => {
            // dtau = dv1 - dh1/(m1 u1)
            dtau[0] = -1.0 / (masses.m(0) * u[0]);
            dtau[3] = 1.0;
        }
        EventKind::Pair12 | EventKind::Pair23 => {
            let i = if kind == EventKind::Pair12 { 0 } else { 1 };
            let j = i + 1;
            let rel = u[i] - u[j];
            dtau[i] = -1.0 / (masses.m(i) * rel);
            dtau[j] = 1.0 / (masses.m(j) * rel);
            dtau[3 + i] = u[i] / rel;
            dtau[3 + j] = -u[j] / rel;
        }
        _ => unreachable!("flight correction needs a concrete collision kind"),
    }
    let mut f = Matrix6::identity();
    for row in 3..6 {
        for col in 0..6 {
            f[(row, col)] -= dtau[col];
        }
    }
    f
}

/// Derivative of the instantaneous collision at the arrival state.
fn collision_derivative(masses: &MassModel, arrival: &PhaseState, kind: EventKind) -> Matrix6<f64> {
    let mut c = Matrix6::identity();
    match kind {
        EventKind::Floor01 => {
            c[(3, 3)] = -1.0;
        }
        EventKind::Pair12 | EventKind::Pair23 => {
            let i = if kind == EventKind::Pair12 { 0 } else { 1 };
            let j = i + 1;
            let g = masses.gamma_pair(i);
            let (ui, uj) = (arrival.v[i], arrival.v[j]);
            let wi = g * ui + (1.0 - g) * uj;
            let wj = (1.0 + g) * ui - g * uj;
            // velocity mixing
            c[(3 + i, 3 + i)] = g;
            c[(3 + i, 3 + j)] = 1.0 - g;
            c[(3 + j, 3 + i)] = 1.0 + g;
            c[(3 + j, 3 + j)] = -g;
            // energy exchange: dh_i += m_i (w_i dv_i+ - u_i dv_i-)
            let mi = masses.m(i);
            let mj = masses.m(j);
            c[(i, 3 + i)] = mi * (wi * g - ui);
            c[(i, 3 + j)] = mi * wi * (1.0 - g);
            c[(j, 3 + i)] = mj * wj * (1.0 + g);
            c[(j, 3 + j)] = mj * (-wj * g - uj);
        }
        _ => unreachable!("collision derivative needs a concrete collision kind"),
    }
    c
}

fn step_coeff(masses: &MassModel, arrival: &PhaseState, kind: EventKind) -> f64 {
    match kind {
        EventKind::Floor01 => beta_coeff(masses, arrival.v[0]),
        EventKind::Pair12 => alpha_coeff(masses, 0, arrival.v[0] - arrival.v[1]),
        EventKind::Pair23 => alpha_coeff(masses, 1, arrival.v[1] - arrival.v[2]),
        _ => f64::NAN,
    }
}

/// How often a running product is rescaled to avoid overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenormPolicy {
    Disabled,
    /// Rescale every `cadence` steps, or earlier if any entry exceeds 1e100.
    Every(usize),
}

impl Default for RenormPolicy {
    fn default() -> Self {
        RenormPolicy::Every(16)
    }
}

impl System {
    fn monodromy_from_parts(
        &self,
        source: &PhaseState,
        pre: &PhaseState,
        state: &PhaseState,
        kind: EventKind,
    ) -> Monodromy {
        let masses = self.masses();
        let f = flight_correction(masses, pre, kind);
        let c = collision_derivative(masses, pre, kind);
        Monodromy {
            mat: c * f,
            source: *source,
            target: *state,
            kind: Some(kind),
            coeff: Some(step_coeff(masses, pre, kind)),
        }
    }

    /// One forward step together with its derivative. Errors on singular
    /// events; use [`System::branch_step_with_monodromy`] to follow branches.
    pub fn step_with_monodromy(&self, x: &PhaseState) -> Result<(StepRecord, Monodromy)> {
        match self.poincare_map(x)? {
            StepOutcome::Regular(rec) => {
                let m = self.monodromy_from_parts(x, &rec.pre, &rec.state, rec.kind);
                Ok((rec, m))
            }
            StepOutcome::Singular(_) => Err(Error::SingularEvent),
        }
    }

    /// Derivative of one chosen branch continuation of a singular event.
    pub fn branch_step_with_monodromy(
        &self,
        x: &PhaseState,
        bp: &BranchPoint,
        branch: &Branch,
    ) -> Monodromy {
        self.monodromy_from_parts(x, &bp.pre, &branch.state, branch.applied)
    }

    /// The derivative of the Poincare map at `x` (non-singular next event).
    pub fn monodromy_step(&self, x: &PhaseState) -> Result<Monodromy> {
        Ok(self.step_with_monodromy(x)?.1)
    }

    /// Derivative of the inverse map at `x`, as `dR . dT~ . dR` where `T~`
    /// applies the reversed collision first and then flies to the arrival.
    pub fn monodromy_inverse_step(&self, x: &PhaseState) -> Result<Monodromy> {
        let outcome = self.poincare_inverse(x)?;
        let rec = match outcome {
            StepOutcome::Regular(rec) => rec,
            StepOutcome::Singular(_) => return Err(Error::SingularEvent),
        };
        self.inverse_monodromy_for(x, rec.kind, &rec.state)
    }

    /// Derivative of one inverse-step continuation: `undone` is the collision
    /// removed at `x`, `predecessor` the resulting earlier state.
    pub fn inverse_monodromy_for(
        &self,
        x: &PhaseState,
        undone: EventKind,
        predecessor: &PhaseState,
    ) -> Result<Monodromy> {
        let masses = *self.masses();
        let z = x.reversed();
        let arrival = predecessor.reversed();
        let arrival_kind = match arrival.section {
            crate::dynamics::Section::M1Minus => EventKind::Floor01,
            crate::dynamics::Section::M2Minus => EventKind::Pair12,
            crate::dynamics::Section::M3Minus => EventKind::Pair23,
            _ => {
                return Err(Error::InvalidState(
                    "inverse arrival is not on a pre-collision section".into(),
                ))
            }
        };
        let c_start = collision_derivative(&masses, &z, undone);
        let f = flight_correction(&masses, &arrival, arrival_kind);
        let mut r = Matrix6::identity();
        for i in 3..6 {
            r[(i, i)] = -1.0;
        }
        Ok(Monodromy {
            mat: r * f * c_start * r,
            source: *x,
            target: *predecessor,
            kind: Some(undone),
            coeff: None,
        })
    }

    /// Ordered product of step derivatives along a non-singular orbit of
    /// length `n`. Returns the (possibly rescaled) product and the accumulated
    /// `log` of the scale divided out; Q-ratios at fixed step are unaffected
    /// by the rescaling.
    pub fn monodromy_product(
        &self,
        x: &PhaseState,
        n: usize,
        renorm: RenormPolicy,
    ) -> Result<(Monodromy, f64)> {
        let mut acc = Monodromy::identity(*x);
        let mut log_scale = 0.0;
        let mut state = *x;
        for step in 0..n {
            let (rec, m) = self
                .step_with_monodromy(&state)
                .map_err(|e| match e {
                    Error::SingularEvent => Error::SingularOrbit { step },
                    other => other,
                })?;
            acc = acc.then(&m);
            state = rec.state;
            let due = match renorm {
                RenormPolicy::Disabled => false,
                RenormPolicy::Every(k) => (step + 1) % k.max(1) == 0,
            };
            let amax = acc.mat.amax();
            if (due && amax > 0.0) || amax > 1e100 {
                acc.mat /= amax;
                log_scale += amax.ln();
            }
        }
        acc.target = state;
        Ok((acc, log_scale))
    }
}
