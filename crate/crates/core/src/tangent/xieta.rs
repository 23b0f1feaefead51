//! Per-collision jump blocks in `(xi, eta)` form, used as a structural
//! cross-check of the normative `(h, v)` monodromy.
//!
//! The blocks act on tangent coordinates built from partial energy sums and
//! velocity differences; on the energy reduction these are exactly
//! [`TangentVector::reduced`]. The floor jump is lower triangular with the
//! `beta` entry, the pair jumps are upper triangular with involutive
//! diagonal blocks `M1`, `M2` and a single `alpha_i` coupling entry.
//!
//! Sign calibration: Q-monotonicity forces the sign of each `alpha`/`beta`
//! coupling entry. With the conventions here, `beta` enters with `+1` and
//! both `alpha_i` with `-1`; the calibration is recorded per block.

use nalgebra::{Matrix2, Matrix3, Matrix4, Matrix6, Vector4};

use super::monodromy::{alpha_coeff, beta_coeff};
use super::vector::q_reduced;
use crate::dynamics::{EventKind, MassModel, OrbitLog, PhaseState};
use crate::error::{Error, Result};

/// The Cheng-Wojtkowski seminorm
/// `|dxi|_CW^2 = sum_{i=1,2} (dxi_{i+1} - dxi_i)^2 / m_i`.
///
/// Zero exactly on constant vectors; a norm on `{dxi_1 = 0}`. The pair
/// blocks `M1`, `M2` are isometries for it.
pub fn cw_norm(dxi: &[f64; 3], masses: &MassModel) -> f64 {
    let d1 = dxi[1] - dxi[0];
    let d2 = dxi[2] - dxi[1];
    (d1 * d1 / masses.m(0) + d2 * d2 / masses.m(1)).sqrt()
}

/// The printed jump blocks for one collision, with calibrated signs.
#[derive(Debug, Clone)]
pub struct XiEtaBlocks {
    pub kind: EventKind,
    pub b: Matrix3<f64>,
    pub u1: Matrix3<f64>,
    pub u2: Matrix3<f64>,
    pub m1: Matrix3<f64>,
    pub m2: Matrix3<f64>,
    /// Assembled 6x6 jump for this collision kind.
    pub dphi: Matrix6<f64>,
    /// Signs applied to `(beta, alpha1, alpha2)` so Q-monotonicity holds.
    pub sign_calibration: [f64; 3],
    /// The coupling value actually used (`beta` or `alpha_i`).
    pub coeff: f64,
}

/// Calibrated coupling signs `(beta, alpha1, alpha2)`.
pub const SIGN_CALIBRATION: [f64; 3] = [1.0, -1.0, -1.0];

fn m1_block(gamma1: f64) -> Matrix3<f64> {
    Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 1.0 + gamma1, 0.0, 0.0, 1.0)
}

fn m2_block(gamma2: f64) -> Matrix3<f64> {
    Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0 - gamma2, -1.0)
}

/// Build the blocks for a collision of `kind` with the given pre-collision
/// velocities. Pair kinds need a positive approach speed.
pub fn dphi_xieta(
    kind: EventKind,
    masses: &MassModel,
    pre_velocities: &[f64; 3],
) -> Result<XiEtaBlocks> {
    let (g1, g2) = masses.gamma();
    let m1 = m1_block(g1);
    let m2 = m2_block(g2);
    let mut b = Matrix3::zeros();
    let mut u1 = Matrix3::zeros();
    let mut u2 = Matrix3::zeros();
    let coeff;
    match kind {
        EventKind::Floor01 => {
            if pre_velocities[0] >= 0.0 {
                return Err(Error::KindMismatch {
                    expected: "floor arrival with v1 < 0".into(),
                    got: format!("v = {pre_velocities:?}"),
                });
            }
            let beta = beta_coeff(masses, pre_velocities[0]);
            coeff = beta;
            b[(0, 0)] = 1.0;
            b[(1, 1)] = SIGN_CALIBRATION[0] * beta;
        }
        EventKind::Pair12 => {
            let approach = pre_velocities[0] - pre_velocities[1];
            if approach <= 0.0 {
                return Err(Error::KindMismatch {
                    expected: "pair (1,2) arrival with v1 > v2".into(),
                    got: format!("v = {pre_velocities:?}"),
                });
            }
            let alpha = alpha_coeff(masses, 0, approach);
            coeff = alpha;
            u1[(1, 1)] = SIGN_CALIBRATION[1] * alpha;
        }
        EventKind::Pair23 => {
            let approach = pre_velocities[1] - pre_velocities[2];
            if approach <= 0.0 {
                return Err(Error::KindMismatch {
                    expected: "pair (2,3) arrival with v2 > v3".into(),
                    got: format!("v = {pre_velocities:?}"),
                });
            }
            let alpha = alpha_coeff(masses, 1, approach);
            coeff = alpha;
            u2[(2, 2)] = SIGN_CALIBRATION[2] * alpha;
        }
        _ => {
            return Err(Error::KindMismatch {
                expected: "a concrete collision kind".into(),
                got: kind.label().into(),
            })
        }
    }

    let id = Matrix3::identity();
    let dphi = match kind {
        EventKind::Floor01 => assemble(&id, &Matrix3::zeros(), &b, &id),
        EventKind::Pair12 => assemble(&m1, &u1, &Matrix3::zeros(), &m1.transpose()),
        EventKind::Pair23 => assemble(&m2, &u2, &Matrix3::zeros(), &m2.transpose()),
        _ => unreachable!(),
    };

    Ok(XiEtaBlocks {
        kind,
        b,
        u1,
        u2,
        m1,
        m2,
        dphi,
        sign_calibration: SIGN_CALIBRATION,
        coeff,
    })
}

fn assemble(
    xi_xi: &Matrix3<f64>,
    xi_eta: &Matrix3<f64>,
    eta_xi: &Matrix3<f64>,
    eta_eta: &Matrix3<f64>,
) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(xi_xi);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(xi_eta);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(eta_xi);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(eta_eta);
    m
}

/// The jump restricted to the flow quotient `(xi2, xi3, eta2, eta3)`.
pub fn reduced_jump(blocks: &XiEtaBlocks) -> Matrix4<f64> {
    let take = |m: &Matrix3<f64>| Matrix2::new(m[(1, 1)], m[(1, 2)], m[(2, 1)], m[(2, 2)]);
    let (a, bu, c, d) = match blocks.kind {
        EventKind::Floor01 => (
            Matrix2::identity(),
            Matrix2::zeros(),
            take(&blocks.b),
            Matrix2::identity(),
        ),
        EventKind::Pair12 => (
            take(&blocks.m1),
            take(&blocks.u1),
            Matrix2::zeros(),
            take(&blocks.m1.transpose()),
        ),
        EventKind::Pair23 => (
            take(&blocks.m2),
            take(&blocks.u2),
            Matrix2::zeros(),
            take(&blocks.m2.transpose()),
        ),
        _ => unreachable!(),
    };
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&bu);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&d);
    m
}

/// Evolve reduced coordinates along a logged orbit with the calibrated
/// blocks, returning the Q value after every collision. This is the
/// cross-check route; the normative route is the `(h, v)` monodromy.
pub fn q_trace_via_blocks(
    masses: &MassModel,
    log: &OrbitLog,
    z0: &Vector4<f64>,
) -> Result<Vec<f64>> {
    let mut z = *z0;
    let mut out = Vec::with_capacity(log.entries.len());
    for entry in &log.entries {
        let blocks = dphi_xieta(entry.kind, masses, &entry.pre.v)?;
        z = reduced_jump(&blocks) * z;
        out.push(q_reduced(&z));
    }
    Ok(out)
}

/// Report of the `alpha` bound `max(alpha1, alpha2) <= 4 sqrt(2c) m1^3 / m3^(5/2)`
/// along an orbit.
#[derive(Debug, Clone, Copy)]
pub struct AlphaBoundReport {
    pub bound: f64,
    pub max_alpha: f64,
    pub max_ratio: f64,
    pub pair_events: usize,
}

/// The energy-uniform bound value for a mass model at energy `c`.
pub fn alpha_bound(masses: &MassModel, c: f64) -> f64 {
    let m1 = masses.m(0);
    let m3 = masses.m(2);
    4.0 * (2.0 * c).sqrt() * m1.powi(3) / (m3 * m3 * m3.sqrt())
}

/// Check every pair event of a logged orbit against the bound.
pub fn alpha_bound_check(masses: &MassModel, log: &OrbitLog, c: f64) -> AlphaBoundReport {
    let bound = alpha_bound(masses, c);
    let mut max_alpha: f64 = 0.0;
    let mut pair_events = 0;
    for entry in &log.entries {
        let alpha = match entry.kind {
            EventKind::Pair12 => alpha_coeff(masses, 0, entry.pre.v[0] - entry.pre.v[1]),
            EventKind::Pair23 => alpha_coeff(masses, 1, entry.pre.v[1] - entry.pre.v[2]),
            _ => continue,
        };
        pair_events += 1;
        max_alpha = max_alpha.max(alpha);
    }
    AlphaBoundReport {
        bound,
        max_alpha,
        max_ratio: max_alpha / bound,
        pair_events,
    }
}

/// Arrival velocities consistent with a collision kind, for tests and
/// calibration sweeps.
pub fn q_gain_of_jump(blocks: &XiEtaBlocks, z: &Vector4<f64>) -> f64 {
    let w = reduced_jump(blocks) * z;
    q_reduced(&w) - q_reduced(z)
}

#[allow(unused)]
fn _phase_state_marker(_: &PhaseState) {}
