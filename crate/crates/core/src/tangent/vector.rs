//! Tangent vectors in energy coordinates and the quadratic form Q.
//!
//! Coordinates are `(h, v)` with `h_i = m_i (v_i^2/2 + q_i)`. The energy is
//! `H = h1 + h2 + h3`, so energy-reduced tangent vectors satisfy
//! `dh1 + dh2 + dh3 = 0`. The flow direction is `(0, -(1,1,1))`; adding a
//! flow multiple to `dv` changes `Q = sum dh_i dv_i` by `s * sum dh_i = 0`,
//! so Q is well-defined on the flow quotient of the energy reduction.

use nalgebra::{Vector3, Vector4};

use crate::dynamics::{MassModel, PhaseState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub dh: Vector3<f64>,
    pub dv: Vector3<f64>,
}

impl TangentVector {
    pub fn new(dh: [f64; 3], dv: [f64; 3]) -> Self {
        TangentVector {
            dh: Vector3::from(dh),
            dv: Vector3::from(dv),
        }
    }

    pub fn zero() -> Self {
        TangentVector {
            dh: Vector3::zeros(),
            dv: Vector3::zeros(),
        }
    }

    /// Deviation from the energy reduction `sum dh_i = 0`.
    pub fn energy_defect(&self) -> f64 {
        self.dh.sum()
    }

    /// The indefinite form `Q = sum dh_i dv_i`.
    pub fn q_form(&self) -> f64 {
        self.dh.dot(&self.dv)
    }

    /// Symmetric bilinear polarization of Q.
    pub fn q_polar(a: &TangentVector, b: &TangentVector) -> f64 {
        0.5 * (a.dh.dot(&b.dv) + b.dh.dot(&a.dv))
    }

    /// Symplectic pairing `omega = sum dh_i ^ dv_i`.
    pub fn omega(a: &TangentVector, b: &TangentVector) -> f64 {
        a.dh.dot(&b.dv) - b.dh.dot(&a.dv)
    }

    pub fn add(&self, other: &TangentVector) -> TangentVector {
        TangentVector {
            dh: self.dh + other.dh,
            dv: self.dv + other.dv,
        }
    }

    pub fn scale(&self, s: f64) -> TangentVector {
        TangentVector {
            dh: self.dh * s,
            dv: self.dv * s,
        }
    }

    /// Add `s` times the flow direction `(0, (1,1,1))` to the representative.
    pub fn add_flow(&self, s: f64) -> TangentVector {
        TangentVector {
            dh: self.dh,
            dv: self.dv + Vector3::repeat(s),
        }
    }

    /// Gauge-fixed representative with zero total-momentum component:
    /// shifts `dv` by a flow multiple so `sum m_i dv_i = 0`.
    pub fn momentum_gauge(&self, masses: &MassModel) -> TangentVector {
        let m = Vector3::from(masses.masses());
        let s = m.dot(&self.dv) / masses.total();
        self.add_flow(-s)
    }

    /// Euclidean norm squared of the `(dh, dv)` representative.
    pub fn norm_sq(&self) -> f64 {
        self.dh.norm_squared() + self.dv.norm_squared()
    }

    /// Flow-quotient coordinates on the energy reduction:
    /// `(dh1, dh1 + dh2, dv1 - dv2, dv2 - dv3)`.
    ///
    /// These are the on-shell values of the classical `(xi, eta)` tangent
    /// coordinates (partial energy sums and velocity differences); both Q and
    /// the collision jumps close over them.
    pub fn reduced(&self) -> Vector4<f64> {
        Vector4::new(
            self.dh[0],
            self.dh[0] + self.dh[1],
            self.dv[0] - self.dv[1],
            self.dv[1] - self.dv[2],
        )
    }

    /// Canonical representative of reduced coordinates: energy-reduced `dh`
    /// and momentum-gauge `dv`.
    pub fn from_reduced(masses: &MassModel, z: &Vector4<f64>) -> TangentVector {
        let dh = Vector3::new(z[0], z[1] - z[0], -z[1]);
        let [m1, _, m3] = masses.masses();
        // dv1 - dv2 = z3, dv2 - dv3 = z4, m . dv = 0
        let dv2 = (m3 * z[3] - m1 * z[2]) / masses.total();
        let dv = Vector3::new(dv2 + z[2], dv2, dv2 - z[3]);
        TangentVector { dh, dv }
    }
}

/// Q in reduced coordinates: `z1 z3 + z2 z4`.
pub fn q_reduced(z: &Vector4<f64>) -> f64 {
    z[0] * z[2] + z[1] * z[3]
}

/// Symplectic pairing in reduced coordinates.
pub fn omega_reduced(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    a[0] * b[2] - b[0] * a[2] + a[1] * b[3] - b[1] * a[3]
}

/// Convert a `(dq, dp)` tangent at `state` to energy coordinates:
/// `dh_i = v_i dp_i + m_i dq_i`, `dv_i = dp_i / m_i`. Preserves Q exactly:
/// `sum dq_i dp_i + p_i dp_i^2 / m_i^2 = sum dh_i dv_i`.
pub fn tangent_qp_to_hv(
    masses: &MassModel,
    state: &PhaseState,
    dq: [f64; 3],
    dp: [f64; 3],
) -> TangentVector {
    let mut dh = [0.0; 3];
    let mut dv = [0.0; 3];
    for i in 0..3 {
        dh[i] = state.v[i] * dp[i] + masses.m(i) * dq[i];
        dv[i] = dp[i] / masses.m(i);
    }
    TangentVector::new(dh, dv)
}

/// Q evaluated directly in `(q, p)` coordinates:
/// `sum dq_i dp_i + p_i (dp_i)^2 / m_i^2`.
pub fn q_form_qp(masses: &MassModel, state: &PhaseState, dq: [f64; 3], dp: [f64; 3]) -> f64 {
    let mut q = 0.0;
    for i in 0..3 {
        q += dq[i] * dp[i] + state.v[i] * dp[i] * dp[i] / masses.m(i);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Section;

    #[test]
    fn q_form_arithmetic() {
        let t = TangentVector::new([0.0, 1.0, -1.0], [0.0, 1.0, 0.0]);
        assert_eq!(t.q_form(), 1.0);
        let t = TangentVector::new([0.3, -2.0, 1.7], [0.0, 0.0, 0.0]);
        assert_eq!(t.q_form(), 0.0);
    }

    #[test]
    fn qp_conversion_matches_worked_example() {
        let m = MassModel::new(3.0, 2.0, 1.0).unwrap();
        let sys = crate::dynamics::System::new(m);
        let s = sys
            .state([1.0, 2.0, 3.0], [-1.0, 0.0, 1.0], Section::Interior)
            .unwrap();
        let t = tangent_qp_to_hv(&m, &s, [0.0; 3], [1.0, -2.0, 1.0]);
        assert_eq!(t.dh, Vector3::new(-1.0, 0.0, 1.0));
        assert_eq!(t.dv, Vector3::new(1.0 / 3.0, -1.0, 1.0));
        let q_hv = t.q_form();
        let q_qp = q_form_qp(&m, &s, [0.0; 3], [1.0, -2.0, 1.0]);
        assert!((q_hv - 2.0 / 3.0).abs() < 1e-15);
        assert!((q_qp - q_hv).abs() < 1e-15);
    }

    #[test]
    fn dp_zero_maps_to_mass_weighted_dq() {
        let m = MassModel::new(3.0, 2.0, 1.0).unwrap();
        let sys = crate::dynamics::System::new(m);
        let s = sys
            .state([1.0, 2.0, 3.0], [0.5, 0.0, -0.5], Section::Interior)
            .unwrap();
        let t = tangent_qp_to_hv(&m, &s, [1.0, 1.0, 2.0], [0.0; 3]);
        assert_eq!(t.dh, Vector3::new(3.0, 2.0, 2.0));
        assert_eq!(t.dv, Vector3::zeros());
    }

    #[test]
    fn flow_addition_keeps_q_on_shell() {
        let t = TangentVector::new([0.5, -0.2, -0.3], [0.1, 0.7, -0.4]);
        assert!(t.energy_defect().abs() < 1e-15);
        let q0 = t.q_form();
        let q1 = t.add_flow(3.7).q_form();
        assert!((q0 - q1).abs() < 1e-14);
    }

    #[test]
    fn reduced_roundtrip_preserves_q() {
        let m = MassModel::new(3.0, 2.0, 1.0).unwrap();
        let t = TangentVector::new([0.5, -0.2, -0.3], [0.1, 0.7, -0.4]);
        let z = t.reduced();
        assert!((q_reduced(&z) - t.q_form()).abs() < 1e-14);
        let back = TangentVector::from_reduced(&m, &z);
        assert!((back.reduced() - z).norm() < 1e-14);
        assert!(back.energy_defect().abs() < 1e-14);
    }
}
