//! The invariant Lagrangian pair and cone membership.
//!
//! In reduced coordinates `z = (xi2, xi3, eta2, eta3)` the canonical pair is
//! `L1 = {eta = 0}` and `L2 = {xi = 0}`; Q vanishes on both and they are
//! transversal. The contracting cone is `{Q > 0}` in `L1 (+) L2`.

use nalgebra::Vector4;

use crate::dynamics::MassModel;
use crate::tangent::{q_reduced, TangentVector};

/// Tolerance factor for the cone boundary: `|Q| <= 1e-12 * |z|^2`.
pub const CONE_BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ConeStatus {
    Inside,
    Boundary,
    Outside,
}

/// Sign of Q with a relative tolerance band around zero.
pub fn cone_status(v: &TangentVector) -> ConeStatus {
    let z = v.reduced();
    cone_status_reduced(&z)
}

pub fn cone_status_reduced(z: &Vector4<f64>) -> ConeStatus {
    let q = q_reduced(z);
    let scale = z.norm_squared();
    if q > CONE_BOUNDARY_TOL * scale {
        ConeStatus::Inside
    } else if q < -CONE_BOUNDARY_TOL * scale {
        ConeStatus::Outside
    } else {
        ConeStatus::Boundary
    }
}

/// Basis vectors for the Lagrangian pair, both in reduced coordinates and as
/// canonical `(dh, dv)` representatives.
#[derive(Debug, Clone)]
pub struct LagrangianBasis {
    pub l1_reduced: [Vector4<f64>; 2],
    pub l2_reduced: [Vector4<f64>; 2],
    pub l1: [TangentVector; 2],
    pub l2: [TangentVector; 2],
}

impl LagrangianBasis {
    pub fn new(masses: &MassModel) -> Self {
        let e = |i: usize| {
            let mut z = Vector4::zeros();
            z[i] = 1.0;
            z
        };
        let l1_reduced = [e(0), e(1)];
        let l2_reduced = [e(2), e(3)];
        LagrangianBasis {
            l1: [
                TangentVector::from_reduced(masses, &l1_reduced[0]),
                TangentVector::from_reduced(masses, &l1_reduced[1]),
            ],
            l2: [
                TangentVector::from_reduced(masses, &l2_reduced[0]),
                TangentVector::from_reduced(masses, &l2_reduced[1]),
            ],
            l1_reduced,
            l2_reduced,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangent::TangentVector;

    #[test]
    fn cone_status_signs() {
        let inside = TangentVector::new([0.0, 1.0, -1.0], [0.0, 1.0, 0.0]);
        assert_eq!(cone_status(&inside), ConeStatus::Inside);
        let outside = TangentVector::new([0.0, 1.0, -1.0], [0.0, -1.0, 0.0]);
        assert_eq!(cone_status(&outside), ConeStatus::Outside);
    }

    #[test]
    fn lagrangian_subspaces_are_q_null_and_transversal() {
        let m = MassModel::new(3.0, 2.0, 1.0).unwrap();
        let basis = LagrangianBasis::new(&m);
        for v in basis.l1.iter().chain(basis.l2.iter()) {
            assert_eq!(cone_status(v), ConeStatus::Boundary);
            assert!(v.energy_defect().abs() < 1e-14);
        }
        // the four reduced vectors span R^4
        let mut m4 = nalgebra::Matrix4::zeros();
        m4.set_column(0, &basis.l1_reduced[0]);
        m4.set_column(1, &basis.l1_reduced[1]);
        m4.set_column(2, &basis.l2_reduced[0]);
        m4.set_column(3, &basis.l2_reduced[1]);
        assert!(m4.determinant().abs() > 0.5);
    }

    #[test]
    fn l1_is_pure_energy_and_l2_pure_velocity() {
        let m = MassModel::new(3.0, 2.0, 1.0).unwrap();
        let basis = LagrangianBasis::new(&m);
        for v in &basis.l1 {
            assert!(v.dv.norm() < 1e-14);
        }
        for v in &basis.l2 {
            assert!(v.dh.norm() < 1e-14);
        }
    }
}
