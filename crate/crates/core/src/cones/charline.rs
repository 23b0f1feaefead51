//! Characteristic lines of the singularity manifolds and proper alignment.
//!
//! The characteristic line at `x` is the omega-orthogonal complement of the
//! manifold's tangent space (one-dimensional in the reduced symplectic
//! space). For `S12-` it has the closed form `dq = 0`,
//! `dp ~ (1,1,1) x (v1,v2,v3)`; for `S31-` the analogous computation gives
//! `dq = 0`, `dp ~ (v2, -v1, 0)`. Both are cross-checked against the generic
//! complement of the numerically assembled tangent space.
//!
//! `x` is properly aligned iff `Q(v_x) = sum v_i dp_i^2 / m_i >= 0`.

use nalgebra::{Matrix3x4, Vector3, Vector4};

use crate::dynamics::{MassModel, PhaseState, SingularManifold, SingularPolicy, StepOutcome, System};
use crate::error::{Error, Result};
use crate::tangent::{omega_reduced, tangent_qp_to_hv, TangentVector};

/// Alignment tolerance: `Q >= -1e-12` (unit characteristic direction).
pub const ALIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Alignment {
    Aligned,
    NotAligned,
}

/// A characteristic direction at a singular-manifold point.
#[derive(Debug, Clone)]
pub struct CharLine {
    pub base: PhaseState,
    pub manifold: SingularManifold,
    /// Unit momentum direction (the line has `dq = 0`).
    pub dp: [f64; 3],
    /// `Q` at the unit direction.
    pub q_value: f64,
}

impl CharLine {
    pub fn alignment(&self) -> Alignment {
        if self.q_value >= -ALIGN_TOL {
            Alignment::Aligned
        } else {
            Alignment::NotAligned
        }
    }

    /// The line as an energy-coordinates tangent vector.
    pub fn tangent(&self, masses: &MassModel) -> TangentVector {
        tangent_qp_to_hv(masses, &self.base, [0.0; 3], self.dp)
    }
}

/// `Q` restricted to `dq = 0` directions: `sum v_i dp_i^2 / m_i`.
pub fn char_q(masses: &MassModel, v: &[f64; 3], dp: &[f64; 3]) -> f64 {
    let mut q = 0.0;
    for i in 0..3 {
        q += v[i] * dp[i] * dp[i] / masses.m(i);
    }
    q
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

impl System {
    /// Closed-form characteristic line at `x` on `manifold`.
    pub fn characteristic_line(
        &self,
        x: &PhaseState,
        manifold: SingularManifold,
    ) -> Result<CharLine> {
        if !self.on_singular_manifold(x, manifold) {
            return Err(Error::InvalidState(format!(
                "state is not on {}",
                manifold.label()
            )));
        }
        let dp_raw = match manifold {
            SingularManifold::S12Minus => cross(&[1.0, 1.0, 1.0], &x.v),
            SingularManifold::S31Minus => [x.v[1], -x.v[0], 0.0],
        };
        let norm = (dp_raw[0] * dp_raw[0] + dp_raw[1] * dp_raw[1] + dp_raw[2] * dp_raw[2]).sqrt();
        let vnorm = (x.v[0] * x.v[0] + x.v[1] * x.v[1] + x.v[2] * x.v[2]).sqrt();
        if norm <= 1e-12 * vnorm.max(1.0) {
            return Err(Error::DegenerateDirection);
        }
        let dp = [dp_raw[0] / norm, dp_raw[1] / norm, dp_raw[2] / norm];
        Ok(CharLine {
            base: *x,
            manifold,
            dp,
            q_value: char_q(self.masses(), &x.v, &dp),
        })
    }

    /// Spanning tangent vectors of the manifold at `x` (three directions in
    /// the energy-reduced quotient), from the explicit embeddings:
    /// heights follow the configuration constraint, the energy constraint
    /// eliminates the overall height.
    pub fn manifold_tangent_basis(
        &self,
        x: &PhaseState,
        manifold: SingularManifold,
    ) -> Result<[TangentVector; 3]> {
        if !self.on_singular_manifold(x, manifold) {
            return Err(Error::InvalidState(format!(
                "state is not on {}",
                manifold.label()
            )));
        }
        let masses = self.masses();
        let mut out = [TangentVector::zero(); 3];
        for j in 0..3 {
            let mj = masses.m(j);
            let mut dq = [0.0; 3];
            match manifold {
                // q = (h,h,h), h = (c - KE)/M: dq_i = -(m_j v_j / M) for all i
                SingularManifold::S12Minus => {
                    let dh = -mj * x.v[j] / masses.total();
                    dq = [dh, dh, dh];
                }
                // q = (0, 0, q3), q3 = (c - KE)/m3: dq3 = -(m_j v_j / m3)
                SingularManifold::S31Minus => {
                    dq[2] = -mj * x.v[j] / masses.m(2);
                }
            }
            let mut dp = [0.0; 3];
            dp[j] = mj;
            out[j] = tangent_qp_to_hv(masses, x, dq, dp);
        }
        Ok(out)
    }

    /// Characteristic direction computed generically as the omega-orthogonal
    /// complement of the manifold tangent space in reduced coordinates.
    pub fn characteristic_line_generic(
        &self,
        x: &PhaseState,
        manifold: SingularManifold,
    ) -> Result<Vector4<f64>> {
        let basis = self.manifold_tangent_basis(x, manifold)?;
        omega_complement(&[basis[0].reduced(), basis[1].reduced(), basis[2].reduced()])
    }
}

/// One-dimensional omega-complement of a 3-dim span in reduced coordinates.
pub fn omega_complement(span: &[Vector4<f64>; 3]) -> Result<Vector4<f64>> {
    // rows: (J w_k)^T with omega(a, b) = a^T J b
    let jw = |w: &Vector4<f64>| Vector4::new(-w[2], -w[3], w[0], w[1]);
    let mut rows = Matrix3x4::zeros();
    for (k, w) in span.iter().enumerate() {
        rows.set_row(k, &jw(w).transpose());
    }
    let svd = nalgebra::linalg::SVD::new(rows, false, true);
    let v_t = svd.v_t.as_ref().ok_or(Error::DegenerateDirection)?;
    // the singular vector for the (implicit) zero singular value is the last
    // row of the full V^T; nalgebra returns only 3 rows for a 3x4 matrix, so
    // recover the null direction by orthogonality.
    let mut null = Vector4::new(1.0, 0.0, 0.0, 0.0);
    for i in 0..3 {
        let r: Vector4<f64> = v_t.row(i).transpose();
        null -= r * null.dot(&r);
    }
    if null.norm() < 1e-8 {
        // retry from a different seed direction
        null = Vector4::new(0.0, 1.0, 0.0, 0.0);
        for i in 0..3 {
            let r: Vector4<f64> = v_t.row(i).transpose();
            null -= r * null.dot(&r);
        }
    }
    if null.norm() < 1e-10 {
        return Err(Error::DegenerateDirection);
    }
    Ok(null / null.norm())
}

/// Report of pushing the characteristic line forward `n` steps.
#[derive(Debug, Clone)]
pub struct PushforwardReport {
    /// `Q(dT^k v_x)` for `k = 0..=n` (unit initial direction).
    pub q_trace: Vec<f64>,
    /// Collinearity `|cos|` between the pushed line and the omega-complement
    /// of the pushed manifold tangent space, at the final step.
    pub collinearity: f64,
    /// Branch orderings taken along the way.
    pub branch_choices: Vec<crate::dynamics::EventKind>,
}

impl System {
    /// Push the characteristic line of `x` through the monodromy along `n`
    /// steps; the image stays the characteristic line of the image manifold.
    pub fn char_pushforward(
        &self,
        x: &PhaseState,
        manifold: SingularManifold,
        n: usize,
        policy: SingularPolicy,
    ) -> Result<PushforwardReport> {
        let line = self.characteristic_line(x, manifold)?;
        let masses = *self.masses();
        let mut v = line.tangent(&masses);
        let mut span = self.manifold_tangent_basis(x, manifold)?;
        let mut q_trace = vec![v.q_form()];
        let mut branch_choices = Vec::new();
        let mut state = *x;
        for step in 0..n {
            let m = match self.poincare_map(&state)? {
                StepOutcome::Regular(rec) => {
                    let m = self.monodromy_step(&state)?;
                    state = rec.state;
                    m
                }
                StepOutcome::Singular(bp) => {
                    let branch = match policy {
                        SingularPolicy::Error => return Err(Error::SingularOrbit { step }),
                        SingularPolicy::First => bp.first,
                        SingularPolicy::Second => bp.second,
                    };
                    let m = self.branch_step_with_monodromy(&state, &bp, &branch);
                    branch_choices.push(branch.applied);
                    state = branch.state;
                    m
                }
            };
            v = m.apply(&v);
            for w in span.iter_mut() {
                *w = m.apply(w);
            }
            q_trace.push(v.q_form());
        }
        let comp = omega_complement(&[span[0].reduced(), span[1].reduced(), span[2].reduced()])?;
        let z = v.reduced();
        let collinearity = if z.norm() > 0.0 {
            (z.dot(&comp) / z.norm()).abs()
        } else {
            0.0
        };
        Ok(PushforwardReport {
            q_trace,
            collinearity,
            branch_choices,
        })
    }
}

#[allow(unused)]
fn _v3(_: Vector3<f64>) {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{sample_rng, MassModel, Section};

    fn sys() -> System {
        System::new(MassModel::new(3.0, 2.0, 1.0).unwrap())
    }

    #[test]
    fn worked_cross_product_direction() {
        // masses (3,2,1), v = (-1,0,1): dp ~ (1,-2,1), Q = 2/3 at that scale
        let m = MassModel::new(3.0, 2.0, 1.0).unwrap();
        let q = char_q(&m, &[-1.0, 0.0, 1.0], &[1.0, -2.0, 1.0]);
        assert!((q - 2.0 / 3.0).abs() < 1e-15);
        let dir = cross(&[1.0, 1.0, 1.0], &[-1.0, 0.0, 1.0]);
        assert_eq!(dir, [1.0, -2.0, 1.0]);
    }

    #[test]
    fn worked_not_aligned_example() {
        // masses (3,2,1), v = (-1,-0.5,-0.2): dp ~ (0.3,-0.8,0.5), Q = -0.24
        let m = MassModel::new(3.0, 2.0, 1.0).unwrap();
        let dir = cross(&[1.0, 1.0, 1.0], &[-1.0, -0.5, -0.2]);
        for (g, w) in dir.iter().zip([0.3, -0.8, 0.5]) {
            assert!((g - w).abs() < 1e-15);
        }
        let q = char_q(&m, &[-1.0, -0.5, -0.2], &dir);
        assert!((q + 0.24).abs() < 1e-15);
    }

    #[test]
    fn degenerate_direction_errors() {
        let sys = sys();
        // v parallel to (1,1,1) at a triple contact
        let x = sys
            .state([1.0, 1.0, 1.0], [0.4, 0.4, 0.4], Section::M2Plus)
            .unwrap();
        if sys.on_singular_manifold(&x, SingularManifold::S12Minus) {
            assert!(matches!(
                sys.characteristic_line(&x, SingularManifold::S12Minus),
                Err(Error::DegenerateDirection)
            ));
        }
    }

    #[test]
    fn alignment_is_scale_invariant_and_signed() {
        let m = MassModel::new(3.0, 2.0, 1.0).unwrap();
        let v = [-1.0, 0.0, 1.0];
        let dp = [1.0, -2.0, 1.0];
        let q1 = char_q(&m, &v, &dp);
        let dp2 = [3.0, -6.0, 3.0];
        let q2 = char_q(&m, &v, &dp2);
        assert!(q1 > 0.0 && q2 > 0.0);
        assert!((q2 - 9.0 * q1).abs() < 1e-12);
    }

    #[test]
    fn closed_form_and_generic_complement_agree() {
        let sys = sys();
        for (manifold, seed) in [
            (SingularManifold::S12Minus, 61),
            (SingularManifold::S31Minus, 62),
        ] {
            let mut hits = 0;
            for i in 0..40 {
                let x = match sys.sample_singular_point(manifold, 10.0, &mut sample_rng(seed, i)) {
                    Ok(x) => x,
                    Err(_) => continue,
                };
                let line = match sys.characteristic_line(&x, manifold) {
                    Ok(l) => l,
                    Err(_) => continue,
                };
                let closed = line.tangent(sys.masses()).reduced();
                let generic = sys.characteristic_line_generic(&x, manifold).unwrap();
                let cosine = (closed.dot(&generic) / closed.norm()).abs();
                assert!(
                    cosine > 1.0 - 1e-9,
                    "{} sample {i}: |cos| = {cosine}",
                    manifold.label()
                );
                hits += 1;
            }
            assert!(hits >= 20, "{}: only {hits} samples", manifold.label());
        }
    }

    #[test]
    fn s31_points_are_always_aligned() {
        let sys = sys();
        for i in 0..50 {
            let x = match sys.sample_singular_point(
                SingularManifold::S31Minus,
                10.0,
                &mut sample_rng(63, i),
            ) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let line = sys.characteristic_line(&x, SingularManifold::S31Minus).unwrap();
            assert_eq!(line.alignment(), Alignment::Aligned);
        }
    }

    #[test]
    fn pushforward_keeps_aligned_points_aligned() {
        let sys = sys();
        let mut checked = 0;
        for i in 0..60 {
            let x = match sys.sample_singular_point(
                SingularManifold::S12Minus,
                10.0,
                &mut sample_rng(64, i),
            ) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let line = sys.characteristic_line(&x, SingularManifold::S12Minus).unwrap();
            if line.alignment() != Alignment::Aligned {
                continue;
            }
            let rep = match sys.char_pushforward(&x, SingularManifold::S12Minus, 20, SingularPolicy::Error)
            {
                Ok(r) => r,
                Err(_) => continue,
            };
            checked += 1;
            for (k, q) in rep.q_trace.iter().enumerate() {
                assert!(*q >= -1e-10, "sample {i} lost alignment at step {k}: {q}");
            }
            assert!(rep.collinearity > 1.0 - 1e-6);
        }
        assert!(checked >= 10);
    }
}
