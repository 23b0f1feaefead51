//! Mass model: three ordered masses with derived restitution parameters.

use crate::error::{Error, Result};

/// Default relative tolerance for detecting the special mass condition
/// `2 sqrt(m1 m3) = sqrt(m1+m2) sqrt(m2+m3)`.
pub const DEFAULT_SPECIAL_TOL: f64 = 1e-9;

/// The three masses with derived quantities used throughout.
///
/// Invariants: `m1 > m2 >= m3 > 0`. The restitution parameters are
/// `gamma_i = (m_i - m_{i+1}) / (m_i + m_{i+1})`, so `gamma1 in (0,1)` and
/// `gamma2 in [0,1)`. Partial sums `M_i = m_i + ... + m_3` drive the wedge
/// geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassModel {
    m: [f64; 3],
    gamma: [f64; 2],
    partial: [f64; 3],
    special: bool,
    tol_special: f64,
}

impl MassModel {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        Self::with_special_tol(m1, m2, m3, DEFAULT_SPECIAL_TOL)
    }

    pub fn with_special_tol(m1: f64, m2: f64, m3: f64, tol_special: f64) -> Result<Self> {
        if !(m1.is_finite() && m2.is_finite() && m3.is_finite()) {
            return Err(Error::InvalidMasses("non-finite mass".into()));
        }
        if !(m3 > 0.0) {
            return Err(Error::InvalidMasses(format!("m3 = {m3} must be positive")));
        }
        if !(m1 > m2) {
            return Err(Error::InvalidMasses(format!("need m1 > m2, got {m1} <= {m2}")));
        }
        if !(m2 >= m3) {
            return Err(Error::InvalidMasses(format!("need m2 >= m3, got {m2} < {m3}")));
        }
        let gamma = [(m1 - m2) / (m1 + m2), (m2 - m3) / (m2 + m3)];
        let partial = [m1 + m2 + m3, m2 + m3, m3];
        let rhs = ((m1 + m2) * (m2 + m3)).sqrt();
        let residual = (2.0 * (m1 * m3).sqrt() - rhs).abs();
        let special = residual <= tol_special * rhs;
        Ok(MassModel {
            m: [m1, m2, m3],
            gamma,
            partial,
            special,
            tol_special,
        })
    }

    /// Mass of ball `i` (0-indexed).
    #[inline]
    pub fn m(&self, i: usize) -> f64 {
        self.m[i]
    }

    #[inline]
    pub fn masses(&self) -> [f64; 3] {
        self.m
    }

    /// Total mass `m1 + m2 + m3`.
    #[inline]
    pub fn total(&self) -> f64 {
        self.partial[0]
    }

    /// Partial sum `M_i = m_i + ... + m_3` (0-indexed: `partial_sum(0)` is the total).
    #[inline]
    pub fn partial_sum(&self, i: usize) -> f64 {
        self.partial[i]
    }

    /// Restitution parameters `(gamma1, gamma2)`.
    #[inline]
    pub fn gamma(&self) -> (f64, f64) {
        (self.gamma[0], self.gamma[1])
    }

    /// `gamma_i` for pair `(i, i+1)`, `i` in `{0, 1}` 0-indexed.
    #[inline]
    pub fn gamma_pair(&self, i: usize) -> f64 {
        self.gamma[i]
    }

    /// Whether the special mass condition holds within `tol_special`.
    #[inline]
    pub fn is_special(&self) -> bool {
        self.special
    }

    /// Signed residual `2 sqrt(m1 m3) - sqrt(m1+m2) sqrt(m2+m3)`.
    pub fn special_residual(&self) -> f64 {
        let [m1, m2, m3] = self.m;
        2.0 * (m1 * m3).sqrt() - ((m1 + m2) * (m2 + m3)).sqrt()
    }

    #[inline]
    pub fn special_tol(&self) -> f64 {
        self.tol_special
    }

    /// Total energy of a `(q, v)` configuration under this model (g = 1).
    pub fn energy(&self, q: &[f64; 3], v: &[f64; 3]) -> f64 {
        let mut h = 0.0;
        for i in 0..3 {
            h += self.m[i] * (0.5 * v[i] * v[i] + q[i]);
        }
        h
    }

    /// Per-ball energies `h_i = m_i (v_i^2/2 + q_i)`.
    pub fn ball_energies(&self, q: &[f64; 3], v: &[f64; 3]) -> [f64; 3] {
        [
            self.m[0] * (0.5 * v[0] * v[0] + q[0]),
            self.m[1] * (0.5 * v[1] * v[1] + q[1]),
            self.m[2] * (0.5 * v[2] * v[2] + q[2]),
        ]
    }
}

/// `gamma_i = (m_i - m_{i+1})/(m_i + m_{i+1})` as a standalone operation.
pub fn gamma(masses: &MassModel) -> (f64, f64) {
    masses.gamma()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_direct_substitution() {
        let m = MassModel::new(3.0, 2.0, 1.0).unwrap();
        let (g1, g2) = m.gamma();
        assert!((g1 - 0.2).abs() < 1e-15);
        assert!((g2 - 1.0 / 3.0).abs() < 1e-15);

        let m = MassModel::new(4.0, 2.0, 1.2).unwrap();
        let (g1, g2) = m.gamma();
        assert!((g1 - 1.0 / 3.0).abs() < 1e-15);
        assert!((g2 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn equal_masses_give_zero_gamma() {
        let m = MassModel::new(2.0, 1.0, 1.0).unwrap();
        assert_eq!(m.gamma().1, 0.0);
    }

    #[test]
    fn ordering_violation_rejected() {
        assert!(MassModel::new(2.0, 3.0, 1.0).is_err());
        assert!(MassModel::new(3.0, 1.0, 2.0).is_err());
        assert!(MassModel::new(3.0, 2.0, 0.0).is_err());
        assert!(MassModel::new(3.0, 3.0, 1.0).is_err());
    }

    #[test]
    fn special_flag_detects_the_ratio() {
        assert!(MassModel::new(4.0, 2.0, 1.2).unwrap().is_special());
        assert!(!MassModel::new(3.0, 2.0, 1.0).unwrap().is_special());
        // residual of the exact solve is at rounding level
        let r = MassModel::new(4.0, 2.0, 1.2).unwrap().special_residual();
        assert!(r.abs() < 1e-12);
    }
}
