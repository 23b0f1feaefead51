//! Deterministic samplers for phase points and singularity-manifold points.
//!
//! Sampling draws a uniform proposal in shape space and rescales it onto the
//! energy surface: `H` is homogeneous under `q -> s q`, `v -> sqrt(s) v`, so
//! one multiplicative correction lands exactly on `H = c` while preserving
//! every section equality and velocity ordering.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::map::System;
use super::singular::SingularManifold;
use super::state::{PhaseState, Section};
use crate::error::{Error, Result};

/// Attempts before a rejection sampler gives up.
pub const REJECTION_BUDGET: usize = 10_000;

/// Margin keeping sampled inequalities strictly off manifold boundaries.
const BOUNDARY_MARGIN: f64 = 1e-3;

/// Counter-based stream: an independent generator per `(seed, index)` pair,
/// so parallel and serial runs visit identical streams.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    key[16..24].copy_from_slice(&splitmix64(seed ^ index.rotate_left(32)).to_le_bytes());
    key[24..32].copy_from_slice(&splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl System {
    /// Rescale `(q, v)` onto the energy surface `H = c`.
    fn renormalize(&self, q: &mut [f64; 3], v: &mut [f64; 3], c: f64) -> bool {
        let h = self.masses().energy(q, v);
        if !(h > 0.0) {
            return false;
        }
        let s = c / h;
        let sv = s.sqrt();
        for i in 0..3 {
            q[i] *= s;
            v[i] *= sv;
        }
        true
    }

    /// Deterministic sample on a post-collision section at energy `c`.
    pub fn sample_phase_point(
        &self,
        c: f64,
        section: Section,
        rng: &mut impl Rng,
    ) -> Result<PhaseState> {
        if !(c > 0.0) {
            return Err(Error::InvalidState(format!("energy must be positive, got {c}")));
        }
        for _ in 0..REJECTION_BUDGET {
            let mut v: [f64; 3] = [0.0; 3];
            for vi in v.iter_mut() {
                *vi = rng.gen_range(-1.0..1.0);
            }
            let gap1: f64 = rng.gen_range(BOUNDARY_MARGIN..1.0);
            let gap2: f64 = rng.gen_range(BOUNDARY_MARGIN..1.0);
            let base: f64 = rng.gen_range(BOUNDARY_MARGIN..1.0);
            let mut q = match section {
                Section::M1Plus => {
                    v[0] = v[0].abs();
                    [0.0, gap1, gap1 + gap2]
                }
                Section::M2Plus => {
                    if v[0] > v[1] {
                        v.swap(0, 1);
                    }
                    [base, base, base + gap2]
                }
                Section::M3Plus => {
                    if v[1] > v[2] {
                        v.swap(1, 2);
                    }
                    [base, base + gap1, base + gap1]
                }
                Section::Interior => [base, base + gap1, base + gap1 + gap2],
                _ => {
                    return Err(Error::InvalidState(
                        "sampling targets post-collision sections or the interior".into(),
                    ))
                }
            };
            if !self.renormalize(&mut q, &mut v, c) {
                continue;
            }
            // keep clear of simultaneous-event configurations
            match self.next_event(&PhaseState::raw(q, v, c, section)) {
                Ok(ev) if !ev.kind.is_singular() && ev.tau > 0.0 => {}
                _ => continue,
            }
            if let Ok(state) = self.state(q, v, section) {
                return Ok(state);
            }
        }
        Err(Error::RejectionBudget {
            attempts: REJECTION_BUDGET,
        })
    }

    /// Deterministic sample on `S12-` or `S31-` at energy `c`. Membership
    /// (the next-event condition) is verified by simulation; boundary
    /// equalities in the velocity orderings are excluded.
    pub fn sample_singular_point(
        &self,
        manifold: SingularManifold,
        c: f64,
        rng: &mut impl Rng,
    ) -> Result<PhaseState> {
        if !(c > 0.0) {
            return Err(Error::InvalidState(format!("energy must be positive, got {c}")));
        }
        for _ in 0..REJECTION_BUDGET {
            let (mut q, mut v, section) = match manifold {
                SingularManifold::S12Minus => {
                    let h: f64 = rng.gen_range(BOUNDARY_MARGIN..1.0);
                    let v1: f64 = rng.gen_range(-1.0..1.0);
                    let d1: f64 = rng.gen_range(BOUNDARY_MARGIN..1.0);
                    let d2: f64 = rng.gen_range(BOUNDARY_MARGIN..1.0);
                    ([h, h, h], [v1, v1 + d1, v1 + d1 + d2], Section::M2Plus)
                }
                SingularManifold::S31Minus => {
                    let v1: f64 = rng.gen_range(BOUNDARY_MARGIN..1.0);
                    let d1: f64 = rng.gen_range(BOUNDARY_MARGIN..1.0);
                    let q3: f64 = rng.gen_range(BOUNDARY_MARGIN..1.0);
                    let v3: f64 = rng.gen_range(-1.0..1.0);
                    ([0.0, 0.0, q3], [v1, v1 + d1, v3], Section::M1Plus)
                }
            };
            if !self.renormalize(&mut q, &mut v, c) {
                continue;
            }
            let candidate = PhaseState::raw(q, v, c, section);
            if self.on_singular_manifold(&candidate, manifold) {
                return Ok(candidate);
            }
        }
        Err(Error::RejectionBudget {
            attempts: REJECTION_BUDGET,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::events::EventKind;
    use crate::dynamics::masses::MassModel;

    fn sys() -> System {
        System::new(MassModel::new(3.0, 2.0, 1.0).unwrap())
    }

    #[test]
    fn same_seed_reproduces_the_sample() {
        let sys = sys();
        let a = sys
            .sample_phase_point(10.0, Section::M1Plus, &mut sample_rng(7, 0))
            .unwrap();
        let b = sys
            .sample_phase_point(10.0, Section::M1Plus, &mut sample_rng(7, 0))
            .unwrap();
        assert_eq!(a, b);
        let c = sys
            .sample_phase_point(10.0, Section::M1Plus, &mut sample_rng(7, 1))
            .unwrap();
        assert!(a != c);
    }

    #[test]
    fn samples_sit_on_the_energy_surface_and_section() {
        let sys = sys();
        for i in 0..200 {
            let s = sys
                .sample_phase_point(10.0, Section::M1Plus, &mut sample_rng(3, i))
                .unwrap();
            assert!((s.energy(sys.masses()) - 10.0).abs() / 10.0 <= 1e-12);
            assert_eq!(s.q[0], 0.0);
            assert!(s.v[0] >= 0.0);
        }
    }

    #[test]
    fn singular_samples_verify_membership_by_simulation() {
        let sys = sys();
        for i in 0..50 {
            let s = sys
                .sample_singular_point(SingularManifold::S12Minus, 10.0, &mut sample_rng(11, i))
                .unwrap();
            let ev = sys.next_event(&s).unwrap();
            assert_eq!(ev.kind, EventKind::Floor01);
            assert_eq!(s.q[0], s.q[1]);
            assert_eq!(s.q[1], s.q[2]);

            let s = sys
                .sample_singular_point(SingularManifold::S31Minus, 10.0, &mut sample_rng(12, i))
                .unwrap();
            let ev = sys.next_event(&s).unwrap();
            assert_eq!(ev.kind, EventKind::Pair23);
            assert_eq!(s.q[0], 0.0);
            assert_eq!(s.q[1], 0.0);
        }
    }
}
