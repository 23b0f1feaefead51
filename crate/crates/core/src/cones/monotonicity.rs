//! Eventual strict Q-monotonicity certificates.
//!
//! The certificate tracks the images of the Lagrangian bases and declares
//! success at the first step where the induced 2x2 forms `v -> Q(dT^n v)`
//! on both `L1` and `L2` are positive definite (leading-minor test). Once
//! positive definite they stay so, because each further step is Q-monotone.

use nalgebra::Matrix2;

use super::lagrangian::LagrangianBasis;
use crate::dynamics::{EventKind, PhaseState, System};
use crate::error::Result;
use crate::tangent::TangentVector;

/// Relative tolerance of the leading-minor positivity test.
pub const PD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default)]
pub struct EventTally {
    pub floors: usize,
    pub pair12: usize,
    pub pair23: usize,
}

impl EventTally {
    fn count(&mut self, kind: EventKind) {
        match kind {
            EventKind::Floor01 => self.floors += 1,
            EventKind::Pair12 => self.pair12 += 1,
            EventKind::Pair23 => self.pair23 += 1,
            _ => {}
        }
    }

    pub fn ball_ball(&self) -> usize {
        self.pair12 + self.pair23
    }
}

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    /// First step at which both L1 and L2 forms are positive definite.
    pub n: Option<usize>,
    /// First step at which the L1 form alone certified.
    pub n_l1: Option<usize>,
    /// First step at which the L2 form alone certified.
    pub n_l2: Option<usize>,
    /// Event counts at the L1 certification step.
    pub tally_l1: EventTally,
    /// Event counts at the L2 certification step.
    pub tally_l2: EventTally,
    /// Event counts over the whole examined horizon.
    pub tally: EventTally,
    pub horizon: usize,
}

fn gram(pair: &[TangentVector; 2]) -> Matrix2<f64> {
    Matrix2::new(
        pair[0].q_form(),
        TangentVector::q_polar(&pair[0], &pair[1]),
        TangentVector::q_polar(&pair[1], &pair[0]),
        pair[1].q_form(),
    )
}

fn positive_definite(f: &Matrix2<f64>, scale: f64) -> bool {
    let tol = PD_TOL * scale.max(1e-300);
    f[(0, 0)] > tol && f.determinant() > tol * tol
}

impl System {
    /// Smallest `n <= horizon` certifying eventual strict Q-monotonicity at
    /// `x` through the positivity of Q on the evolved Lagrangian bases.
    pub fn monotonicity_time(&self, x: &PhaseState, horizon: usize) -> Result<MonotonicityReport> {
        let basis = LagrangianBasis::new(self.masses());
        let mut l1 = basis.l1;
        let mut l2 = basis.l2;
        let mut report = MonotonicityReport {
            n: None,
            n_l1: None,
            n_l2: None,
            tally_l1: EventTally::default(),
            tally_l2: EventTally::default(),
            tally: EventTally::default(),
            horizon,
        };
        let mut state = *x;
        for step in 1..=horizon {
            let (rec, m) = self.step_with_monodromy(&state)?;
            state = rec.state;
            report.tally.count(rec.kind);
            for v in l1.iter_mut().chain(l2.iter_mut()) {
                *v = m.apply(v);
            }
            // common rescale keeps the minor test conditioned
            for pair in [&mut l1, &mut l2] {
                let s = pair[0].norm_sq().max(pair[1].norm_sq()).sqrt();
                if s > 1e50 {
                    pair[0] = pair[0].scale(1.0 / s);
                    pair[1] = pair[1].scale(1.0 / s);
                }
            }
            if report.n_l1.is_none() {
                let f = gram(&l1);
                let scale = l1[0].norm_sq().max(l1[1].norm_sq());
                if positive_definite(&f, scale) {
                    report.n_l1 = Some(step);
                    report.tally_l1 = report.tally;
                }
            }
            if report.n_l2.is_none() {
                let f = gram(&l2);
                let scale = l2[0].norm_sq().max(l2[1].norm_sq());
                if positive_definite(&f, scale) {
                    report.n_l2 = Some(step);
                    report.tally_l2 = report.tally;
                }
            }
            if let (Some(a), Some(b)) = (report.n_l1, report.n_l2) {
                report.n = Some(a.max(b));
                break;
            }
        }
        Ok(report)
    }
}
