//! Tangent dynamics along the Poincare map.
//!
//! The normative cocycle lives in energy coordinates `(h, v)`, where the
//! flight derivative is the identity and Q takes the form `sum dh_i dv_i`.
//! The `(xi, eta)` jump blocks in [`xieta`] are a structural cross-check
//! driven by the same `alpha`/`beta` coefficients.

pub mod monodromy;
pub mod vector;
pub mod xieta;

pub use monodromy::{alpha_coeff, beta_coeff, Monodromy, RenormPolicy};
pub use vector::{omega_reduced, q_form_qp, q_reduced, tangent_qp_to_hv, TangentVector};
pub use xieta::{
    alpha_bound, alpha_bound_check, cw_norm, dphi_xieta, q_trace_via_blocks, reduced_jump,
    AlphaBoundReport, XiEtaBlocks, SIGN_CALIBRATION,
};
