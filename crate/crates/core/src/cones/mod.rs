//! Cone-field analysis: membership, least expansion, monotonicity
//! certificates, characteristic lines, and growth-bound estimation.

pub mod charline;
pub mod lagrangian;
pub mod lambda;
pub mod monotonicity;
pub mod sigma;
pub mod trace;

pub use charline::{char_q, Alignment, CharLine};
pub use lagrangian::{cone_status, cone_status_reduced, ConeStatus, LagrangianBasis};
pub use lambda::{detect_blocks, BlockRecord, LambdaEstimate};
pub use monotonicity::{EventTally, MonotonicityReport};
pub use sigma::{expansion_ratio, q_matrix, reduced_product, sigma_of_product, SigmaMethod, SigmaResult, SIGMA_METHOD_TOL};
pub use trace::{Trace, TraceDirection};
