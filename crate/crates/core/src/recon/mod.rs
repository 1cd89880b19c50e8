//! LSQR reconstruction with early stopping and error metrics.

mod lsqr;
mod metrics;

pub use lsqr::{lsqr_solve, lsqr_solve_with, DenseMatrix, LinearOperator, LsqrOptions, LsqrResult, StopReason};
pub use metrics::{nrmse, nrmse_values, profile_compare, ProfilePair};
