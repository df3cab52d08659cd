//! Grid verification of the auxiliary inequalities.
//!
//! Every check returns a [`VerificationReport`](crate::VerificationReport)
//! with its worst margin. Margins are normalized so that they are O(1) where
//! the checked quantity has a natural scale; the default tolerance applies to
//! the normalized value.

pub mod bessel;
pub mod poly;
pub mod regime;
pub mod suite;

/// Tolerance on normalized margins.
pub const DEFAULT_TOL: f64 = 1e-9;

pub use bessel::{verify_bessel_signs, verify_ij_bounds};
pub use poly::{poly_p, poly_q, verify_binomial, verify_p_nonneg, verify_q_positive};
pub use regime::{gamma_star, verify_b_bounds, verify_gamma_chain, verify_large_tau};
pub use suite::{run_suite, SuiteOptions};
