//! Fundamental tone of the free plate under tension.
//!
//! The plate problem is `Δ²u − τΔu = ωu` with natural (free) boundary
//! conditions. This crate solves it on `d`-dimensional balls, evaluates the
//! trial-function quotient bound `∫N[ρ] / ∫ρ²` on general domains and checks
//! the auxiliary inequalities that compare arbitrary domains with the ball.
//!
//! - [`specfun`]: ultraspherical Bessel functions `j_l`, `i_l`.
//! - [`ball`]: the fundamental mode of a ball.
//! - [`trial`]: the radial trial profile and its pointwise scans.
//! - [`verify`]: polynomial, Bessel and regime inequalities.
//! - [`geom`]: domains, centering and quadrature of the quotient bound.

pub mod ball;
pub mod geom;
pub mod quad1d;
pub mod report;
pub mod roots;
pub mod specfun;
pub mod trial;
pub mod verify;

pub use ball::BallMode;
pub use report::VerificationReport;
pub use trial::TrialProfile;
