//! Domains, quadrature over them, the centering translation and the
//! quotient bound `∫_Ω N[ρ] / ∫_Ω ρ²`.

mod center;
mod config;
mod domain;
mod quadrature;
mod quotient;

pub use center::{center_trial, Centering, CenteringError, CENTER_MAX_ITER};
pub use config::{parse_domain, ConfigError};
pub use domain::{
    normalize_volume, unit_ball_volume, unit_sphere_area, Domain, GeomError, Implicit, Shape, Volume, VOLUME_REL_TOL,
};
pub use quadrature::{
    default_quadrature, integrate_points, integrate_radial, integrate_radial_pair, Estimate, PairEstimate,
    PointIntegrand, QuadratureSpec, MAX_GRID_CELLS,
};
pub use quotient::{monotone_domain_comparison, quotient_at, quotient_bound, QuotientBound, QuotientError};
