//! The quotient `Q = ∫_Ω N[ρ] / ∫_Ω ρ²` and its comparison with the ball.

use thiserror::Error;

use crate::ball::BallError;
use crate::report::{Check, VerificationReport};
use crate::trial::TrialProfile;

use super::center::{center_trial, Centering, CenteringError};
use super::domain::{normalize_volume, unit_ball_volume, Domain, GeomError};
use super::quadrature::{integrate_radial_pair, Estimate, PairEstimate, QuadratureSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuotientError {
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Centering(#[from] CenteringError),
}

/// Result of [`quotient_bound`]. `q`, `omega` and the integrals refer to
/// the domain as given; `scale` maps it to the volume-normalized copy on
/// which the profile was centered and integrated.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientBound {
    pub q: Estimate,
    /// Fundamental tone of the ball with the same volume.
    pub omega: f64,
    pub numerator: Estimate,
    pub denominator: Estimate,
    pub scale: f64,
    /// Centering translation in normalized coordinates.
    pub centering: Centering,
}

impl QuotientBound {
    /// `ω - Q`.
    pub fn margin(&self) -> f64 {
        self.omega - self.q.value
    }

    /// `(ω - Q)` in units of the error of `Q`.
    pub fn sigmas(&self) -> f64 {
        self.margin() / self.q.error
    }
}

/// Numerator and denominator integrals of `profile` about `center`.
pub fn quotient_at(
    domain: &Domain,
    profile: &TrialProfile,
    center: &[f64],
    quad: &QuadratureSpec,
) -> Result<PairEstimate, GeomError> {
    integrate_radial_pair(domain, center, &|r| profile.integrands(r), quad)
}

/// Normalize `Ω` to the volume of the unit ball, center the trial profile
/// for tension `τ/s²`, integrate, and scale back: `Q(Ω, τ) = s⁴ Q(sΩ, τ/s²)`.
pub fn quotient_bound(domain: &Domain, tau: f64, quad: &QuadratureSpec) -> Result<QuotientBound, QuotientError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(BallError::Tension(tau).into());
    }
    let (normalized, s) = normalize_volume(domain, None)?;
    let profile = TrialProfile::for_tension(tau / (s * s), domain.d)?;
    let centering = center_trial(&normalized, &profile, quad)?;
    let est = quotient_at(&normalized, &profile, &centering.v, quad)?;
    let s4 = s.powi(4);
    let sd = s.powi(domain.d as i32);
    let q = est.ratio(0, 1);
    let scale_est = |e: Estimate, f: f64| Estimate {
        value: e.value * f,
        error: e.error * f,
    };
    Ok(QuotientBound {
        q: scale_est(q, s4),
        omega: profile.mode.omega * s4,
        // ∫_Ω F(x) dx = s^-d ∫_{sΩ} F(y/s) dy, and N scales by s⁴ relative to ρ².
        numerator: scale_est(est.get(0), s4 / sd),
        denominator: scale_est(est.get(1), 1.0 / sd),
        scale: s,
        centering,
    })
}

const COMPARISON_SIGMAS: f64 = 3.0;

/// `∫_Ω N[ρ] ≤ ∫_B N[ρ]` and `∫_Ω ρ² ≥ ∫_B ρ²` for a normalized, centered
/// domain, with `B` the unit ball integrated radially.
///
/// Margins are the differences in units of their combined error (with a
/// floor of `1e-12` relative), so the check passes unless a difference goes
/// the wrong way by more than three error bars. Strict inequalities show up
/// as large positive margins.
pub fn monotone_domain_comparison(
    domain: &Domain,
    profile: &TrialProfile,
    quad: &QuadratureSpec,
) -> Result<VerificationReport, QuotientError> {
    let d = domain.d;
    if d != profile.d() {
        return Err(GeomError::Shape(format!("profile dimension {} differs from domain dimension {d}", profile.d())).into());
    }
    let vol = domain.volume(quad)?;
    let target = unit_ball_volume(d);
    if (vol.value - target).abs() > 1e-4 * target + 3.0 * vol.error {
        return Err(GeomError::Shape(format!("domain volume {} is not |B_1| = {target}", vol.value)).into());
    }
    let centering = center_trial(domain, profile, quad)?;
    let omega = quotient_at(domain, profile, &centering.v, quad)?;
    let ball = Domain::ball(d, 1.0)?;
    let b = quotient_at(&ball, profile, &vec![0.0; d as usize], &QuadratureSpec::Radial1D)?;

    let sigma = |x: Estimate, y: Estimate| (x.error.powi(2) + y.error.powi(2)).sqrt().max(1e-12 * y.value.abs());
    let mut rep = VerificationReport::builder("monint", Check::NonNegative, COMPARISON_SIGMAS)
        .dim(d)
        .grid(format!("{} vs radial ball", quad));
    let (na, nb) = (omega.get(0), b.get(0));
    rep.observe((nb.value - na.value) / sigma(na, nb), || {
        format!("numerator;domain={:.10e};ball={:.10e}", na.value, nb.value)
    });
    let (da, db) = (omega.get(1), b.get(1));
    rep.observe((da.value - db.value) / sigma(da, db), || {
        format!("denominator;domain={:.10e};ball={:.10e}", da.value, db.value)
    });
    Ok(rep.finish())
}
