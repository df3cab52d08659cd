//! Fundamental mode of the free plate on the ball `B_R ⊂ R^d`.
//!
//! The mode is `u = R(r) Y_1` with `R(r) = j_1(ar) + γ i_1(br)`,
//! `b² = a² + τ` and `ω = a²b²`. `γ` enforces `Mu = R''(R) = 0`; the
//! wavenumber `a` is the smallest root of the remaining condition `Vu = 0`,
//! which for `l = 1` reads
//!
//! ```text
//! V(a) = (τ + (d-1)/R²) R'(R) - (d-1)/R³ R(R) + a³ j_1'(aR) - γ b³ i_1'(bR).
//! ```

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::quad1d;
use crate::roots::{self, Bracket};
use crate::specfun::{self, first_zero_j1prime, Kind, SpecFunError};

/// Relative tolerance of the root in `a`.
pub const ROOT_REL_TOL: f64 = 1e-12;
/// Scaled tolerance on the boundary residuals.
pub const RESIDUAL_TOL: f64 = 1e-9;
const SCAN_POINTS: usize = 400;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BallError {
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("tau must be positive, got {0}")]
    Tension(f64),
    #[error("radius must be positive, got {0}")]
    Radius(f64),
    #[error("wavenumber a = {a} must lie in (0, {limit}) (ainf/R)")]
    Wavenumber { a: f64, limit: f64 },
    #[error("no sign change of the secular function in (0, ainf/R) for d = {d}, tau = {tau}, R = {radius}; scan trace (a, V): {}", format_trace(trace))]
    NoRoot {
        d: u32,
        tau: f64,
        radius: f64,
        trace: Vec<(f64, f64)>,
    },
}

fn format_trace(trace: &[(f64, f64)]) -> String {
    let step = (trace.len() / 12).max(1);
    trace
        .iter()
        .step_by(step)
        .map(|(a, v)| format!("({a:.4e}, {v:.4e})"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn check_args(a: f64, tau: f64, d: u32, radius: f64) -> Result<f64, BallError> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(BallError::Tension(tau));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(BallError::Radius(radius));
    }
    let limit = first_zero_j1prime(d)? / radius;
    if !(a > 0.0 && a < limit) {
        return Err(BallError::Wavenumber { a, limit });
    }
    Ok((a * a + tau).sqrt())
}

fn gamma_unchecked(a: f64, b: f64, d: u32, radius: f64) -> Result<f64, SpecFunError> {
    let j2 = specfun::derivatives(Kind::J, 1, d, a * radius, 2)?[2];
    let i2 = specfun::derivatives(Kind::I, 1, d, b * radius, 2)?[2];
    Ok(-a * a * j2 / (b * b * i2))
}

/// Coupling constant `γ = -a² j_1''(aR) / (b² i_1''(bR))`.
pub fn gamma_of(a: f64, tau: f64, d: u32, radius: f64) -> Result<f64, BallError> {
    let b = check_args(a, tau, d, radius)?;
    Ok(gamma_unchecked(a, b, d, radius)?)
}

/// Terms of `V(a)`, kept apart so residuals can be scaled.
fn secular_terms(a: f64, tau: f64, d: u32, radius: f64) -> Result<[f64; 4], BallError> {
    let b = check_args(a, tau, d, radius)?;
    let gamma = gamma_unchecked(a, b, d, radius)?;
    let j = specfun::derivatives(Kind::J, 1, d, a * radius, 1)?;
    let i = specfun::derivatives(Kind::I, 1, d, b * radius, 1)?;
    let dm1 = d as f64 - 1.0;
    let r_val = j[0] + gamma * i[0];
    let r_der = a * j[1] + gamma * b * i[1];
    Ok([
        (tau + dm1 / (radius * radius)) * r_der,
        -dm1 / radius.powi(3) * r_val,
        a.powi(3) * j[1],
        -gamma * b.powi(3) * i[1],
    ])
}

/// The `V` boundary residual of the `l = 1` mode with wavenumber `a`.
pub fn secular_v(a: f64, tau: f64, d: u32, radius: f64) -> Result<f64, BallError> {
    Ok(secular_terms(a, tau, d, radius)?.iter().sum())
}

/// Solved fundamental mode of `B_R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallMode {
    pub d: u32,
    pub tau: f64,
    pub radius: f64,
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub omega: f64,
}

/// Boundary residuals of a solved mode with their natural scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `R''(R)`.
    pub m: f64,
    /// `|a² j_1''(aR)|`.
    pub m_scale: f64,
    /// `V(a)`.
    pub v: f64,
    /// Sum of the absolute values of the terms of `V`.
    pub v_scale: f64,
}

impl Residuals {
    pub fn scaled_m(&self) -> f64 {
        self.m / self.m_scale
    }

    pub fn scaled_v(&self) -> f64 {
        self.v / self.v_scale
    }

    pub fn within(&self, tol: f64) -> bool {
        self.scaled_m().abs() <= tol && self.scaled_v().abs() <= tol
    }
}

impl BallMode {
    /// `R^(k)(r)` for `k = 0..=4`, at `0 ≤ r` where the kernels apply.
    pub fn radial(&self, r: f64) -> Result<[f64; 5], SpecFunError> {
        let j = specfun::derivatives(Kind::J, 1, self.d, self.a * r, 4)?;
        let i = specfun::derivatives(Kind::I, 1, self.d, self.b * r, 4)?;
        let mut out = [0.0; 5];
        let (mut ak, mut bk) = (1.0, 1.0);
        for k in 0..5 {
            out[k] = ak * j[k] + self.gamma * bk * i[k];
            ak *= self.a;
            bk *= self.b;
        }
        Ok(out)
    }

    pub fn residuals(&self) -> Result<Residuals, BallError> {
        let r = self.radius;
        let j2 = specfun::derivatives(Kind::J, 1, self.d, self.a * r, 2)?[2];
        let i2 = specfun::derivatives(Kind::I, 1, self.d, self.b * r, 2)?[2];
        let m_a = self.a * self.a * j2;
        let m = m_a + self.gamma * self.b * self.b * i2;
        let terms = secular_terms(self.a, self.tau, self.d, r)?;
        Ok(Residuals {
            m,
            m_scale: m_a.abs(),
            v: terms.iter().sum(),
            v_scale: terms.iter().map(|t| t.abs()).sum(),
        })
    }
}

/// Solve for the fundamental mode: the smallest root `a ∈ (0, ainf/R)` of
/// [`secular_v`], refined to relative tolerance [`ROOT_REL_TOL`].
pub fn fundamental_tone(tau: f64, d: u32, radius: f64) -> Result<BallMode, BallError> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(BallError::Tension(tau));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(BallError::Radius(radius));
    }
    let limit = first_zero_j1prime(d)? / radius;
    let v = |a: f64| secular_v(a, tau, d, radius);

    let mut trace = Vec::with_capacity(SCAN_POINTS + 64);
    let h = limit / SCAN_POINTS as f64;

    // V > 0 for small a; for very small tension the first grid point can
    // already be past the root, so walk towards the origin first.
    let mut lead = h;
    let mut v_lead = v(lead)?;
    trace.push((lead, v_lead));
    let mut k = 0;
    while v_lead <= 0.0 && k < 80 {
        lead *= 0.5;
        v_lead = v(lead)?;
        trace.push((lead, v_lead));
        k += 1;
    }
    trace.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut bracket: Option<Bracket> = None;
    for w in trace.windows(2) {
        if w[0].1 > 0.0 && w[1].1 <= 0.0 {
            bracket = Some(Bracket {
                lo: w[0].0,
                hi: w[1].0,
                f_lo: w[0].1,
                f_hi: w[1].1,
            });
            break;
        }
    }
    if bracket.is_none() {
        let mut prev = *trace.last().expect("nonempty");
        for k in 2..SCAN_POINTS {
            let a = k as f64 * h;
            let va = v(a)?;
            trace.push((a, va));
            if prev.1 > 0.0 && va <= 0.0 {
                bracket = Some(Bracket {
                    lo: prev.0,
                    hi: a,
                    f_lo: prev.1,
                    f_hi: va,
                });
                break;
            }
            prev = (a, va);
        }
    }
    // Large tension pushes the root towards ainf/R; close the gap geometrically.
    if bracket.is_none() {
        let mut prev = *trace.last().expect("nonempty");
        let mut gap = h;
        while bracket.is_none() && gap > 1e-15 * limit {
            gap *= 0.25;
            let a = limit - gap;
            let va = v(a)?;
            trace.push((a, va));
            if prev.1 > 0.0 && va <= 0.0 {
                bracket = Some(Bracket {
                    lo: prev.0,
                    hi: a,
                    f_lo: prev.1,
                    f_hi: va,
                });
            }
            prev = (a, va);
        }
    }
    let bracket = bracket.ok_or_else(|| BallError::NoRoot {
        d,
        tau,
        radius,
        trace: trace.clone(),
    })?;
    let a = roots::brent(v, bracket, 0.1 * ROOT_REL_TOL)?;
    let b = (a * a + tau).sqrt();
    let gamma = gamma_unchecked(a, b, d, radius)?;
    Ok(BallMode {
        d,
        tau,
        radius,
        a,
        b,
        gamma,
        omega: a * a * b * b,
    })
}

/// Linear bounds on `ω₁(B₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToneBounds {
    /// `τ ainf²`.
    pub lower: f64,
    /// `τ (d+2)`, from the coordinate trial functions.
    pub upper_coord: f64,
    /// `C(B) + τ ainf²`, from the free-membrane mode.
    pub upper_membrane: f64,
}

pub fn tone_bounds(tau: f64, d: u32) -> Result<ToneBounds, BallError> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(BallError::Tension(tau));
    }
    let mu = first_zero_j1prime(d)?.powi(2);
    Ok(ToneBounds {
        lower: tau * mu,
        upper_coord: tau * (d as f64 + 2.0),
        upper_membrane: membrane_c(d)? + tau * mu,
    })
}

fn membrane_cache() -> &'static Mutex<HashMap<u32, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `C(B) = ∫|D²v|² / ∫v²` for the free-membrane mode `v = j_1(ainf r) Y_1`
/// of the unit ball.
pub fn membrane_c(d: u32) -> Result<f64, BallError> {
    if let Some(c) = membrane_cache().lock().unwrap().get(&d) {
        return Ok(*c);
    }
    let k = first_zero_j1prime(d)?;
    let dm1 = d as f64 - 1.0;
    let mut failure = None;
    let mut eval = |r: f64, f: &dyn Fn(&[f64; 5], f64) -> f64| -> f64 {
        let z = k * r;
        match specfun::derivatives(Kind::J, 1, d, z, 2)
            .and_then(|j| specfun::over_z(Kind::J, 2, d, z).map(|q| (j, q)))
        {
            Ok((j, q)) => f(&j, k * k * q) * r.powi(d as i32 - 1),
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    // (ρ - rρ')/r² = k² j_2(z)/z for ρ = j_1(kr)
    let num = quad1d::integrate(
        |r| eval(r, &|j, defect| (k * k * j[2]).powi(2) + 3.0 * dm1 * defect * defect),
        0.0,
        1.0,
        &[],
        1e-13,
        0.0,
        2000,
    );
    let den = quad1d::integrate(|r| eval(r, &|j, _| j[0] * j[0]), 0.0, 1.0, &[], 1e-13, 0.0, 2000);
    if let Some(e) = failure {
        return Err(e.into());
    }
    let c = num.value / den.value;
    membrane_cache().lock().unwrap().insert(d, c);
    Ok(c)
}

/// `ω₁(τ)/τ` of the unit ball for each `τ`.
pub fn infinite_tension_ratio(d: u32, taus: &[f64]) -> Result<Vec<f64>, BallError> {
    taus.iter()
        .map(|&tau| fundamental_tone(tau, d, 1.0).map(|m| m.omega / tau))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_cancels_m_condition() {
        for &(a, tau, d, r) in &[(0.5, 1.0, 2, 1.0), (1.0, 1.0, 3, 1.0), (0.3, 4.0, 5, 2.0)] {
            let g = gamma_of(a, tau, d, r).unwrap();
            let b = (a * a + tau).sqrt();
            let j2 = specfun::ultra_j(1, d, a * r, 2).unwrap();
            let i2 = specfun::ultra_i(1, d, b * r, 2).unwrap();
            let lhs = a * a * j2;
            assert!((lhs + g * b * b * i2).abs() <= 1e-13 * lhs.abs());
        }
    }

    #[test]
    fn gamma_positive() {
        for a in [0.5, 1.0, 1.5] {
            assert!(gamma_of(a, 1.0, 2, 1.0).unwrap() > 0.0);
        }
    }

    #[test]
    fn gamma_rejects_bad_input() {
        assert!(matches!(gamma_of(1.9, 1.0, 2, 1.0), Err(BallError::Wavenumber { .. })));
        assert!(matches!(gamma_of(1.0, 0.0, 2, 1.0), Err(BallError::Tension(_))));
        assert!(matches!(gamma_of(1.0, 1.0, 2, -1.0), Err(BallError::Radius(_))));
    }

    #[test]
    fn solved_mode_invariants() {
        for d in 2..8 {
            for tau in [1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3] {
                let m = fundamental_tone(tau, d, 1.0).unwrap();
                let ainf = first_zero_j1prime(d).unwrap();
                assert!(m.a > 0.0 && m.a < ainf, "d={d} tau={tau}");
                assert!(((m.b * m.b - m.a * m.a) - tau).abs() <= 1e-12 * tau.max(m.b * m.b));
                assert_eq!(m.omega, m.a * m.a * m.b * m.b);
                assert!(m.gamma > 0.0);
                let res = m.residuals().unwrap();
                assert!(res.within(RESIDUAL_TOL), "d={d} tau={tau} {res:?}");
            }
        }
    }

    #[test]
    fn root_is_zero_of_v() {
        let m = fundamental_tone(1.0, 2, 1.0).unwrap();
        assert!(secular_v(m.a, 1.0, 2, 1.0).unwrap().abs() < 1e-10);
    }

    #[test]
    fn unit_disk_bounds() {
        let b = tone_bounds(1.0, 2).unwrap();
        assert!((b.lower - 1.84118f64.powi(2)).abs() < 1e-3);
        assert_eq!(b.upper_coord, 4.0);
        let w = fundamental_tone(1.0, 2, 1.0).unwrap().omega;
        assert!(b.lower < w && w < b.upper_coord && w <= b.upper_membrane);
    }

    #[test]
    fn membrane_constant_positive() {
        for d in 2..6 {
            assert!(membrane_c(d).unwrap() > 0.0);
        }
    }

    #[test]
    fn negative_tension_rejected() {
        assert_eq!(fundamental_tone(-1.0, 2, 1.0), Err(BallError::Tension(-1.0)));
    }
}
