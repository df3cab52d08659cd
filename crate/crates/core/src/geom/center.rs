//! The translation `v` with `X(v) = ∫_Ω ρ(|x-v|) (x-v)/|x-v| dx = 0`.
//!
//! `X` is solved with damped Newton steps `v ← v + λ M⁻¹ X(v)`, where
//! `M = ∫_Ω [ρ' n nᵀ + (ρ/r)(I - n nᵀ)]` is minus the Jacobian of `X` and
//! `n = (x-v)/r`. The step length `λ ∈ (0, 1]` is halved until `|X|`
//! decreases and `v` stays in the bounding box. The quadrature points do not
//! move with `v`, so for Monte Carlo the same samples are reused at every
//! iterate and the estimated `X` is a smooth function of `v`. If Newton
//! stalls, a sweep of one-dimensional root solves along the coordinate axes
//! takes over.

use thiserror::Error;

use crate::roots::{self, Bracket};
use crate::trial::TrialProfile;

use super::domain::{Domain, GeomError};
use super::quadrature::{integrate_points, QuadratureSpec};

pub const CENTER_MAX_ITER: usize = 200;
const CENTER_REL_TOL: f64 = 1e-6;
const MAX_HALVINGS: usize = 30;
const BISECTION_SWEEPS: usize = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CenteringError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("centering did not converge: |X| = {residual:.3e} > {tolerance:.3e} after {iterations} iterations; trace {trace:?}")]
    NoConvergence {
        residual: f64,
        tolerance: f64,
        iterations: usize,
        trace: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Centering {
    pub v: Vec<f64>,
    /// `|X(v)|` as estimated by the quadrature.
    pub residual: f64,
    /// `1e-6 · |Ω| · ρ(diam)`.
    pub tolerance: f64,
    pub iterations: usize,
    pub method: &'static str,
    /// `|X|` after every accepted step, starting with the initial guess.
    pub trace: Vec<f64>,
}

struct Field {
    x: Vec<f64>,
    m: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

fn field(domain: &Domain, profile: &TrialProfile, v: &[f64], quad: &QuadratureSpec, jacobian: bool) -> Result<Field, GeomError> {
    let d = domain.d as usize;
    let outputs = if jacobian { d + d * d } else { d };
    let f = |x: &[f64], out: &mut [f64]| {
        let mut diff = [0.0; 10];
        for k in 0..d {
            diff[k] = x[k] - v[k];
        }
        let r = norm(&diff[..d]);
        let jet = profile.jet(r);
        for k in 0..d {
            out[k] = jet.over_r * diff[k];
        }
        if jacobian {
            for i in 0..d {
                for j in 0..d {
                    let nn = if r > 0.0 { diff[i] * diff[j] / (r * r) } else { 0.0 };
                    let delta = if i == j { 1.0 } else { 0.0 };
                    let radial = if r > 0.0 { jet.d1 * nn } else { 0.0 };
                    out[d + i * d + j] = radial + jet.over_r * (delta - nn);
                }
            }
        }
    };
    let est = integrate_points(domain, outputs, &f, quad)?;
    Ok(Field {
        x: est.values[..d].to_vec(),
        m: est.values[d..].to_vec(),
    })
}

/// Solve `M δ = b` by Gaussian elimination with partial pivoting.
fn solve(mut m: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i * n + c].abs().total_cmp(&m[j * n + c].abs()))?;
        if m[p * n + c] == 0.0 || !m[p * n + c].is_finite() {
            return None;
        }
        if p != c {
            for k in 0..n {
                m.swap(p * n + k, c * n + k);
            }
            b.swap(p, c);
        }
        for i in c + 1..n {
            let f = m[i * n + c] / m[c * n + c];
            for k in c..n {
                m[i * n + k] -= f * m[c * n + k];
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i * n + k] * x[k]).sum();
        x[i] = (b[i] - s) / m[i * n + i];
    }
    Some(x)
}

fn in_box(v: &[f64], bbox: &[(f64, f64)]) -> bool {
    v.iter().zip(bbox).all(|(x, (lo, hi))| x >= lo && x <= hi)
}

/// Find the centering translation of `profile` on `domain`.
pub fn center_trial(domain: &Domain, profile: &TrialProfile, quad: &QuadratureSpec) -> Result<Centering, CenteringError> {
    let vol = domain.volume(quad)?.value;
    let tolerance = CENTER_REL_TOL * vol * profile.rho(domain.diameter_bound(), 0).abs();

    if let QuadratureSpec::Radial1D = quad {
        let (c, _) = domain.as_ball().ok_or_else(|| GeomError::QuadratureMismatch {
            quad: quad.to_string(),
            reason: "domain is not a ball".into(),
        })?;
        return Ok(Centering {
            v: c,
            residual: 0.0,
            tolerance,
            iterations: 0,
            method: "symmetry",
            trace: vec![0.0],
        });
    }

    let bbox = domain.bbox();
    let mut v: Vec<f64> = bbox.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    let mut cur = field(domain, profile, &v, quad, true)?;
    let mut res = norm(&cur.x);
    let mut trace = vec![res];
    let mut iterations = 0;
    while res > tolerance && iterations < CENTER_MAX_ITER {
        iterations += 1;
        let Some(step) = solve(cur.m.clone(), cur.x.clone()) else { break };
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = v.iter().zip(&step).map(|(a, s)| a + lambda * s).collect();
            if in_box(&trial, &bbox) {
                let f = field(domain, profile, &trial, quad, true)?;
                let r = norm(&f.x);
                if r < res {
                    accepted = Some((trial, f, r));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((nv, nf, nr)) = accepted else { break };
        v = nv;
        cur = nf;
        res = nr;
        trace.push(res);
    }
    if res <= tolerance {
        return Ok(Centering {
            v,
            residual: res,
            tolerance,
            iterations,
            method: "newton",
            trace,
        });
    }

    // Coordinate sweeps: X_k decreases along e_k, so each axis has one root in the box.
    for _ in 0..BISECTION_SWEEPS {
        for k in 0..v.len() {
            iterations += 1;
            let eval = |t: f64| -> Result<f64, GeomError> {
                let mut w = v.clone();
                w[k] = t;
                Ok(field(domain, profile, &w, quad, false)?.x[k])
            };
            let (lo, hi) = bbox[k];
            let (f_lo, f_hi) = (eval(lo)?, eval(hi)?);
            if f_lo.signum() == f_hi.signum() {
                continue;
            }
            v[k] = roots::brent(eval, Bracket { lo, hi, f_lo, f_hi }, 1e-12)?;
        }
        res = norm(&field(domain, profile, &v, quad, false)?.x);
        trace.push(res);
        if res <= tolerance {
            return Ok(Centering {
                v,
                residual: res,
                tolerance,
                iterations,
                method: "bisection",
                trace,
            });
        }
    }
    Err(CenteringError::NoConvergence {
        residual: res,
        tolerance,
        iterations,
        trace,
    })
}
