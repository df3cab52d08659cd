//! Volume integrals over a [`Domain`]: radial 1D, midpoint tensor grid and
//! seeded Monte Carlo.
//!
//! Parallel work is split into fixed chunks (grid rows, Monte Carlo blocks of
//! `MC_CHUNK` samples with their own ChaCha stream) and the chunk results are
//! summed pairwise in index order, so results do not depend on the thread
//! count.

use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::quad1d;

use super::domain::{unit_sphere_area, Domain, GeomError};

/// Upper limit on the number of tensor-grid cells.
pub const MAX_GRID_CELLS: u128 = 1 << 28;
const MC_CHUNK: u64 = 65_536;
const RADIAL_REL_TOL: f64 = 1e-12;
const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureSpec {
    /// Only for a ball integrated about its own center.
    Radial1D,
    /// Midpoint rule on `cells` subdivisions per axis of the bounding box.
    TensorGrid { cells: u32 },
    MonteCarlo { samples: u64, seed: u64 },
}

impl fmt::Display for QuadratureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadratureSpec::Radial1D => write!(f, "radial"),
            QuadratureSpec::TensorGrid { cells } => write!(f, "grid({cells} per axis)"),
            QuadratureSpec::MonteCarlo { samples, seed } => write!(f, "mc({samples} samples, seed {seed})"),
        }
    }
}

/// `1024^d` grid cells for `d = 2`, `10^7` Monte Carlo samples otherwise.
pub fn default_quadrature(d: u32) -> QuadratureSpec {
    if d == 2 {
        QuadratureSpec::TensorGrid { cells: 1024 }
    } else {
        QuadratureSpec::MonteCarlo {
            samples: 10_000_000,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Standard error (Monte Carlo), `|I_N - I_{N/2}|` (grid) or the
    /// adaptive-quadrature estimate (radial).
    pub error: f64,
}

/// Several integrals computed from the same points.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEstimate {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Row-major covariance of the estimates. Monte Carlo only; the other
    /// rules leave it empty.
    pub covariance: Vec<f64>,
}

impl PairEstimate {
    pub fn get(&self, k: usize) -> Estimate {
        Estimate {
            value: self.values[k],
            error: self.errors[k],
        }
    }

    /// `values[i] / values[j]` with a first-order error. Uses the covariance
    /// when present, otherwise adds the relative errors.
    pub fn ratio(&self, i: usize, j: usize) -> Estimate {
        let (a, b) = (self.values[i], self.values[j]);
        let q = a / b;
        let error = if self.covariance.is_empty() {
            (self.errors[i] + q.abs() * self.errors[j]) / b.abs()
        } else {
            let k = self.values.len();
            let c = |x: usize, y: usize| self.covariance[x * k + y];
            let var = c(i, i) - 2.0 * q * c(i, j) + q * q * c(j, j);
            var.max(0.0).sqrt() / b.abs()
        };
        Estimate { value: q, error }
    }
}

/// Integrand with `outputs` components evaluated at a point.
pub type PointIntegrand<'a> = dyn Fn(&[f64], &mut [f64]) + Sync + 'a;

fn pairwise_sum(mut parts: Vec<Vec<f64>>) -> Vec<f64> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().unwrap_or_default()
}

/// `∫_Ω f` for a vector-valued `f`, by grid or Monte Carlo.
pub fn integrate_points(
    domain: &Domain,
    outputs: usize,
    f: &PointIntegrand<'_>,
    quad: &QuadratureSpec,
) -> Result<PairEstimate, GeomError> {
    match *quad {
        QuadratureSpec::Radial1D => Err(GeomError::QuadratureMismatch {
            quad: quad.to_string(),
            reason: "radial quadrature needs a radial integrand".into(),
        }),
        QuadratureSpec::TensorGrid { cells } => {
            if cells < 2 || cells % 2 == 1 {
                return Err(GeomError::QuadratureMismatch {
                    quad: quad.to_string(),
                    reason: "grid needs an even number of cells per axis".into(),
                });
            }
            let total = (cells as u128).pow(domain.d);
            if total > MAX_GRID_CELLS {
                return Err(GeomError::GridTooLarge(total));
            }
            let fine = grid_sum(domain, outputs, f, cells);
            let coarse = grid_sum(domain, outputs, f, cells / 2);
            let errors = fine.iter().zip(&coarse).map(|(a, b)| (a - b).abs()).collect();
            Ok(PairEstimate {
                values: fine,
                errors,
                covariance: Vec::new(),
            })
        }
        QuadratureSpec::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(GeomError::QuadratureMismatch {
                    quad: quad.to_string(),
                    reason: "Monte Carlo needs at least 2 samples".into(),
                });
            }
            Ok(monte_carlo(domain, outputs, f, samples, seed))
        }
    }
}

fn grid_sum(domain: &Domain, outputs: usize, f: &PointIntegrand<'_>, cells: u32) -> Vec<f64> {
    let d = domain.d as usize;
    let bbox = domain.bbox();
    let h: Vec<f64> = bbox.iter().map(|(lo, hi)| (hi - lo) / cells as f64).collect();
    let cell_volume: f64 = h.iter().product();
    let per_row = (cells as u64).pow(domain.d - 1);
    let rows: Vec<Vec<f64>> = (0..cells)
        .into_par_iter()
        .map(|i0| {
            let mut acc = vec![0.0; outputs];
            let mut out = vec![0.0; outputs];
            let mut x = vec![0.0; d];
            x[0] = bbox[0].0 + (i0 as f64 + 0.5) * h[0];
            for idx in 0..per_row {
                let mut rest = idx;
                for k in 1..d {
                    let ik = rest % cells as u64;
                    rest /= cells as u64;
                    x[k] = bbox[k].0 + (ik as f64 + 0.5) * h[k];
                }
                if domain.contains(&x) {
                    f(&x, &mut out);
                    for (a, o) in acc.iter_mut().zip(&out) {
                        *a += o;
                    }
                }
            }
            acc
        })
        .collect();
    pairwise_sum(rows).into_iter().map(|s| s * cell_volume).collect()
}

fn monte_carlo(domain: &Domain, outputs: usize, f: &PointIntegrand<'_>, samples: u64, seed: u64) -> PairEstimate {
    let d = domain.d as usize;
    let bbox = domain.bbox();
    let chunks = samples.div_ceil(MC_CHUNK);
    let k = outputs;
    // per chunk: k sums then k² cross sums
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let n = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut acc = vec![0.0; k + k * k];
            let mut out = vec![0.0; k];
            let mut x = vec![0.0; d];
            for _ in 0..n {
                for (xk, (lo, hi)) in x.iter_mut().zip(&bbox) {
                    *xk = lo + (hi - lo) * rng.random::<f64>();
                }
                if !domain.contains(&x) {
                    continue;
                }
                f(&x, &mut out);
                for i in 0..k {
                    acc[i] += out[i];
                    for j in 0..k {
                        acc[k + i * k + j] += out[i] * out[j];
                    }
                }
            }
            acc
        })
        .collect();
    let total = pairwise_sum(parts);
    let n = samples as f64;
    let vol = domain.bbox_volume();
    let mean: Vec<f64> = total[..k].to_vec();
    let mean: Vec<f64> = mean.iter().map(|s| s / n).collect();
    let mut covariance = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let c = (total[k + i * k + j] / n - mean[i] * mean[j]) * n / (n - 1.0);
            covariance[i * k + j] = vol * vol * c / n;
        }
    }
    PairEstimate {
        values: mean.iter().map(|m| m * vol).collect(),
        errors: (0..k).map(|i| covariance[i * k + i].max(0.0).sqrt()).collect(),
        covariance,
    }
}

fn check_radial_center(domain: &Domain, center: &[f64], quad: &QuadratureSpec) -> Result<f64, GeomError> {
    let mismatch = |reason: &str| GeomError::QuadratureMismatch {
        quad: quad.to_string(),
        reason: reason.into(),
    };
    let (c, radius) = domain.as_ball().ok_or_else(|| mismatch("domain is not a ball"))?;
    let off: f64 = c.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    if off > 1e-12 * radius.max(1.0) {
        return Err(mismatch("ball is not centered at the integration center"));
    }
    Ok(radius)
}

fn radial_breaks(radius: f64) -> Vec<f64> {
    [crate::trial::SMALL_R_THRESHOLD, 1.0].into_iter().filter(|&b| b < radius).collect()
}

/// `∫_Ω f(|x - center|) dx`.
pub fn integrate_radial(
    domain: &Domain,
    center: &[f64],
    f: &(dyn Fn(f64) -> f64 + Sync),
    quad: &QuadratureSpec,
) -> Result<Estimate, GeomError> {
    let pair = integrate_radial_pair(domain, center, &|r| (f(r), 0.0), quad)?;
    Ok(pair.get(0))
}

/// `∫_Ω f(|x - center|) dx` for a function returning two values, computed
/// from the same points so their ratio has a consistent error.
pub fn integrate_radial_pair(
    domain: &Domain,
    center: &[f64],
    f: &(dyn Fn(f64) -> (f64, f64) + Sync),
    quad: &QuadratureSpec,
) -> Result<PairEstimate, GeomError> {
    if let QuadratureSpec::Radial1D = quad {
        let radius = check_radial_center(domain, center, quad)?;
        let d = domain.d;
        let area = unit_sphere_area(d);
        let breaks = radial_breaks(radius);
        let one = |pick: fn((f64, f64)) -> f64| {
            let r = quad1d::integrate(
                |r| pick(f(r)) * r.powi(d as i32 - 1),
                0.0,
                radius,
                &breaks,
                RADIAL_REL_TOL,
                0.0,
                2000,
            );
            (area * r.value, area * r.error)
        };
        let (v0, e0) = one(|p| p.0);
        let (v1, e1) = one(|p| p.1);
        return Ok(PairEstimate {
            values: vec![v0, v1],
            errors: vec![e0, e1],
            covariance: Vec::new(),
        });
    }
    let g = |x: &[f64], out: &mut [f64]| {
        let r = x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let (u, v) = f(r);
        out[0] = u;
        out[1] = v;
    };
    integrate_points(domain, 2, &g, quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::domain::{unit_ball_volume, Shape};
    use std::f64::consts::PI;

    #[test]
    fn radial_volume_and_second_moment() {
        let b = Domain::ball(2, 1.0).unwrap();
        let v = integrate_radial(&b, &[0.0, 0.0], &|_| 1.0, &QuadratureSpec::Radial1D).unwrap();
        assert!((v.value - PI).abs() < 1e-12);
        for d in 2..6 {
            let b = Domain::ball(d, 1.0).unwrap();
            let c = vec![0.0; d as usize];
            let m = integrate_radial(&b, &c, &|r| r * r, &QuadratureSpec::Radial1D).unwrap();
            let exact = unit_ball_volume(d) * d as f64 / (d as f64 + 2.0);
            assert!((m.value - exact).abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn radial_rejects_non_balls() {
        let e = Domain::new(2, Shape::Ellipsoid { semiaxes: vec![2.0, 0.5] }).unwrap();
        assert!(integrate_radial(&e, &[0.0, 0.0], &|_| 1.0, &QuadratureSpec::Radial1D).is_err());
        let b = Domain::ball(2, 1.0).unwrap().translated(&[0.3, 0.0]);
        assert!(integrate_radial(&b, &[0.0, 0.0], &|_| 1.0, &QuadratureSpec::Radial1D).is_err());
        assert!(integrate_radial(&b, &[0.3, 0.0], &|_| 1.0, &QuadratureSpec::Radial1D).is_ok());
    }

    #[test]
    fn grid_and_mc_second_moment() {
        let b = Domain::ball(2, 1.0).unwrap();
        let exact = PI / 2.0;
        let g = integrate_radial(&b, &[0.0, 0.0], &|r| r * r, &QuadratureSpec::TensorGrid { cells: 512 }).unwrap();
        assert!((g.value - exact).abs() < 1e-3, "{g:?}");
        let m = integrate_radial(
            &b,
            &[0.0, 0.0],
            &|r| r * r,
            &QuadratureSpec::MonteCarlo { samples: 200_000, seed: 7 },
        )
        .unwrap();
        assert!((m.value - exact).abs() < 4.0 * m.error, "{m:?}");
    }

    #[test]
    fn box_grid_is_exact_for_constants() {
        let sq = Domain::new(2, Shape::Box { sides: vec![2.0, 1.0] }).unwrap();
        let v = integrate_points(&sq, 1, &|_, o| o[0] = 1.0, &QuadratureSpec::TensorGrid { cells: 64 }).unwrap();
        assert!((v.values[0] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn mc_is_reproducible() {
        let b = Domain::ball(3, 1.0).unwrap();
        let q = QuadratureSpec::MonteCarlo { samples: 150_000, seed: 3 };
        let a = integrate_radial(&b, &[0.0; 3], &|r| r, &q).unwrap();
        let c = integrate_radial(&b, &[0.0; 3], &|r| r, &q).unwrap();
        assert_eq!(a.value.to_bits(), c.value.to_bits());
        assert_eq!(a.error.to_bits(), c.error.to_bits());
    }

    #[test]
    fn pairwise_sum_keeps_order() {
        let parts = vec![vec![1.0], vec![2.0], vec![3.0]];
        assert_eq!(pairwise_sum(parts), vec![6.0]);
    }
}
