//! Radial trial profile built from the ball mode.
//!
//! `ρ(r) = j_1(ar) + γ i_1(br)` on `[0, 1]`, continued linearly for `r > 1`.
//! The `d` trial functions `u_k = x_k ρ(r)/r` satisfy
//!
//! ```text
//! Σ u_k²     = ρ²
//! Σ |Du_k|²  = (d-1) ρ²/r² + ρ'²
//! Σ |D²u_k|² = ρ''² + 3(d-1) (ρ - rρ')²/r⁴
//! ```
//!
//! so the quotient numerator integrand is
//! `N[ρ] = ρ''² + 3(d-1)(ρ-rρ')²/r⁴ + τρ'² + τ(d-1)ρ²/r²`.

use rayon::prelude::*;
use thiserror::Error;

use crate::ball::BallMode;
use crate::report::{Check, VerificationReport};
use crate::specfun::{self, Kind, SpecFunError};

/// Below this radius `ρ` is evaluated from its odd power series.
pub const SMALL_R_THRESHOLD: f64 = 1e-3;
const SERIES_TERMS: usize = 4;

/// Default scan tolerance for normalized margins.
pub const SCAN_TOL: f64 = 1e-9;
pub const DEFAULT_INNER: usize = 4096;
pub const DEFAULT_OUTER: usize = 4096;
pub const DEFAULT_R_MAX: f64 = 10.0;
/// Gap between the inner and outer grids at `r = 1`.
pub const INTERFACE_GAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrialError {
    #[error("trial profile needs the unit-ball mode, got radius {0}")]
    Radius(f64),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// `ρ` and the derived quantities that enter `N[ρ]`, all finite at `r = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub r: f64,
    pub rho: f64,
    pub d1: f64,
    pub d2: f64,
    /// `(ρ - rρ')/r²`.
    pub defect: f64,
    /// `ρ/r`.
    pub over_r: f64,
}

/// The trial profile of a solved unit-ball mode.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialProfile {
    pub mode: BallMode,
    pub small_r_threshold: f64,
    /// `ρ = Σ e_m r^(2m+1)` near the origin.
    series: [f64; SERIES_TERMS],
    r1: f64,
    r1_prime: f64,
}

impl TrialProfile {
    pub fn new(mode: BallMode) -> Result<Self, TrialError> {
        if mode.radius != 1.0 {
            return Err(TrialError::Radius(mode.radius));
        }
        let c = specfun::series_coefficients(Kind::I, 1, mode.d, SERIES_TERMS);
        let mut series = [0.0; SERIES_TERMS];
        for (m, e) in series.iter_mut().enumerate() {
            let p = 2 * m as i32 + 1;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            *e = c[m] * (sign * mode.a.powi(p) + mode.gamma * mode.b.powi(p));
        }
        let edge = mode.radial(1.0)?;
        Ok(Self {
            mode,
            small_r_threshold: SMALL_R_THRESHOLD,
            series,
            r1: edge[0],
            r1_prime: edge[1],
        })
    }

    /// Solve the unit-ball mode for `(τ, d)` and build its profile.
    pub fn for_tension(tau: f64, d: u32) -> Result<Self, crate::ball::BallError> {
        let mode = crate::ball::fundamental_tone(tau, d, 1.0)?;
        Self::new(mode).map_err(|e| match e {
            TrialError::SpecFun(s) => s.into(),
            TrialError::Radius(r) => crate::ball::BallError::Radius(r),
        })
    }

    pub fn d(&self) -> u32 {
        self.mode.d
    }

    pub fn tau(&self) -> f64 {
        self.mode.tau
    }

    /// Coefficients `e_m` of the small-`r` series.
    pub fn series_coefficients(&self) -> [f64; SERIES_TERMS] {
        self.series
    }

    /// `ρ(1)` and `ρ'(1)`.
    pub fn edge(&self) -> (f64, f64) {
        (self.r1, self.r1_prime)
    }

    pub fn jet(&self, r: f64) -> Jet {
        debug_assert!(r >= 0.0);
        if r > 1.0 {
            let rho = self.r1 + (r - 1.0) * self.r1_prime;
            return Jet {
                r,
                rho,
                d1: self.r1_prime,
                d2: 0.0,
                defect: (self.r1 - self.r1_prime) / (r * r),
                over_r: rho / r,
            };
        }
        if r < self.small_r_threshold {
            let e = &self.series;
            let r2 = r * r;
            let mut jet = Jet {
                r,
                rho: 0.0,
                d1: 0.0,
                d2: 0.0,
                defect: 0.0,
                over_r: 0.0,
            };
            let mut pow = 1.0; // r^(2m)
            for (m, &em) in e.iter().enumerate() {
                let mf = m as f64;
                jet.over_r += em * pow;
                jet.d1 += (2.0 * mf + 1.0) * em * pow;
                if m > 0 {
                    let low = r.powi(2 * m as i32 - 1);
                    jet.d2 += (2.0 * mf + 1.0) * (2.0 * mf) * em * low;
                    jet.defect -= 2.0 * mf * em * low;
                }
                pow *= r2;
            }
            jet.rho = r * jet.over_r;
            return jet;
        }
        let m = &self.mode;
        let (za, zb) = (m.a * r, m.b * r);
        let eval = || -> Result<Jet, SpecFunError> {
            let j1 = specfun::derivatives(Kind::J, 1, m.d, za, 2)?;
            let i1 = specfun::derivatives(Kind::I, 1, m.d, zb, 2)?;
            let j2 = specfun::derivatives(Kind::J, 2, m.d, za, 0)?[0];
            let i2 = specfun::derivatives(Kind::I, 2, m.d, zb, 0)?[0];
            let g = m.gamma;
            Ok(Jet {
                r,
                rho: j1[0] + g * i1[0],
                d1: m.a * j1[1] + g * m.b * i1[1],
                d2: m.a * m.a * j1[2] + g * m.b * m.b * i1[2],
                // ρ - rρ' = za j_2(za) - γ zb i_2(zb)
                defect: m.a * m.a * j2 / za - g * m.b * m.b * i2 / zb,
                over_r: m.a * j1[0] / za + g * m.b * i1[0] / zb,
            })
        };
        // Arguments are bounded by b, far inside the kernel range.
        eval().expect("profile arguments lie within the kernel range")
    }

    /// `ρ^(deriv)(r)` for `deriv ∈ {0, 1, 2}`.
    pub fn rho(&self, r: f64, deriv: u32) -> f64 {
        let j = self.jet(r);
        match deriv {
            0 => j.rho,
            1 => j.d1,
            2 => j.d2,
            _ => panic!("rho supports derivatives 0..=2, got {deriv}"),
        }
    }

    /// `N[ρ](r)`.
    pub fn numerator_integrand(&self, r: f64) -> f64 {
        numerator_from_jet(&self.jet(r), self.d(), self.tau())
    }

    /// `N[ρ](r)` and `ρ(r)²` together.
    pub fn integrands(&self, r: f64) -> (f64, f64) {
        let j = self.jet(r);
        (numerator_from_jet(&j, self.d(), self.tau()), j.rho * j.rho)
    }

    /// `h(r) = 3(ρ - rρ')²/r⁴ + τρ²/r²`.
    pub fn h(&self, r: f64) -> f64 {
        let j = self.jet(r);
        3.0 * j.defect * j.defect + self.tau() * j.over_r * j.over_r
    }

    /// `6(ρ - rρ')/r² + 3ρ'' + τρ`; `h` decreases wherever this is positive.
    pub fn quantinterest(&self, r: f64) -> f64 {
        let j = self.jet(r);
        6.0 * j.defect + 3.0 * j.d2 + self.tau() * j.rho
    }

    /// `R''''(r)` of the ball mode on `[0, 1]`.
    pub fn fourth_derivative(&self, r: f64) -> f64 {
        if r < self.small_r_threshold {
            let e = &self.series;
            // Σ (2m+1)(2m)(2m-1)(2m-2) e_m r^(2m-3), m ≥ 2
            return (2..SERIES_TERMS)
                .map(|m| {
                    let p = 2 * m as i32 + 1;
                    let f = (p * (p - 1) * (p - 2) * (p - 3)) as f64;
                    f * e[m] * r.powi(p - 4)
                })
                .sum();
        }
        self.mode.radial(r).expect("profile arguments lie within the kernel range")[4]
    }

    /// `ρ'' < 0` on `(0, 1)`, `ρ''` vanishing at both endpoints, and
    /// `R'''' > 0` on `(0, 1]`.
    ///
    /// Interior margins are normalized by the leading behaviour near the
    /// endpoints so they stay O(1) on any grid.
    pub fn concavity_scan(&self, grid_size: usize) -> Vec<VerificationReport> {
        assert!(grid_size >= 1000, "concavity scan needs at least 10^3 points");
        let d = self.d();
        let e = self.series;
        let grid_desc = format!("{grid_size} interior points on (0;1)");
        let interior: Vec<f64> = (1..=grid_size).map(|k| k as f64 / (grid_size + 1) as f64).collect();

        let c2 = (6.0 * e[1]).abs();
        let c4 = (120.0 * e[2]).abs();
        let values: Vec<(f64, f64, f64)> = interior
            .par_iter()
            .map(|&r| {
                let d2 = self.rho(r, 2);
                (r, -d2 / (c2 * r * (1.0 - r)), self.fourth_derivative(r) / (c4 * r))
            })
            .collect();

        let mut neg = VerificationReport::builder("gppneg", Check::Positive, SCAN_TOL)
            .dim(d)
            .grid(grid_desc.clone());
        let mut convex = VerificationReport::builder("gppneg.fourth", Check::Positive, SCAN_TOL)
            .dim(d)
            .grid(format!("{} points on (0;1]", grid_size + 1));
        for &(r, m2, m4) in &values {
            neg.observe(m2, || format!("tau={};r={r:.6e}", self.tau()));
            convex.observe(m4, || format!("tau={};r={r:.6e}", self.tau()));
        }
        convex.observe(self.fourth_derivative(1.0) / c4, || format!("tau={};r=1", self.tau()));

        let mut ends = VerificationReport::builder("gppneg.endpoints", Check::Zero, SCAN_TOL)
            .dim(d)
            .grid("r in {0;1}");
        ends.observe(self.rho(0.0, 2) / c2, || format!("tau={};r=0", self.tau()));
        ends.observe(self.rho(1.0, 2) / c2, || format!("tau={};r=1", self.tau()));

        vec![neg.finish(), ends.finish(), convex.finish()]
    }

    /// Partial monotonicity of `N[ρ]` across the unit sphere together with
    /// the ingredients of its proof, and the increase of `ρ²`.
    ///
    /// `inner` and `outer` are point counts; the inner grid is uniform on
    /// `(0, 1)` and the outer grid on `[1 + INTERFACE_GAP, r_max]`.
    pub fn partial_monotonicity_scan(&self, inner: usize, outer: usize, r_max: f64) -> Vec<VerificationReport> {
        assert!(r_max >= 3.0, "outer grid must reach r_max ≥ 3");
        assert!(inner >= 2 && outer >= 2);
        let d = self.d();
        let tau = self.tau();
        let tag = |r: f64| format!("tau={tau};r={r:.6e}");

        let inner_grid: Vec<f64> = (1..=inner).map(|k| k as f64 / (inner + 1) as f64).collect();
        let lo = 1.0 + INTERFACE_GAP;
        let outer_grid: Vec<f64> = (0..outer)
            .map(|k| lo + (r_max - lo) * k as f64 / (outer - 1) as f64)
            .collect();
        let jets = |grid: &[f64]| -> Vec<Jet> { grid.par_iter().map(|&r| self.jet(r)).collect() };
        let jin = jets(&inner_grid);
        let jout = jets(&outer_grid);
        let grid_desc = format!("{inner} inner on (0;1) + {outer} outer on [1+1e-9;{r_max}]");

        let n = |j: &Jet| numerator_from_jet(j, d, tau);
        let h = |j: &Jet| 3.0 * j.defect * j.defect + tau * j.over_r * j.over_r;

        let mut reports = Vec::new();

        // min inside N > max outside N
        let (r_in, n_in) = argmin(jin.iter().map(|j| (j.r, n(j))));
        let (r_out, n_out) = argmax(jout.iter().map(|j| (j.r, n(j))));
        let scale = self.numerator_integrand(1.0);
        let mut b = VerificationReport::builder("monnum", Check::Positive, SCAN_TOL)
            .dim(d)
            .grid(grid_desc.clone());
        b.observe((n_in - n_out) / scale, || format!("tau={tau};r_in={r_in:.6e};r_out={r_out:.6e}"));
        reports.push(b.finish());

        // ρ''² > 0 inside (via ρ'' < 0 normalized), ρ'' = 0 outside
        let c2 = (6.0 * self.series[1]).abs();
        let mut b = VerificationReport::builder("monnum.hessian_inside", Check::Positive, SCAN_TOL)
            .dim(d)
            .grid(grid_desc.clone());
        for j in &jin {
            b.observe(j.d2 * j.d2 / (c2 * j.r * (1.0 - j.r)).powi(2), || tag(j.r));
        }
        reports.push(b.finish());
        let mut b = VerificationReport::builder("monnum.hessian_outside", Check::Zero, 0.0)
            .dim(d)
            .grid(grid_desc.clone());
        for j in &jout {
            b.observe(j.d2 * j.d2, || tag(j.r));
        }
        reports.push(b.finish());

        // τρ'² and h non-increasing along the combined grid
        let all: Vec<&Jet> = jin.iter().chain(jout.iter()).collect();
        let mut grad = VerificationReport::builder("monnum.gradient", Check::NonNegative, SCAN_TOL)
            .dim(d)
            .grid(grid_desc.clone());
        let mut hdec = VerificationReport::builder("monnum.h", Check::NonNegative, SCAN_TOL)
            .dim(d)
            .grid(grid_desc.clone());
        let g0 = tau * all[0].d1 * all[0].d1;
        let h0 = h(all[0]);
        for w in all.windows(2) {
            let (p, q) = (w[0], w[1]);
            grad.observe(tau * (p.d1 * p.d1 - q.d1 * q.d1) / g0, || tag(q.r));
            hdec.observe((h(p) - h(q)) / h0, || tag(q.r));
        }
        reports.push(grad.finish());
        reports.push(hdec.finish());

        // quantinterest > 0 on (0, 1], normalized by its linear onset
        let e = self.series;
        let qscale = 6.0 * e[1].abs() + tau * e[0];
        let mut b = VerificationReport::builder("quantinterest", Check::Positive, SCAN_TOL)
            .dim(d)
            .grid(format!("{} points on (0;1]", inner + 1));
        let q = |j: &Jet| 6.0 * j.defect + 3.0 * j.d2 + tau * j.rho;
        for j in jin.iter().chain(std::iter::once(&self.jet(1.0))) {
            b.observe(q(j) / (j.r * qscale), || tag(j.r));
        }
        reports.push(b.finish());

        // ρ² increasing: max inside < min outside, and pointwise along the grid
        let (r_a, max_in) = argmax(jin.iter().map(|j| (j.r, j.rho * j.rho)));
        let (r_b, min_out) = argmin(jout.iter().map(|j| (j.r, j.rho * j.rho)));
        let mut b = VerificationReport::builder("mondenom", Check::Positive, SCAN_TOL)
            .dim(d)
            .grid(grid_desc.clone());
        b.observe((min_out - max_in) / (self.r1 * self.r1), || {
            format!("tau={tau};r_in={r_a:.6e};r_out={r_b:.6e}")
        });
        for j in &all {
            // ρ' > 0 gives the pointwise increase
            b.observe(j.d1 / j.over_r, || tag(j.r));
        }
        reports.push(b.finish());

        reports
    }
}

fn numerator_from_jet(j: &Jet, d: u32, tau: f64) -> f64 {
    let dm1 = d as f64 - 1.0;
    j.d2 * j.d2 + 3.0 * dm1 * j.defect * j.defect + tau * j.d1 * j.d1 + tau * dm1 * j.over_r * j.over_r
}

fn argmin(it: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    it.fold((f64::NAN, f64::INFINITY), |acc, (r, v)| if v < acc.1 { (r, v) } else { acc })
}

fn argmax(it: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    it.fold((f64::NAN, f64::NEG_INFINITY), |acc, (r, v)| if v > acc.1 { (r, v) } else { acc })
}
