//! Tension-regime inequalities evaluated on solved ball modes.
//!
//! Small tension, `0 < τ ≤ 9/(d+5)`: `γ ≥ γ*(a)` together with the bounds
//! `a² < 3(d+2)/(d+5)` and `b² ≤ 3`. Large tension, `τ > 9/(d+5)`:
//! `τ - 3a²/(d+2) > 0`. Both regimes: `b² > (d+2)a²/(d+2-a²)` and, when
//! `a² < d`, `b² < da²/(d-a²)`.

use rayon::prelude::*;

use crate::ball::{fundamental_tone, BallError, BallMode};
use crate::report::{Check, VerificationReport};

use super::DEFAULT_TOL;

/// Smallest tension sampled in the small-tension regime.
pub const SMALL_TAU_MIN: f64 = 1e-3;
/// Largest tension sampled in the large-tension regime.
pub const LARGE_TAU_MAX: f64 = 1e3;
/// Default samples per regime.
pub const DEFAULT_SAMPLES: usize = 64;

/// `γ* = (3(d+2) - a²(d+5)) / ((3+a²)(d+2))`.
pub fn gamma_star(a: f64, d: u32) -> f64 {
    let df = d as f64;
    let a2 = a * a;
    (3.0 * (df + 2.0) - a2 * (df + 5.0)) / ((3.0 + a2) * (df + 2.0))
}

/// Boundary `9/(d+5)` between the two regimes.
pub fn regime_split(d: u32) -> f64 {
    9.0 / (d as f64 + 5.0)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let (l0, l1) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n).map(|k| (l0 + (l1 - l0) * k as f64 / (n - 1) as f64).exp()).collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

/// Log-uniform grid on `[SMALL_TAU_MIN, 9/(d+5)]`.
pub fn small_tau_grid(d: u32, n: usize) -> Vec<f64> {
    log_grid(SMALL_TAU_MIN, regime_split(d), n)
}

/// Log-uniform grid on `(9/(d+5), LARGE_TAU_MAX]`, starting just above the split.
pub fn large_tau_grid(d: u32, n: usize) -> Vec<f64> {
    log_grid(regime_split(d) * (1.0 + 1e-6), LARGE_TAU_MAX, n)
}

fn solve_all(taus: &[f64], d: u32) -> Result<Vec<BallMode>, BallError> {
    taus.par_iter().map(|&t| fundamental_tone(t, d, 1.0)).collect()
}

fn tag(m: &BallMode) -> String {
    format!("tau={:.6e};a={:.6e};gamma={:.6e}", m.tau, m.a, m.gamma)
}

/// Small-tension chain on `taus ⊆ (0, 9/(d+5)]`.
///
/// Reports `gammastar` (`γ - γ*`, divided by `a²`), `smalltau`
/// (`τ - 3a²/(d+2) + γ(τ + 3b²/(d+2))`, divided by `a⁴`) and `regime.small`
/// (`3(d+2)/(d+5) - a²` and `3 - b²`, divided by 3).
pub fn verify_gamma_chain(taus: &[f64], d: u32) -> Result<Vec<VerificationReport>, BallError> {
    let split = regime_split(d);
    assert!(taus.iter().all(|&t| t > 0.0 && t <= split), "γ-chain tensions must lie in (0, 9/(d+5)]");
    let modes = solve_all(taus, d)?;
    let df = d as f64;
    let grid = format!(
        "{} tau log-spaced on [{:.1e};{:.6}]",
        taus.len(),
        taus.iter().cloned().fold(f64::INFINITY, f64::min),
        taus.iter().cloned().fold(0.0, f64::max)
    );

    let mut gs = VerificationReport::builder("gammastar", Check::Positive, DEFAULT_TOL)
        .dim(d)
        .grid(grid.clone());
    let mut st = VerificationReport::builder("smalltau", Check::Positive, DEFAULT_TOL)
        .dim(d)
        .grid(grid.clone());
    let mut rg = VerificationReport::builder("regime.small", Check::NonNegative, DEFAULT_TOL)
        .dim(d)
        .grid(grid);
    for m in &modes {
        let a2 = m.a * m.a;
        let b2 = m.b * m.b;
        gs.observe((m.gamma - gamma_star(m.a, d)) / a2, || tag(m));
        let cond = m.tau - 3.0 * a2 / (df + 2.0) + m.gamma * (m.tau + 3.0 * b2 / (df + 2.0));
        st.observe(cond / (a2 * a2), || tag(m));
        rg.observe((3.0 * (df + 2.0) / (df + 5.0) - a2) / 3.0, || format!("{};bound=a2", tag(m)));
        rg.observe((3.0 - b2) / 3.0, || format!("{};bound=b2", tag(m)));
    }
    Ok(vec![gs.finish(), st.finish(), rg.finish()])
}

/// `τ - 3a²/(d+2) > 0` for `taus` above `9/(d+5)`, divided by `τ`.
pub fn verify_large_tau(taus: &[f64], d: u32) -> Result<VerificationReport, BallError> {
    let split = regime_split(d);
    assert!(taus.iter().all(|&t| t > split), "large-tension check needs τ > 9/(d+5)");
    let modes = solve_all(taus, d)?;
    let mut b = VerificationReport::builder("largetau", Check::Positive, DEFAULT_TOL)
        .dim(d)
        .grid(format!("{} tau log-spaced on ({split:.6};{LARGE_TAU_MAX:.0e}]", taus.len()));
    for m in &modes {
        b.observe((m.tau - 3.0 * m.a * m.a / (d as f64 + 2.0)) / m.tau, || tag(m));
    }
    Ok(b.finish())
}

/// `da²/(d-a²) > b² > (d+2)a²/(d+2-a²)` over both regimes, margins divided
/// by `τ`. The upper bound is only required when `a² < d`.
pub fn verify_b_bounds(taus: &[f64], d: u32) -> Result<VerificationReport, BallError> {
    let modes = solve_all(taus, d)?;
    let df = d as f64;
    let mut b = VerificationReport::builder("bbounds", Check::Positive, DEFAULT_TOL)
        .dim(d)
        .grid(format!("{} tau log-spaced on [{SMALL_TAU_MIN:.0e};{LARGE_TAU_MAX:.0e}]", taus.len()));
    for m in &modes {
        let a2 = m.a * m.a;
        let b2 = m.b * m.b;
        b.observe((b2 - (df + 2.0) * a2 / (df + 2.0 - a2)) / m.tau, || format!("{};side=lower", tag(m)));
        if a2 < df {
            b.observe((df * a2 / (df - a2) - b2) / m.tau, || format!("{};side=upper", tag(m)));
        }
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_star_at_zero_is_one() {
        for d in 2..10 {
            assert!((gamma_star(0.0, d) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn disk_small_tension_examples() {
        let r = verify_gamma_chain(&[0.1, 0.5, 1.0], 2).unwrap();
        for rep in r {
            assert!(rep.passed, "{rep}");
        }
    }

    #[test]
    fn large_tension_example() {
        let r = verify_large_tau(&[2.0], 3).unwrap();
        assert!(r.passed, "{r}");
    }

    #[test]
    fn grids_respect_regimes() {
        let s = small_tau_grid(4, 64);
        assert_eq!(s.len(), 64);
        assert_eq!(s[63], 1.0);
        let l = large_tau_grid(4, 64);
        assert!(l[0] > 1.0);
        assert!((l[63] - LARGE_TAU_MAX).abs() < 1e-9);
    }
}
