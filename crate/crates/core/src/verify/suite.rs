//! Every grid check for a list of dimensions, aggregated into one sorted table.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::ball::BallError;
use crate::report::{worst_of, Check, VerificationReport};
use crate::trial::{self, TrialProfile};

use super::{bessel, poly, regime, DEFAULT_TOL};

/// Grid sizes and tensions used by [`run_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    /// Tensions at which the trial-profile scans run.
    pub taus: Vec<f64>,
    pub bessel_grid: usize,
    pub concavity_grid: usize,
    pub inner: usize,
    pub outer: usize,
    pub r_max: f64,
    pub poly_grid: usize,
    pub chain_samples: usize,
    /// Dimensions for the `P(x, d)` check, independent of the main list.
    pub poly1_dims: std::ops::RangeInclusive<u32>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            taus: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            bessel_grid: bessel::DEFAULT_GRID,
            concavity_grid: trial::DEFAULT_INNER,
            inner: trial::DEFAULT_INNER,
            outer: trial::DEFAULT_OUTER,
            r_max: trial::DEFAULT_R_MAX,
            poly_grid: 10_001,
            chain_samples: regime::DEFAULT_SAMPLES,
            poly1_dims: 3..=30,
        }
    }
}

/// Checks that depend on the dimension.
pub fn run_dimension(d: u32, opts: &SuiteOptions) -> Result<Vec<VerificationReport>, BallError> {
    let mut out = bessel::verify_bessel_signs(d, opts.bessel_grid)?;
    out.extend(bessel::verify_ij_bounds(d, opts.bessel_grid)?);

    let per_tau: Result<Vec<Vec<VerificationReport>>, BallError> = opts
        .taus
        .par_iter()
        .map(|&tau| {
            let p = TrialProfile::for_tension(tau, d)?;
            let mut v = p.concavity_scan(opts.concavity_grid);
            v.extend(p.partial_monotonicity_scan(opts.inner, opts.outer, opts.r_max));
            Ok(v)
        })
        .collect();
    let mut by_id: BTreeMap<String, Vec<VerificationReport>> = BTreeMap::new();
    for r in per_tau?.into_iter().flatten() {
        by_id.entry(r.lemma_id.clone()).or_default().push(r);
    }
    out.extend(by_id.into_values().filter_map(worst_of));

    let small = regime::small_tau_grid(d, opts.chain_samples);
    let large = regime::large_tau_grid(d, opts.chain_samples);
    out.extend(regime::verify_gamma_chain(&small, d)?);
    out.push(regime::verify_large_tau(&large, d)?);
    let both: Vec<f64> = small.iter().chain(&large).copied().collect();
    out.push(regime::verify_b_bounds(&both, d)?);
    Ok(out)
}

/// Checks that do not depend on the dimension list: the polynomial lemmas,
/// their spot values and the binomial estimate.
pub fn run_global(opts: &SuiteOptions) -> Result<Vec<VerificationReport>, BallError> {
    let mut out: Vec<VerificationReport> = opts
        .poly1_dims
        .clone()
        .into_par_iter()
        .map(|d| poly::verify_p_nonneg(d, opts.poly_grid))
        .collect();

    let mut g7 = VerificationReport::builder("poly1.g7", Check::Zero, 0.0).grid("exact integer");
    g7.observe((poly::g_bound(7) - 6876) as f64, || format!("g(7)={}", poly::g_bound(7)));
    out.push(g7.finish());
    let mut g5 = VerificationReport::builder("poly1.gprime5", Check::Zero, 0.0).grid("exact integer");
    g5.observe((poly::g_bound_prime(5) - 1875) as f64, || {
        format!("g'(5)={}", poly::g_bound_prime(5))
    });
    out.push(g5.finish());

    let (c, v) = poly::p3_critical_value();
    let mut p3 = VerificationReport::builder("poly1.p3critical", Check::Positive, DEFAULT_TOL)
        .dim(3)
        .grid("closed-form critical point");
    p3.observe(v, || format!("x={c:.6e};value={v:.6e}"));
    out.push(p3.finish());

    out.push(poly::verify_q_positive(opts.poly_grid)?);
    let (c, v) = poly::q_critical_value()?;
    let mut q = VerificationReport::builder("poly2.critical", Check::Positive, DEFAULT_TOL)
        .dim(2)
        .grid("closed-form critical point");
    q.observe(v, || format!("x={c:.6e};value={v:.6e}"));
    out.push(q.finish());

    out.push(poly::verify_binomial(opts.poly_grid));
    Ok(out)
}

/// The full table for `dims`, sorted by lemma id and then dimension.
pub fn run_suite(dims: &[u32], opts: &SuiteOptions) -> Result<Vec<VerificationReport>, BallError> {
    let per_dim: Result<Vec<Vec<VerificationReport>>, BallError> =
        dims.par_iter().map(|&d| run_dimension(d, opts)).collect();
    let mut out: Vec<VerificationReport> = per_dim?.into_iter().flatten().collect();
    out.extend(run_global(opts)?);
    out.sort_by(|x, y| x.lemma_id.cmp(&y.lemma_id).then(x.d.cmp(&y.d)));
    out.dedup_by(|x, y| x.lemma_id == y.lemma_id && x.d == y.d);
    Ok(out)
}
