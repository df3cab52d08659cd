//! Grid checks of the Bessel bounds and sign facts on `(0, ainf]`.
//!
//! Margins are divided by the leading power `c z^p` of the checked quantity
//! at the origin, so they stay O(1) down to `z → 0` instead of vanishing.

use rayon::prelude::*;

use crate::report::{Check, VerificationReport};
use crate::specfun::{self, first_zero_j1prime, leading_term, series_coeff_dk, Kind, SpecFunError, SERIES_SWITCH};

use super::DEFAULT_TOL;

/// Default number of grid points per item.
pub const DEFAULT_GRID: usize = 10_000;

/// Sum of `sign_k d_k z^(2k-1)` over `k ≥ from`, with `sign_k = (-1)^k` for
/// `j_1''` and `+1` for `i_1''`.
fn second_derivative_tail(kind: Kind, d: u32, z: f64, from: u32) -> f64 {
    let mut sum = 0.0;
    for k in from..from + 30 {
        let sign = match kind {
            Kind::J if k % 2 == 1 => -1.0,
            _ => 1.0,
        };
        let term = sign * series_coeff_dk(k, d) * z.powi(2 * k as i32 - 1);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `-d_1 z + d_2 z³ - j_1''(z)` and `d_1 z + (6/5) d_2 z³ - i_1''(z)`.
pub fn ij_bound_gaps(d: u32, z: f64) -> Result<(f64, f64), SpecFunError> {
    let d1 = series_coeff_dk(1, d);
    let d2 = series_coeff_dk(2, d);
    if z <= SERIES_SWITCH {
        // Both gaps are series tails; summing them directly avoids cancelling
        // the O(z) leading terms.
        let j_gap = -second_derivative_tail(Kind::J, d, z, 3);
        let i_gap = 0.2 * d2 * z.powi(3) - second_derivative_tail(Kind::I, d, z, 3);
        return Ok((j_gap, i_gap));
    }
    let j2 = specfun::derivatives(Kind::J, 1, d, z, 2)?[2];
    let i2 = specfun::derivatives(Kind::I, 1, d, z, 2)?[2];
    Ok((-d1 * z + d2 * z.powi(3) - j2, d1 * z + 1.2 * d2 * z.powi(3) - i2))
}

/// The Taylor bounds on `j_1''` over `[0, sqrt(3(d+2)/(d+5))]` and on `i_1''`
/// over `[0, sqrt(3)]`. Grids include `z = 0`, where both gaps vanish.
pub fn verify_ij_bounds(d: u32, grid_size: usize) -> Result<Vec<VerificationReport>, SpecFunError> {
    assert!(grid_size >= 2);
    let d2 = series_coeff_dk(2, d);
    let d3 = series_coeff_dk(3, d);
    let z_j = (3.0 * (d as f64 + 2.0) / (d as f64 + 5.0)).sqrt();
    let z_i = 3f64.sqrt();

    let run = |id: &str, end: f64, pick: fn((f64, f64)) -> f64, lead: &dyn Fn(f64) -> f64| {
        let pts: Vec<f64> = (0..grid_size).map(|k| end * k as f64 / (grid_size - 1) as f64).collect();
        let gaps: Result<Vec<f64>, SpecFunError> =
            pts.par_iter().map(|&z| ij_bound_gaps(d, z).map(pick)).collect();
        let gaps = gaps?;
        let mut b = VerificationReport::builder(id, Check::NonNegative, DEFAULT_TOL)
            .dim(d)
            .grid(format!("{grid_size} points on [0;{end:.6}]"));
        for (&z, &g) in pts.iter().zip(&gaps) {
            let m = if z == 0.0 { g } else { g / lead(z) };
            b.observe(m, || format!("z={z:.6e}"));
        }
        Ok::<_, SpecFunError>(b.finish())
    };
    // Leading gap terms: d_3 z⁵ for j, (d_2/5) z³ for i.
    let j = run("ijbounds.j", z_j, |g| g.0, &|z| d3 * z.powi(5))?;
    let i = run("ijbounds.i", z_i, |g| g.1, &|z| 0.2 * d2 * z.powi(3))?;
    Ok(vec![j, i])
}

struct SignItem {
    id: &'static str,
    l: u32,
    deriv: u32,
    /// `+1` if the quantity must be positive, `-1` if negative.
    sign: f64,
    /// Include `z = ainf`.
    closed: bool,
    /// Extra factor `1 - z/ainf` in the normalization for quantities that
    /// vanish at `ainf`.
    vanishes_at_end: bool,
}

const SIGN_ITEMS: [SignItem; 5] = [
    // item 1 covers l = 1..=5; `l` here is the first order
    SignItem { id: "besselsigns.1", l: 1, deriv: 0, sign: 1.0, closed: true, vanishes_at_end: false },
    SignItem { id: "besselsigns.2", l: 1, deriv: 1, sign: 1.0, closed: false, vanishes_at_end: true },
    SignItem { id: "besselsigns.3", l: 2, deriv: 1, sign: 1.0, closed: true, vanishes_at_end: false },
    SignItem { id: "besselsigns.4", l: 1, deriv: 2, sign: -1.0, closed: true, vanishes_at_end: false },
    SignItem { id: "besselsigns.5", l: 1, deriv: 4, sign: 1.0, closed: true, vanishes_at_end: false },
];

/// The five sign facts on `(0, ainf]`:
/// 1. `j_l > 0` for `l = 1..5`; 2. `j_1' > 0` on the open interval;
/// 3. `j_2' > 0`; 4. `j_1'' < 0`; 5. `j_1'''' > 0`.
pub fn verify_bessel_signs(d: u32, grid_size: usize) -> Result<Vec<VerificationReport>, SpecFunError> {
    assert!(grid_size >= 2);
    let ainf = first_zero_j1prime(d)?;
    let mut out = Vec::with_capacity(SIGN_ITEMS.len());
    for item in &SIGN_ITEMS {
        let count = if item.closed { grid_size } else { grid_size - 1 };
        let pts: Vec<f64> = (1..=count).map(|k| ainf * k as f64 / grid_size as f64).collect();
        let orders: Vec<u32> = if item.id == "besselsigns.1" { (1..=5).collect() } else { vec![item.l] };
        let interval = if item.closed { "(0;ainf]" } else { "(0;ainf)" };
        let mut b = VerificationReport::builder(item.id, Check::Positive, DEFAULT_TOL)
            .dim(d)
            .grid(format!("{count} points on {interval} ainf={ainf:.12}"));
        for &l in &orders {
            let (c, p) = leading_term(Kind::J, l, d, item.deriv);
            let margins: Result<Vec<f64>, SpecFunError> = pts
                .par_iter()
                .map(|&z| {
                    let v = specfun::derivatives(Kind::J, l, d, z, item.deriv as usize)?[item.deriv as usize];
                    let mut lead = (c * z.powi(p)).abs();
                    if item.vanishes_at_end {
                        lead *= 1.0 - z / ainf;
                    }
                    Ok(item.sign * v / lead)
                })
                .collect();
            for (&z, m) in pts.iter().zip(margins?) {
                b.observe(m, || format!("l={l};z={z:.6e}"));
            }
        }
        out.push(b.finish());
    }
    Ok(out)
}
