//! The polynomials `P(x, d)` and `Q(x)` behind the small-tension case.
//!
//! `P(x, d)` is a cubic in `x` whose nonnegativity on `[0, 3(d+2)/(d+5)]`
//! gives `γ ≥ γ*` for `d ≥ 3`. `Q(x)` is the sharper quartic used for `d = 2`,
//! built from `A = ainf(2)²`.

use crate::report::{Check, VerificationReport};
use crate::specfun::{first_zero_j1prime, SpecFunError};

use super::DEFAULT_TOL;

/// Integer coefficients of `P(x, d)` in powers of `x`.
pub fn p_coefficients_exact(d: i64) -> [i64; 4] {
    [
        24 * d.pow(4) + 60 * d.pow(3) - 120 * d * d - 432 * d,
        -40 * d.pow(3) - 119 * d * d - 6 * d + 432,
        43 * d * d + 113 * d + 54,
        -15 * d - 30,
    ]
}

pub fn p_coefficients(d: f64) -> [f64; 4] {
    let d2 = d * d;
    let d3 = d2 * d;
    [
        24.0 * d2 * d2 + 60.0 * d3 - 120.0 * d2 - 432.0 * d,
        -40.0 * d3 - 119.0 * d2 - 6.0 * d + 432.0,
        43.0 * d2 + 113.0 * d + 54.0,
        -15.0 * d - 30.0,
    ]
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// `P(x, d)` by Horner's rule in `x`.
pub fn poly_p(x: f64, d: f64) -> f64 {
    horner(&p_coefficients(d), x)
}

/// `P(x, d)` in exact integer arithmetic.
pub fn poly_p_exact(x: i64, d: i64) -> i64 {
    p_coefficients_exact(d).iter().rev().fold(0, |acc, &c| acc * x + c)
}

/// The product-form polynomial before division by `x`:
/// `(2d-3x)(d-x)(6(d+4)-5x)(3+x)(d+2) - 2d(6d(d+4)-24x)(3(d+2)-x(d+5))`.
pub fn p_undivided_exact(x: i64, d: i64) -> i64 {
    (2 * d - 3 * x) * (d - x) * (6 * (d + 4) - 5 * x) * (3 + x) * (d + 2)
        - 2 * d * (6 * d * (d + 4) - 24 * x) * (3 * (d + 2) - x * (d + 5))
}

/// Lower bound `g(d) = 24d⁴ - 60d³ - 477d² - 855d - 810` of `P` on `x ∈ [0, 3]`.
pub fn g_bound(d: i64) -> i64 {
    24 * d.pow(4) - 60 * d.pow(3) - 477 * d * d - 855 * d - 810
}

/// `g'(d)`.
pub fn g_bound_prime(d: i64) -> i64 {
    96 * d.pow(3) - 180 * d * d - 954 * d - 855
}

/// Right end `3(d+2)/(d+5)` of the interval where `P ≥ 0` is needed.
pub fn p_interval_end(d: u32) -> f64 {
    3.0 * (d as f64 + 2.0) / (d as f64 + 5.0)
}

/// Real roots of `c0 + c1 x + c2 x²`, ascending, by the stable quadratic formula.
pub fn quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    if c2 == 0.0 {
        return if c1 == 0.0 { vec![] } else { vec![-c0 / c1] };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (c1 + disc.sqrt().copysign(c1));
    let mut roots = if q == 0.0 { vec![0.0, 0.0] } else { vec![q / c2, c0 / q] };
    roots.sort_by(f64::total_cmp);
    roots
}

/// Critical points of `x ↦ P(x, d)` (roots of the quadratic `∂P/∂x`).
pub fn p_critical_points(d: u32) -> Vec<f64> {
    let c = p_coefficients(d as f64);
    quadratic_roots(c[1], 2.0 * c[2], 3.0 * c[3])
}

/// Interior critical point of `P_3` on `[0, 15/8]` and its value.
pub fn p3_critical_value() -> (f64, f64) {
    let end = p_interval_end(3);
    let c = p_critical_points(3)
        .into_iter()
        .find(|&x| x > 0.0 && x < end)
        .expect("P_3 has an interior critical point");
    (c, poly_p(c, 3.0))
}

/// `min P(x, d) ≥ 0` on the closed interval `[0, 3(d+2)/(d+5)]`, checked on a
/// uniform grid plus the exact interior critical points. Margins are divided
/// by `Σ |c_k| X^k`, the natural size of `P` on the interval.
pub fn verify_p_nonneg(d: u32, grid_size: usize) -> VerificationReport {
    assert!((3..=100).contains(&d), "poly1 covers 3 ≤ d ≤ 100");
    assert!(grid_size >= 2);
    let end = p_interval_end(d);
    let c = p_coefficients(d as f64);
    let scale: f64 = c.iter().enumerate().map(|(k, ck)| ck.abs() * end.powi(k as i32)).sum();
    let mut b = VerificationReport::builder("poly1", Check::NonNegative, DEFAULT_TOL)
        .dim(d)
        .grid(format!("{grid_size} points on [0;{end:.6}] + critical points"));
    for k in 0..grid_size {
        let x = end * k as f64 / (grid_size - 1) as f64;
        b.observe(horner(&c, x) / scale, || format!("x={x:.6e}"));
    }
    for x in p_critical_points(d) {
        if (0.0..=end).contains(&x) {
            b.observe(horner(&c, x) / scale, || format!("x={x:.6e}(critical)"));
        }
    }
    b.finish()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `A = ainf(2)²`.
pub fn q_parameter() -> Result<f64, SpecFunError> {
    Ok(first_zero_j1prime(2)?.powi(2))
}

/// `Q(x)` evaluated exactly as the product form is written.
pub fn poly_q(x: f64) -> Result<f64, SpecFunError> {
    let a = q_parameter()?;
    Ok((1.0 - 3.0 * x / (2.0 * a)) * (a - x) * (36.0 - 5.0 * x) * (12.0 + 4.0 * x)
        - (36.0 * a + (6.0 * a - 36.0) * x) * (12.0 - 7.0 * x))
}

/// Coefficients of `Q` in powers of `x` (`Q(0) = 0` up to rounding).
pub fn q_coefficients() -> Result<[f64; 5], SpecFunError> {
    let a = q_parameter()?;
    let first = poly_mul(
        &poly_mul(&[1.0, -3.0 / (2.0 * a)], &[a, -1.0]),
        &poly_mul(&[36.0, -5.0], &[12.0, 4.0]),
    );
    let second = poly_mul(&[36.0 * a, 6.0 * a - 36.0], &[12.0, -7.0]);
    let mut out = [0.0; 5];
    for (k, v) in first.iter().enumerate() {
        out[k] += v;
    }
    for (k, v) in second.iter().enumerate() {
        out[k] -= v;
    }
    Ok(out)
}

/// `g(x) = Q(x)/x` as a cubic.
pub fn q_over_x(x: f64) -> Result<f64, SpecFunError> {
    let c = q_coefficients()?;
    Ok(horner(&c[1..], x))
}

/// Interior critical point of `Q(x)/x` on `[0, 12/7]` and its value.
pub fn q_critical_value() -> Result<(f64, f64), SpecFunError> {
    let c = q_coefficients()?;
    let g = &c[1..];
    let x = quadratic_roots(g[1], 2.0 * g[2], 3.0 * g[3])
        .into_iter()
        .find(|&x| x > 0.0 && x < 12.0 / 7.0)
        .expect("Q/x has an interior critical point");
    Ok((x, horner(g, x)))
}

/// `Q(x)/x > 0` on `[0, 12/7]`, margins divided by `g(0) = Q'(0)`.
pub fn verify_q_positive(grid_size: usize) -> Result<VerificationReport, SpecFunError> {
    assert!(grid_size >= 2);
    let c = q_coefficients()?;
    let g = &c[1..];
    let end = 12.0 / 7.0;
    let mut b = VerificationReport::builder("poly2", Check::Positive, DEFAULT_TOL)
        .dim(2)
        .grid(format!("{grid_size} points on [0;12/7] + critical point"));
    for k in 0..grid_size {
        let x = end * k as f64 / (grid_size - 1) as f64;
        b.observe(horner(g, x) / g[0], || format!("x={x:.6e}"));
    }
    let (xc, gc) = q_critical_value()?;
    b.observe(gc / g[0], || format!("x={xc:.6e}(critical)"));
    Ok(b.finish())
}

/// `(1 - x)^(3/2) > 1 - 3x/2` on the open interval `(0, 1)`, margins divided
/// by the leading term `3x²/8`.
pub fn verify_binomial(grid_size: usize) -> VerificationReport {
    let mut b = VerificationReport::builder("binomial32", Check::Positive, DEFAULT_TOL)
        .grid(format!("{grid_size} interior points on (0;1)"));
    for k in 1..=grid_size {
        let x = k as f64 / (grid_size + 1) as f64;
        // (1-x)^{3/2} - 1 + 3x/2 without cancellation for small x
        let diff = if x < 1e-3 {
            0.375 * x * x + 0.0625 * x.powi(3) + 0.0234375 * x.powi(4)
        } else {
            (1.0 - x).powf(1.5) - 1.0 + 1.5 * x
        };
        b.observe(diff / (0.375 * x * x), || format!("x={x:.6e}"));
    }
    b.finish()
}
