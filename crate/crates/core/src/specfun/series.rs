//! Ascending power series of the ultraspherical Bessel functions.
//!
//! With `s = (d-2)/2`,
//!
//! ```text
//! j_l(z) = sum_m (-1)^m z^(2m+l) / (2^(2m+s+l) m! Γ(m+s+l+1))
//! i_l(z) = sum_m        z^(2m+l) / (2^(2m+s+l) m! Γ(m+s+l+1))
//! ```
//!
//! so both are plain power series in `z` and vanish to order `l` at the origin.

use super::Kind;

const MAX_TERMS: usize = 60;

/// `Γ(twice / 2)` for a positive integer `twice`, exact up to rounding.
pub(crate) fn gamma_half_integer(twice: u32) -> f64 {
    debug_assert!(twice >= 1);
    let (mut x, mut g) = if twice % 2 == 0 {
        (1.0, 1.0)
    } else {
        (0.5, std::f64::consts::PI.sqrt())
    };
    let target = twice as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Leading coefficient `c_0 = 2^-(s+l) / Γ(s+l+1)`.
pub(crate) fn leading_coefficient(l: u32, d: u32) -> f64 {
    let twice_nu = d - 2 + 2 * l;
    2f64.powf(-(twice_nu as f64) / 2.0) / gamma_half_integer(twice_nu + 2)
}

/// Coefficients `c_m` of `z^(2m+l)`, `m = 0..count`.
pub(crate) fn coefficients(kind: Kind, l: u32, d: u32, count: usize) -> Vec<f64> {
    let nu = (d as f64 - 2.0) / 2.0 + l as f64;
    let sign = kind.sign();
    let mut out = Vec::with_capacity(count);
    let mut c = leading_coefficient(l, d);
    for m in 0..count {
        if m > 0 {
            let mf = m as f64;
            c *= sign / (4.0 * mf * (mf + nu));
        }
        out.push(c);
    }
    out
}

fn falling_factorial(p: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (p as f64 - i as f64))
}

/// All derivatives `0..=max_deriv` of `j_l` / `i_l` at `z` by termwise
/// differentiation. Intended for small `z`; accurate anywhere the series does
/// not cancel badly.
pub(crate) fn derivatives(kind: Kind, l: u32, d: u32, z: f64, max_deriv: usize) -> [f64; 5] {
    let nu = (d as f64 - 2.0) / 2.0 + l as f64;
    let sign = kind.sign();
    let mut out = [0.0; 5];
    let mut c = leading_coefficient(l, d);
    for m in 0..MAX_TERMS {
        if m > 0 {
            let mf = m as f64;
            c *= sign / (4.0 * mf * (mf + nu));
        }
        let p = 2 * m as u32 + l;
        let mut largest = 0.0f64;
        for (k, slot) in out.iter_mut().enumerate().take(max_deriv + 1) {
            let k = k as u32;
            if p < k {
                continue;
            }
            let term = c * falling_factorial(p, k) * z.powi((p - k) as i32);
            *slot += term;
            largest = largest.max(term.abs());
        }
        let total = out[..=max_deriv].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if m >= 3 && largest <= 1e-18 * total {
            break;
        }
        if m >= 3 && total == 0.0 {
            break;
        }
    }
    out
}

/// Leading behaviour `coef * z^power` of the `deriv`-th derivative at the origin.
pub(crate) fn leading_term(kind: Kind, l: u32, d: u32, deriv: u32) -> (f64, i32) {
    let coeffs = coefficients(kind, l, d, 8);
    for (m, c) in coeffs.iter().enumerate() {
        let p = 2 * m as u32 + l;
        if p >= deriv {
            let f = falling_factorial(p, deriv);
            if f != 0.0 {
                return (c * f, (p - deriv) as i32);
            }
        }
    }
    (0.0, 0)
}
