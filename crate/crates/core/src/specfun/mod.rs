//! Ultraspherical Bessel functions of the first kind.
//!
//! For dimension `d ≥ 2` and `s = (d-2)/2`,
//!
//! ```text
//! j_l(z) = z^-s J_{s+l}(z),    i_l(z) = z^-s I_{s+l}(z).
//! ```
//!
//! They solve `z² w'' + (d-1) z w' ± (z² ∓ l(l+d-2)) w = 0` and obey
//!
//! ```text
//! j_l' = (l/z) j_l - j_{l+1},    i_l' = (l/z) i_l + i_{l+1}.
//! ```
//!
//! For `z ≤ SERIES_SWITCH` every derivative comes from the power series. Above
//! it, `j_l .. j_{l+4}` are produced in one Miller sweep and derivatives are
//! assembled exactly by repeated use of the first-derivative recurrence.

mod kernel;
mod series;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

pub use kernel::KERNEL_MAX_Z;
pub(crate) use series::gamma_half_integer;

use crate::roots::{self, Bracket};

/// Arguments at or below this use the power series.
pub const SERIES_SWITCH: f64 = 0.5;

/// Largest order accepted by the public evaluators.
pub const MAX_ORDER: u32 = 8;

/// Largest derivative order.
pub const MAX_DERIV: u32 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("derivative order {0} is outside 0..=4")]
    DerivativeOrder(u32),
    #[error("order l = {0} is outside 0..=8")]
    Order(u32),
    #[error("dimension d = {0} must be at least 2")]
    Dimension(u32),
    #[error("argument z = {0} must be finite and nonnegative")]
    Argument(f64),
    #[error("argument z = {0} is beyond the kernel range (max {max})", max = KERNEL_MAX_Z)]
    Overflow(f64),
    #[error("no sign change of j1' in (0, 20] for d = {0}")]
    NoZero(u32),
}

/// First or modified kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    J,
    I,
}

impl Kind {
    /// Sign in front of the `l+1` term of the derivative recurrence.
    pub(crate) fn sign(self) -> f64 {
        match self {
            Kind::J => -1.0,
            Kind::I => 1.0,
        }
    }
}

/// Order and dimension of an ultraspherical Bessel function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UltraBesselParams {
    pub l: u32,
    pub d: u32,
    pub s: f64,
}

impl UltraBesselParams {
    pub fn new(l: u32, d: u32) -> Result<Self, SpecFunError> {
        if d < 2 {
            return Err(SpecFunError::Dimension(d));
        }
        if l > MAX_ORDER {
            return Err(SpecFunError::Order(l));
        }
        Ok(Self {
            l,
            d,
            s: (d as f64 - 2.0) / 2.0,
        })
    }
}

/// Values of the function and its derivatives `0..=4` at one argument.
/// Entries beyond the requested order are zero.
pub type Derivatives = [f64; 5];

fn check(l: u32, d: u32, z: f64, deriv: u32) -> Result<(), SpecFunError> {
    UltraBesselParams::new(l, d)?;
    if deriv > MAX_DERIV {
        return Err(SpecFunError::DerivativeOrder(deriv));
    }
    if !z.is_finite() || z < 0.0 {
        return Err(SpecFunError::Argument(z));
    }
    Ok(())
}

/// `deriv`-th derivative of `j_l` at `z`.
pub fn ultra_j(l: u32, d: u32, z: f64, deriv: u32) -> Result<f64, SpecFunError> {
    check(l, d, z, deriv)?;
    Ok(derivatives(Kind::J, l, d, z, deriv as usize)?[deriv as usize])
}

/// `deriv`-th derivative of `i_l` at `z`.
pub fn ultra_i(l: u32, d: u32, z: f64, deriv: u32) -> Result<f64, SpecFunError> {
    check(l, d, z, deriv)?;
    Ok(derivatives(Kind::I, l, d, z, deriv as usize)?[deriv as usize])
}

/// All derivatives `0..=max_deriv` of `j_l` or `i_l` in one evaluation.
pub fn ultra_derivatives(
    kind: Kind,
    l: u32,
    d: u32,
    z: f64,
    max_deriv: u32,
) -> Result<Derivatives, SpecFunError> {
    check(l, d, z, max_deriv)?;
    derivatives(kind, l, d, z, max_deriv as usize)
}

/// Unchecked core shared by the crate; `l` may exceed [`MAX_ORDER`] by a few.
pub(crate) fn derivatives(
    kind: Kind,
    l: u32,
    d: u32,
    z: f64,
    max_deriv: usize,
) -> Result<Derivatives, SpecFunError> {
    if z <= SERIES_SWITCH {
        return Ok(series::derivatives(kind, l, d, z, max_deriv));
    }
    let s = (d as f64 - 2.0) / 2.0;
    let seq = kernel::sequence(kind, d - 2 + 2 * l, z, max_deriv + 1)?;
    let zs = z.powf(-s);
    let mut f = [0.0; 5];
    for (k, v) in f.iter_mut().enumerate().take(max_deriv + 1) {
        *v = zs * seq[k];
    }

    // D[z^-k f_m] = (m-k) z^-(k+1) f_m + σ z^-k f_{m+1}
    let sigma = kind.sign();
    let mut coef = [[0.0f64; 5]; 5];
    coef[0][0] = 1.0;
    let inv_z = 1.0 / z;
    let mut out = [0.0; 5];
    for (n, slot) in out.iter_mut().enumerate().take(max_deriv + 1) {
        if n > 0 {
            let mut next = [[0.0f64; 5]; 5];
            for k in 0..n {
                for j in 0..n {
                    let c = coef[k][j];
                    if c == 0.0 {
                        continue;
                    }
                    let m = (l as usize + j) as f64;
                    next[k + 1][j] += (m - k as f64) * c;
                    next[k][j + 1] += sigma * c;
                }
            }
            coef = next;
        }
        let mut acc = 0.0;
        for (k, row) in coef.iter().enumerate().take(n + 1) {
            let zk = inv_z.powi(k as i32);
            for (j, c) in row.iter().enumerate().take(n + 1) {
                if *c != 0.0 {
                    acc += c * zk * f[j];
                }
            }
        }
        *slot = acc;
    }
    Ok(out)
}

/// `j_l(z) / z` (or `i_l(z) / z`), finite at the origin.
pub(crate) fn over_z(kind: Kind, l: u32, d: u32, z: f64) -> Result<f64, SpecFunError> {
    if z == 0.0 {
        return Ok(if l == 1 {
            series::leading_coefficient(1, d)
        } else {
            0.0
        });
    }
    Ok(derivatives(kind, l, d, z, 0)?[0] / z)
}

/// Leading behaviour `(c, p)` with `f^(deriv)(z) ~ c z^p` as `z → 0`.
pub fn leading_term(kind: Kind, l: u32, d: u32, deriv: u32) -> (f64, i32) {
    series::leading_term(kind, l, d, deriv)
}

/// Power-series coefficients `c_m` of `z^(2m+l)`.
pub fn series_coefficients(kind: Kind, l: u32, d: u32, count: usize) -> Vec<f64> {
    series::coefficients(kind, l, d, count)
}

/// `d_k = (2k+1) / ((k-1)! Γ(k+1+d/2)) 2^(1-2k-d/2)`, the coefficients of
/// `i_1''(z) = Σ d_k z^(2k-1)` and, with alternating signs, of `j_1''`.
pub fn series_coeff_dk(k: u32, d: u32) -> f64 {
    assert!(k >= 1 && d >= 2, "series_coeff_dk needs k ≥ 1 and d ≥ 2");
    let factorial: f64 = (1..k).map(f64::from).product();
    let gamma = series::gamma_half_integer(2 * k + 2 + d);
    let power = 1.0 - 2.0 * k as f64 - d as f64 / 2.0;
    (2 * k + 1) as f64 / (factorial * gamma) * 2f64.powf(power)
}

const SCAN_STEP: f64 = 0.05;
const SCAN_END: f64 = 20.0;

fn ainf_cache() -> &'static Mutex<HashMap<u32, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Smallest `z > 0` with `j_1'(z) = 0`. Its square is the first nonzero
/// Neumann eigenvalue of the unit ball.
pub fn first_zero_j1prime(d: u32) -> Result<f64, SpecFunError> {
    if d < 2 {
        return Err(SpecFunError::Dimension(d));
    }
    if let Some(z) = ainf_cache().lock().unwrap().get(&d) {
        return Ok(*z);
    }
    let f = |z: f64| derivatives(Kind::J, 1, d, z, 1).map(|v| v[1]);
    let steps = (SCAN_END / SCAN_STEP).round() as usize;
    let grid = (1..=steps).map(|k| k as f64 * SCAN_STEP);
    let bracket: Bracket = roots::scan_sign_change(f, grid)?.ok_or(SpecFunError::NoZero(d))?;
    let z = roots::brent(f, bracket, 1e-13)?;
    ainf_cache().lock().unwrap().insert(d, z);
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert_eq!(ultra_j(1, 2, 1.0, 5), Err(SpecFunError::DerivativeOrder(5)));
        assert_eq!(ultra_j(9, 2, 1.0, 0), Err(SpecFunError::Order(9)));
        assert_eq!(ultra_i(1, 1, 1.0, 0), Err(SpecFunError::Dimension(1)));
        assert!(matches!(ultra_j(1, 2, -1.0, 0), Err(SpecFunError::Argument(_))));
        assert!(matches!(ultra_i(1, 2, 1000.0, 0), Err(SpecFunError::Overflow(_))));
    }

    #[test]
    fn second_derivative_vanishes_at_origin() {
        for d in 2..10 {
            assert_eq!(ultra_j(1, d, 0.0, 2).unwrap(), 0.0);
            assert_eq!(ultra_i(1, d, 0.0, 2).unwrap(), 0.0);
        }
    }

    #[test]
    fn dk_values() {
        assert!((series_coeff_dk(1, 2) - 0.375).abs() < 1e-15);
        assert!((series_coeff_dk(1, 4) - 0.0625).abs() < 1e-15);
        for d in 2..20 {
            let ratio = series_coeff_dk(2, d) / series_coeff_dk(1, d);
            assert!((ratio - 5.0 / (6.0 * (d as f64 + 4.0))).abs() < 1e-14);
        }
    }

    #[test]
    fn dk_matches_second_derivative_series() {
        for d in [2, 3, 6] {
            let z: f64 = 0.3;
            let i2: f64 = (1..30).map(|k| series_coeff_dk(k, d) * z.powi(2 * k as i32 - 1)).sum();
            let j2: f64 = (1..30)
                .map(|k| (-1f64).powi(k as i32) * series_coeff_dk(k, d) * z.powi(2 * k as i32 - 1))
                .sum();
            assert!((ultra_i(1, d, z, 2).unwrap() - i2).abs() < 1e-15);
            assert!((ultra_j(1, d, z, 2).unwrap() - j2).abs() < 1e-15);
        }
    }

    #[test]
    fn ainf_two_dimensions() {
        let z = first_zero_j1prime(2).unwrap();
        assert!((z - 1.84118).abs() < 1e-5);
        assert!(ultra_j(1, 2, z, 1).unwrap().abs() < 1e-14);
    }

    #[test]
    fn series_and_kernel_agree_at_switch() {
        for d in 2..8 {
            for l in 0..6 {
                let z = SERIES_SWITCH + 1e-12;
                let s = series::derivatives(Kind::J, l, d, z, 4);
                let k = derivatives(Kind::J, l, d, z, 4).unwrap();
                for n in 0..3 {
                    let scale = s[n].abs().max(1e-300);
                    assert!((s[n] - k[n]).abs() <= 1e-12 * scale, "d={d} l={l} n={n}");
                }
            }
        }
    }
}
