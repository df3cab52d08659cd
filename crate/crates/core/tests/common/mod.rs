//! Oracles shared by the integration tests. None of them call the Bessel
//! kernel or the secular equation.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w));
    }
    out
}

/// `(T_k, T_k', T_k'')` at `t` for `k < n`.
fn chebyshev(n: usize, t: f64) -> Vec<(f64, f64, f64)> {
    let mut v = vec![(1.0, 0.0, 0.0), (t, 1.0, 0.0)];
    for k in 2..n {
        let (a, da, dda) = v[k - 1];
        let (b, db, ddb) = v[k - 2];
        v.push((2.0 * t * a - b, 2.0 * a + 2.0 * t * da - db, 4.0 * da + 2.0 * t * dda - ddb));
    }
    v.truncate(n);
    v
}

/// Smallest Rayleigh–Ritz value of the plate quotient restricted to
/// `u = R(r) x_1/r` on the unit ball, with `R ∈ span{r T_k(2r-1)}`.
///
/// The quotient uses the Cartesian sums `|D²u|² → R''² + 3(d-1)(R-rR')²/r⁴`
/// and `|Du|² → R'² + (d-1)R²/r²`.
pub fn ritz_tone(tau: f64, d: u32, basis: usize) -> f64 {
    let nodes = gauss_legendre(basis + 40, 0.0, 1.0);
    let df = d as f64;
    let mut a = DMatrix::<f64>::zeros(basis, basis);
    let mut b = DMatrix::<f64>::zeros(basis, basis);
    for &(r, w) in &nodes {
        let t = 2.0 * r - 1.0;
        let ch = chebyshev(basis, t);
        // φ = r T, φ' = T + 2r T', φ'' = 4T' + 4r T'', (φ - rφ')/r² = -2T', φ/r = T
        let f: Vec<[f64; 5]> = ch
            .iter()
            .map(|&(tk, dt, ddt)| [r * tk, tk + 2.0 * r * dt, 4.0 * dt + 4.0 * r * ddt, -2.0 * dt, tk])
            .collect();
        let wr = w * r.powi(d as i32 - 1);
        for i in 0..basis {
            for j in 0..=i {
                let (p, q) = (f[i], f[j]);
                let stiff = p[2] * q[2] + 3.0 * (df - 1.0) * p[3] * q[3] + tau * (p[1] * q[1] + (df - 1.0) * p[4] * q[4]);
                a[(i, j)] += wr * stiff;
                b[(i, j)] += wr * p[0] * q[0];
            }
        }
    }
    for i in 0..basis {
        for j in 0..i {
            a[(j, i)] = a[(i, j)];
            b[(j, i)] = b[(i, j)];
        }
    }
    // Canonical orthogonalization: the monomial-like basis makes B nearly
    // singular, so directions with tiny mass are dropped instead of inverted.
    let eb = SymmetricEigen::new(b);
    let top = eb.eigenvalues.max();
    let keep: Vec<usize> = (0..basis).filter(|&k| eb.eigenvalues[k] > 1e-14 * top).collect();
    let mut x = DMatrix::<f64>::zeros(basis, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let s = eb.eigenvalues[k].sqrt();
        for r in 0..basis {
            x[(r, c)] = eb.eigenvectors[(r, k)] / s;
        }
    }
    let c = x.transpose() * a * &x;
    let c = 0.5 * (&c + c.transpose());
    let ec = SymmetricEigen::new(c);
    let k0 = ec.eigenvalues.imin();
    let coef = &x * ec.eigenvectors.column(k0);
    // A carries entries of size k^8, so the matrix eigenvalue is only good to
    // eps |A|; the quotient of the recovered function is far more accurate.
    let (mut num, mut den) = (0.0, 0.0);
    for &(r, w) in &nodes {
        let ch = chebyshev(basis, 2.0 * r - 1.0);
        let mut g = [0.0; 5];
        for (k, &(tk, dt, ddt)) in ch.iter().enumerate() {
            let f = [r * tk, tk + 2.0 * r * dt, 4.0 * dt + 4.0 * r * ddt, -2.0 * dt, tk];
            for m in 0..5 {
                g[m] += coef[k] * f[m];
            }
        }
        let wr = w * r.powi(d as i32 - 1);
        num += wr * (g[2] * g[2] + 3.0 * (df - 1.0) * g[3] * g[3] + tau * (g[1] * g[1] + (df - 1.0) * g[4] * g[4]));
        den += wr * g[0] * g[0];
    }
    num / den
}

/// `J_n(z)` from Bessel's integral `(1/π)∫_0^π cos(nθ - z sin θ) dθ`.
pub fn bessel_j_integral(n: u32, z: f64) -> f64 {
    // periodic integrand: the trapezoid rule converges geometrically
    let m = 400;
    let h = PI / m as f64;
    let mut s = 0.0;
    for k in 0..=m {
        let th = k as f64 * h;
        let w = if k == 0 || k == m { 0.5 } else { 1.0 };
        s += w * (n as f64 * th - z * th.sin()).cos();
    }
    s * h / PI
}

/// `I_n(z) = (1/π)∫_0^π e^{z cos θ} cos(nθ) dθ`.
pub fn bessel_i_integral(n: u32, z: f64) -> f64 {
    let m = 400;
    let h = PI / m as f64;
    let mut s = 0.0;
    for k in 0..=m {
        let th = k as f64 * h;
        let w = if k == 0 || k == m { 0.5 } else { 1.0 };
        s += w * (z * th.cos()).exp() * (n as f64 * th).cos();
    }
    s * h / PI
}

/// `Γ(x)` for `x = k/2`, `k ≥ 1`, by the recursion from `Γ(1/2)`, `Γ(1)`.
pub fn gamma_half(k: u32) -> f64 {
    let mut g = if k % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if k % 2 == 0 { 1.0 } else { 0.5 };
    while x < k as f64 / 2.0 - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// `j_l` (or `i_l` with `modified`) from its power series, summed until the
/// terms stop mattering:
/// `z^{-s} J_{s+l}(z) = Σ (∓1)^m (z/2)^{2m+l+s} z^{-s} / (m! Γ(m+l+s+1))`.
pub fn ultra_series(l: u32, d: u32, z: f64, modified: bool) -> f64 {
    let twice_nu = d - 2 + 2 * l;
    let s = (d as f64 - 2.0) / 2.0;
    let mut term = (z / 2.0).powi(l as i32) * 0.5f64.powf(s) / gamma_half(twice_nu + 2);
    let mut sum = term;
    for m in 1..200 {
        let nu_m = (twice_nu as f64) / 2.0 + m as f64;
        term *= (z * z / 4.0) / (m as f64 * nu_m);
        if !modified {
            term = -term;
        }
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}
