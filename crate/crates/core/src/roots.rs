//! Bracketing and refinement of scalar roots.

/// Interval `[lo, hi]` with `f(lo)` and `f(hi)` of opposite sign (or a zero
/// at an endpoint).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// First consecutive pair of grid points where `f` changes sign.
///
/// Exact zeros on the grid count as a sign change with the previous point.
pub fn scan_sign_change<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    grid: impl IntoIterator<Item = f64>,
) -> Result<Option<Bracket>, E> {
    let mut prev: Option<(f64, f64)> = None;
    for x in grid {
        let fx = f(x)?;
        if let Some((xp, fp)) = prev {
            if fp == 0.0 || fp.signum() != fx.signum() || fx == 0.0 {
                return Ok(Some(Bracket {
                    lo: xp,
                    hi: x,
                    f_lo: fp,
                    f_hi: fx,
                }));
            }
        }
        prev = Some((x, fx));
    }
    Ok(None)
}

/// Brent's method on a sign-change bracket, to relative tolerance `rel_tol`
/// in the abscissa.
pub fn brent<E>(mut f: impl FnMut(f64) -> Result<f64, E>, bracket: Bracket, rel_tol: f64) -> Result<f64, E> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (bracket.f_lo, bracket.f_hi);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    debug_assert!(fa.signum() != fb.signum(), "brent needs a sign change");
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs();
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Ok(b)
}
