//! Cylinder functions `J_ν(z)` and `I_ν(z)` for integer and half-integer
//! `ν ≥ 0`, real `z > 0`, by Miller's backward recurrence.
//!
//! Integer orders are normalised with the Neumann sums
//! `1 = J_0 + 2 Σ J_2k` and `e^z = I_0 + 2 Σ I_k`; half-integer orders with the
//! elementary closed forms of `J_1/2`, `J_3/2` and `I_1/2`.

use std::f64::consts::PI;

use super::{Kind, SpecFunError};

/// Largest argument the kernel accepts; `I_ν` overflows shortly beyond.
pub const KERNEL_MAX_Z: f64 = 700.0;

/// Maximum number of consecutive orders returned by one sweep.
pub(crate) const MAX_SEQ: usize = 16;

const BIG: f64 = 1e250;
const RESCALE: f64 = 1e-250;

/// `C_{ν0 + k}(z)` for `k = 0..count` with `ν0 = twice_nu0 / 2`.
pub(crate) fn sequence(
    kind: Kind,
    twice_nu0: u32,
    z: f64,
    count: usize,
) -> Result<[f64; MAX_SEQ], SpecFunError> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(SpecFunError::Argument(z));
    }
    if z > KERNEL_MAX_Z {
        return Err(SpecFunError::Overflow(z));
    }
    assert!(count >= 1 && count <= MAX_SEQ);

    let half = twice_nu0 % 2 == 1;
    let base = if half { 0.5 } else { 0.0 };
    let n0 = (twice_nu0 / 2) as usize;
    let top = (n0 + count) as f64;

    let start = match kind {
        Kind::J => {
            let x = top.max(z);
            (x + 20.0 + (50.0 * x).sqrt()).ceil() as usize
        }
        Kind::I => ((top * top + 80.0 * z).sqrt() + 20.0).ceil() as usize,
    };

    let mut window = [0.0; MAX_SEQ];
    // f_{n+1}, f_n
    let mut next = 0.0;
    let mut cur = 1e-30;
    let mut neumann = 0.0;
    let mut f1 = 0.0;
    let sign = kind.sign();

    let mut n = start;
    let f0 = loop {
        if n >= n0 && n < n0 + count {
            window[n - n0] = cur;
        }
        if !half {
            match kind {
                Kind::J if n % 2 == 0 && n > 0 => neumann += 2.0 * cur,
                Kind::I if n > 0 => neumann += 2.0 * cur,
                _ => {}
            }
        }
        if n == 1 {
            f1 = cur;
        }
        if n == 0 {
            break cur;
        }
        let nu = base + n as f64;
        // J_{ν-1} = (2ν/z) J_ν - J_{ν+1},  I_{ν-1} = (2ν/z) I_ν + I_{ν+1}
        let prev = (2.0 * nu / z) * cur + sign * next;
        next = cur;
        cur = prev;
        n -= 1;
        if cur.abs() > BIG {
            cur *= RESCALE;
            next *= RESCALE;
            neumann *= RESCALE;
            f1 *= RESCALE;
            for w in window.iter_mut() {
                *w *= RESCALE;
            }
        }
    };

    let scale = if half {
        let pref = (2.0 / (PI * z)).sqrt();
        match kind {
            Kind::J => {
                let j_half = pref * z.sin();
                let j_three_half = pref * (z.sin() / z - z.cos());
                if j_half.abs() >= j_three_half.abs() {
                    j_half / f0
                } else {
                    j_three_half / f1
                }
            }
            Kind::I => {
                // sinh without overflow concerns up to KERNEL_MAX_Z
                pref * z.sinh() / f0
            }
        }
    } else {
        let sum = f0 + neumann;
        match kind {
            Kind::J => 1.0 / sum,
            Kind::I => z.exp() / sum,
        }
    };

    for w in window.iter_mut().take(count) {
        *w *= scale;
    }
    Ok(window)
}
