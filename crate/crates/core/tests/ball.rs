mod common;

use freeplate::ball::{
    fundamental_tone, gamma_of, infinite_tension_ratio, membrane_c, secular_v, tone_bounds, BallError, RESIDUAL_TOL,
};
use freeplate::specfun::{first_zero_j1prime, ultra_i, ultra_j};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{gamma_half, ritz_tone};

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 10f64.powf(lo.log10() + (hi.log10() - lo.log10()) * k as f64 / (n - 1) as f64))
        .collect()
}

#[test]
fn ritz_oracle_agrees() {
    for (d, tau) in [(2, 0.1), (2, 1.0), (2, 10.0), (3, 1.0), (4, 5.0)] {
        let w = fundamental_tone(tau, d, 1.0).unwrap().omega;
        let r = ritz_tone(tau, d, 40);
        println!("d={d} tau={tau}: solver {w:.12} ritz {r:.12}");
        assert!(((w - r) / w).abs() < 1e-6);
    }
}

/// `V u` on the sphere `|x| = R` by Cartesian finite differences of `u`,
/// divided by `Y_1 = x_1/|x|` at the evaluation point.
fn v_by_finite_differences(a: f64, tau: f64, d: u32, radius: f64) -> f64 {
    let gamma = gamma_of(a, tau, d, radius).unwrap();
    let b = (a * a + tau).sqrt();
    let n = d as usize;
    let norm = |x: &[f64]| x.iter().map(|t| t * t).sum::<f64>().sqrt();
    let u = |x: &[f64]| {
        let r = norm(x);
        (ultra_j(1, d, a * r, 0).unwrap() + gamma * ultra_i(1, d, b * r, 0).unwrap()) * x[0] / r
    };
    let shifted = |x: &[f64], k: usize, h: f64| {
        let mut y = x.to_vec();
        y[k] += h;
        y
    };
    // fourth-order first and second differences along a direction
    let d1 = |f: &dyn Fn(&[f64]) -> f64, x: &[f64], dir: &[f64], h: f64| {
        let at = |s: f64| f(&x.iter().zip(dir).map(|(p, q)| p + s * q).collect::<Vec<_>>());
        (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
    };
    let d2 = |f: &dyn Fn(&[f64]) -> f64, x: &[f64], dir: &[f64], h: f64| {
        let at = |s: f64| f(&x.iter().zip(dir).map(|(p, q)| p + s * q).collect::<Vec<_>>());
        (-at(2.0 * h) + 16.0 * at(h) - 30.0 * at(0.0) + 16.0 * at(-h) - at(-2.0 * h)) / (12.0 * h * h)
    };
    let lap = |f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64| {
        (0..n)
            .map(|k| {
                let e: Vec<f64> = (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect();
                d2(f, x, &e, h)
            })
            .sum::<f64>()
    };
    let _ = shifted;
    let radial = |x: &[f64]| {
        let r = norm(x);
        x.iter().map(|t| t / r).collect::<Vec<f64>>()
    };
    let u_r = |x: &[f64]| d1(&u, x, &radial(x), 1e-3);
    let w = |x: &[f64]| u_r(x) - u(x) / norm(x);
    let lap_u = |x: &[f64]| lap(&u, x, 1e-2);

    let phi: f64 = 0.3;
    let mut p = vec![0.0; n];
    p[0] = radius * phi.cos();
    p[1] = radius * phi.sin();
    let nrm = radial(&p);
    let h2 = 1e-2 * radius;
    // (1/r²) Δ_S w = Δw - w_rr - (d-1)/r w_r
    let sph = lap(&w, &p, h2) - d2(&w, &p, &nrm, h2) - (d as f64 - 1.0) / radius * d1(&w, &p, &nrm, h2);
    let v = tau * u_r(&p) - sph - d1(&lap_u, &p, &nrm, 1e-2 * radius);
    v / phi.cos()
}

#[test]
fn secular_function_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..20 {
        let d = rng.random_range(2..=7u32);
        let tau = 10f64.powf(rng.random_range(-1.0..1.0));
        let radius = rng.random_range(0.5..2.0);
        let a = rng.random_range(0.1..0.95) * first_zero_j1prime(d).unwrap() / radius;
        let closed = secular_v(a, tau, d, radius).unwrap();
        let fd = v_by_finite_differences(a, tau, d, radius);
        let b = (a * a + tau).sqrt();
        let gamma = gamma_of(a, tau, d, radius).unwrap();
        // size of the largest term in V
        let scale = (a.powi(3) * ultra_j(1, d, a * radius, 1).unwrap()).abs()
            + (gamma * b.powi(3) * ultra_i(1, d, b * radius, 1).unwrap()).abs()
            + closed.abs();
        println!("d={d} tau={tau:.3} R={radius:.3} a={a:.4}: closed {closed:.10e} fd {fd:.10e}");
        assert!((closed - fd).abs() <= 1e-6 * scale);
    }
}

#[test]
fn m_condition_by_construction() {
    for (a, tau, d, r) in [(0.5, 1.0, 2, 1.0), (1.0, 1.0, 2, 1.0), (1.5, 1.0, 2, 1.0), (0.7, 3.0, 5, 1.4)] {
        let g = gamma_of(a, tau, d, r).unwrap();
        assert!(g > 0.0);
        let b = (a * a + tau).sqrt();
        let lhs = a * a * ultra_j(1, d, a * r, 2).unwrap();
        let rhs = g * b * b * ultra_i(1, d, b * r, 2).unwrap();
        assert!((lhs + rhs).abs() <= 1e-13 * lhs.abs());
    }
}

#[test]
fn gamma_against_series() {
    // d = 3, τ = 1, a = 1, with j_1'' and i_1'' summed from d_k written out here
    let d = 3u32;
    let dk = |k: u32| {
        let fact: f64 = (1..k).map(f64::from).product();
        (2 * k + 1) as f64 / (fact * gamma_half(2 * k + 2 + d)) * 2f64.powf(1.0 - 2.0 * k as f64 - d as f64 / 2.0)
    };
    let (a, tau) = (1.0f64, 1.0);
    let b = (a * a + tau).sqrt();
    let j2: f64 = (1..30).map(|k| (-1f64).powi(k as i32) * dk(k) * a.powi(2 * k as i32 - 1)).sum();
    let i2: f64 = (1..30).map(|k| dk(k) * b.powi(2 * k as i32 - 1)).sum();
    let expected = -a * a * j2 / (b * b * i2);
    let g = gamma_of(a, tau, d, 1.0).unwrap();
    assert!((g - expected).abs() < 1e-13 * expected, "{g} vs {expected}");
}

#[test]
fn single_sign_change_of_secular_function() {
    for d in [2, 3] {
        let ainf = first_zero_j1prime(d).unwrap();
        for tau in [0.1, 1.0, 10.0] {
            let n = 2000;
            let vals: Vec<f64> = (0..=n)
                .map(|k| 0.05 + (ainf - 0.1) * k as f64 / n as f64)
                .map(|a| secular_v(a, tau, d, 1.0).unwrap())
                .collect();
            let changes = vals.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
            assert_eq!(changes, 1, "d={d} tau={tau}");
        }
    }
}

#[test]
fn root_has_vanishing_secular_value() {
    let m = fundamental_tone(1.0, 2, 1.0).unwrap();
    assert!(secular_v(m.a, 1.0, 2, 1.0).unwrap().abs() < 1e-10);
}

#[test]
fn mode_invariants_over_test_matrix() {
    for d in 2..=7 {
        let ainf = first_zero_j1prime(d).unwrap();
        for tau in log_grid(1e-2, 1e3, 12) {
            let m = fundamental_tone(tau, d, 1.0).unwrap();
            assert!((m.b * m.b - m.a * m.a - tau).abs() <= 4.0 * f64::EPSILON * m.b * m.b);
            assert_eq!(m.omega, m.a * m.a * m.b * m.b);
            assert!(m.a > 0.0 && m.a < ainf);
            assert!(m.gamma > 0.0);
            assert!(m.residuals().unwrap().within(RESIDUAL_TOL), "d={d} tau={tau}");
        }
    }
}

#[test]
fn regime_bounds_on_solved_modes() {
    for d in 2..=7u32 {
        let df = d as f64;
        for tau in log_grid(1e-2, 1e3, 20) {
            let m = fundamental_tone(tau, d, 1.0).unwrap();
            let a2 = m.a * m.a;
            if tau <= 9.0 / (df + 5.0) {
                assert!(a2 < 3.0 * (df + 2.0) / (df + 5.0));
                assert!(m.b * m.b <= 3.0);
            }
            if a2 < df {
                assert!(a2 * a2 / (df - a2) > tau && tau > a2 * a2 / (df + 2.0 - a2), "d={d} tau={tau}");
            }
        }
    }
}

#[test]
fn tone_is_increasing_and_concave_in_tension() {
    for d in [2, 3, 5] {
        let taus = log_grid(1e-2, 1e4, 40);
        let w: Vec<f64> = taus.iter().map(|&t| fundamental_tone(t, d, 1.0).unwrap().omega).collect();
        for k in 1..taus.len() {
            assert!(w[k] > w[k - 1]);
        }
        for k in 2..taus.len() {
            let s1 = (w[k - 1] - w[k - 2]) / (taus[k - 1] - taus[k - 2]);
            let s2 = (w[k] - w[k - 1]) / (taus[k] - taus[k - 1]);
            assert!(s2 < s1, "d={d} at tau={}", taus[k]);
        }
    }
}

#[test]
fn scaling_law_for_tone() {
    for d in [2, 3] {
        for tau in [0.5, 1.0, 5.0] {
            let w1 = fundamental_tone(tau, d, 1.0).unwrap().omega;
            for s in [0.5f64, 2.0] {
                let ws = fundamental_tone(tau / (s * s), d, s).unwrap().omega;
                assert!((w1 - s.powi(4) * ws).abs() <= 1e-9 * w1);
            }
        }
    }
}

#[test]
fn bound_examples() {
    let b = tone_bounds(1.0, 2).unwrap();
    assert!((b.lower - 3.390).abs() < 1e-3);
    assert_eq!(b.upper_coord, 4.0);
    for d in [2, 3, 4] {
        for tau in [0.1, 1.0, 10.0, 100.0] {
            let w = fundamental_tone(tau, d, 1.0).unwrap().omega;
            let b = tone_bounds(tau, d).unwrap();
            assert!(b.lower < w && w < b.upper_coord);
            if d == 2 && tau <= 10.0 {
                assert!(w <= b.upper_membrane);
            }
        }
    }
    let tiny = tone_bounds(1e-12, 3).unwrap();
    assert!(tiny.lower < 1e-10 && tiny.upper_coord < 1e-10);
    assert!((tiny.upper_membrane - membrane_c(3).unwrap()).abs() < 1e-10);
    assert!(matches!(tone_bounds(0.0, 2), Err(BallError::Tension(_))));
}

#[test]
fn membrane_constant_against_monte_carlo() {
    for d in [2u32, 3] {
        let c = membrane_c(d).unwrap();
        assert!(c > 0.0);
        let ainf = first_zero_j1prime(d).unwrap();
        let n = d as usize;
        let v = |x: &[f64]| {
            let r = x.iter().map(|t| t * t).sum::<f64>().sqrt();
            ultra_j(1, d, ainf * r, 0).unwrap() * x[0] / r
        };
        let h = 1e-4;
        let mut rng = ChaCha8Rng::seed_from_u64(7 + d as u64);
        // jittered sampling: one uniform point in each cell of an m^d grid on
        // the cube, kept if it lands in the ball
        let m: usize = if d == 2 { 800 } else { 90 };
        let cell = 2.0 / m as f64;
        let (mut s_num, mut s_den) = (0.0, 0.0);
        let mut x = vec![0.0; n];
        for idx in 0..m.pow(d) {
            let mut k = idx;
            for t in x.iter_mut() {
                *t = -1.0 + cell * ((k % m) as f64 + rng.random::<f64>());
                k /= m;
            }
            let r2: f64 = x.iter().map(|t| t * t).sum();
            if r2 > 1.0 || r2 < 1e-12 {
                continue;
            }
            // Cartesian Hessian by central differences
            let mut hess2 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let at = |si: f64, sj: f64| {
                        let mut y = x.clone();
                        y[i] += si;
                        y[j] += sj;
                        v(&y)
                    };
                    let hij = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
                    hess2 += hij * hij;
                }
            }
            s_num += hess2;
            s_den += v(&x).powi(2);
        }
        let q = s_num / s_den;
        println!("d={d}: C = {c:.8}, Monte Carlo {q:.8}");
        assert!(((q - c) / c).abs() < 1e-3);
    }
}

#[test]
fn infinite_tension_limit() {
    let mu2 = first_zero_j1prime(2).unwrap().powi(2);
    let c2 = membrane_c(2).unwrap();
    let r = infinite_tension_ratio(2, &[1e3, 1e4]).unwrap();
    assert!(r[0] >= mu2);
    assert!(r[1] >= 3.390 && r[1] <= mu2 + c2 / 1e4);
    let mu3 = first_zero_j1prime(3).unwrap().powi(2);
    let r3 = infinite_tension_ratio(3, &[1e5]).unwrap();
    assert!(r3[0] - mu3 <= membrane_c(3).unwrap() / 1e5 + 1e-8);
}

#[test]
fn invalid_inputs() {
    assert!(matches!(fundamental_tone(-1.0, 2, 1.0), Err(BallError::Tension(_))));
    assert!(matches!(fundamental_tone(1.0, 2, 0.0), Err(BallError::Radius(_))));
    assert!(gamma_of(2.0, 1.0, 2, 1.0).is_err());
}
