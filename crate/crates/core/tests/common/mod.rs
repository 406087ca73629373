//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use mbkdv::spectral::{evolve, FieldPair, Scheme, SimConfig, TorusGrid};
use num_complex::Complex64;

/// Eigenvalues (ascending) and unit eigenvectors (columns) of a symmetric
/// 2x2 matrix by one Jacobi rotation.
pub fn jacobi_eigen(m: [[f64; 2]; 2]) -> ((f64, f64), [[f64; 2]; 2]) {
    let [[a, b], [_, c]] = m;
    if b == 0.0 {
        return if a <= c { ((a, c), [[1.0, 0.0], [0.0, 1.0]]) } else { ((c, a), [[0.0, 1.0], [1.0, 0.0]]) };
    }
    let theta = (c - a) / (2.0 * b);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    let (l1, l2) = (a - t * b, c + t * b);
    let v1 = [cs, -sn];
    let v2 = [sn, cs];
    if l1 <= l2 {
        ((l1, l2), [[v1[0], v2[0]], [v1[1], v2[1]]])
    } else {
        ((l2, l1), [[v2[0], v1[0]], [v2[1], v1[1]]])
    }
}

type C2 = [[Complex64; 2]; 2];

fn mat_mul(x: &C2, y: &C2) -> C2 {
    let mut out = [[Complex64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

/// `exp(i A t)` by scaling and squaring of a truncated Taylor series.
pub fn expm_i(a: [[f64; 2]; 2], t: f64) -> C2 {
    let x: C2 = [
        [Complex64::new(0.0, a[0][0] * t), Complex64::new(0.0, a[0][1] * t)],
        [Complex64::new(0.0, a[1][0] * t), Complex64::new(0.0, a[1][1] * t)],
    ];
    let norm = x.iter().flatten().map(|z| z.norm()).sum::<f64>();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5f64.powi(squarings as i32);
    let y: C2 = [[x[0][0] * scale, x[0][1] * scale], [x[1][0] * scale, x[1][1] * scale]];
    let one = Complex64::new(1.0, 0.0);
    let mut result: C2 = [[one, Complex64::default()], [Complex64::default(), one]];
    let mut term = result;
    for k in 1..=24 {
        term = mat_mul(&term, &y);
        let inv = 1.0 / k as f64;
        for row in term.iter_mut() {
            for z in row.iter_mut() {
                *z *= inv;
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    result
}

/// Largest pointwise difference of two states in physical space.
pub fn max_difference(a: &FieldPair, b: &FieldPair) -> f64 {
    let (au, av) = a.to_physical();
    let (bu, bv) = b.to_physical();
    au.iter().zip(&bu).chain(av.iter().zip(&bv)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Endpoint error of the decoupled linear problem (`v = 0`), whose `u`
/// coefficients only pick up the phase `e^{i xi^3 t}`.
pub fn airy_error(n: usize, dt: f64, t: f64, scheme: Scheme) -> f64 {
    let grid = TorusGrid::new(1.0, n).unwrap();
    let state = FieldPair::from_fn(&grid, |x| 0.5 * x.cos() + 0.2 * (3.0 * x).sin() + 0.1 * (x.sin()).exp(), |_| 0.0);
    let mut cfg = SimConfig::new(0.5, dt, t);
    cfg.scheme = scheme;
    let numeric = evolve(&state, &grid, &cfg).unwrap().state;
    let mut exact = state.clone();
    for (j, z) in exact.u_hat.iter_mut().enumerate() {
        let xi = grid.wavenumber(j);
        *z *= Complex64::from_polar(1.0, xi.powi(3) * t);
    }
    exact.time = t;
    max_difference(&numeric, &exact)
}

/// Nonlinear data for temporal convergence checks.
pub fn order_problem() -> (TorusGrid, FieldPair) {
    let grid = TorusGrid::new(1.0, 32).unwrap();
    let state = FieldPair::from_fn(&grid, |x| 0.6 * x.cos(), |x| 0.8 * (2.0 * x).sin() + 0.3 * x.cos());
    (grid, state)
}

/// Fitted order of `scheme` from endpoint errors at `dts` against a fine reference.
pub fn temporal_order(scheme: Scheme, dts: &[f64], t: f64, reference_dt: f64) -> (f64, Vec<f64>) {
    let (grid, state) = order_problem();
    let run = |dt: f64| {
        let mut cfg = SimConfig::new(0.5, dt, t);
        cfg.scheme = scheme;
        evolve(&state, &grid, &cfg).unwrap().state
    };
    let reference = run(reference_dt);
    let errors: Vec<f64> = dts.iter().map(|&dt| max_difference(&run(dt), &reference)).collect();
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    (mbkdv::picard::least_squares(&xs, &ys).slope, errors)
}
