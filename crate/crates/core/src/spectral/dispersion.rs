use num_complex::Complex64;
use serde::Serialize;

use super::grid::{FieldPair, TorusGrid};

/// 2x2 complex matrix, row major.
pub(crate) type Mat2 = [[Complex64; 2]; 2];

pub(crate) fn apply(m: &Mat2, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
    (m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    U,
    V,
}

/// Linear phase `e^{i xi^3 t}` for `u`, `e^{i alpha xi^3 t}` for `v`.
pub fn linear_phase(alpha: f64, xi: f64, t: f64, channel: Channel) -> Complex64 {
    let w = match channel {
        Channel::U => xi.powi(3),
        Channel::V => alpha * xi.powi(3),
    };
    Complex64::from_polar(1.0, w * t)
}

/// Symmetric generator `A` of the shifted linear flow `d_t (u, v) = i A (u, v)`.
pub fn linear_operator(alpha: f64, p: f64, q: f64, xi: f64) -> [[f64; 2]; 2] {
    let x3 = xi.powi(3);
    [[x3, -q * xi], [-q * xi, alpha * x3 - p * xi]]
}

/// Eigenvalues `xi^3 - p xi / 2 -+ L xi` of the equal-dispersion generator.
pub fn closed_form_eigenvalues(p: f64, q: f64, xi: f64) -> (f64, f64) {
    let l = 0.5 * (p * p + 4.0 * q * q).sqrt();
    let base = xi.powi(3) - p * xi / 2.0;
    (base - l * xi, base + l * xi)
}

/// Eigen-structure of the generator at one frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeDispersion {
    pub xi: f64,
    pub a_matrix: [[f64; 2]; 2],
    pub eigenvalues: (f64, f64),
    /// Orthogonal `M` with `A = M diag(d1, d2) M^T`; columns are eigenvectors.
    pub rotation: [[f64; 2]; 2],
}

pub fn mode_dispersion(alpha: f64, p: f64, q: f64, xi: f64) -> ModeDispersion {
    let a_matrix = linear_operator(alpha, p, q, xi);
    let [[a, b], [_, c]] = a_matrix;
    let half_diff = 0.5 * (a - c);
    let radius = half_diff.hypot(b);
    let sign = if xi < 0.0 { -1.0 } else { 1.0 };
    let d1 = 0.5 * (a + c) - sign * radius;
    let d2 = 0.5 * (a + c) + sign * radius;

    let (mut x, mut y) = if b == 0.0 {
        if (d1 - a).abs() <= (d1 - c).abs() {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        }
    } else {
        // two expressions for the same eigenvector; take the larger one
        let first = (b, d1 - a);
        let second = (d1 - c, b);
        let pick = if first.0.hypot(first.1) >= second.0.hypot(second.1) { first } else { second };
        let norm = pick.0.hypot(pick.1);
        (pick.0 / norm, pick.1 / norm)
    };
    if x < 0.0 || (x == 0.0 && y < 0.0) {
        x = -x;
        y = -y;
    }
    ModeDispersion { xi, a_matrix, eigenvalues: (d1, d2), rotation: [[x, -y], [y, x]] }
}

impl ModeDispersion {
    /// `M diag(f(d1), f(d2)) M^T`.
    pub(crate) fn function(&self, f: impl Fn(f64) -> Complex64) -> Mat2 {
        let m = self.rotation;
        let (f1, f2) = (f(self.eigenvalues.0), f(self.eigenvalues.1));
        let mut out = [[Complex64::default(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = f1 * (m[i][0] * m[j][0]) + f2 * (m[i][1] * m[j][1]);
            }
        }
        out
    }

    /// `exp(i A t)`.
    pub fn propagator(&self, t: f64) -> [[Complex64; 2]; 2] {
        self.function(|d| Complex64::from_polar(1.0, d * t))
    }
}

/// Per-frequency diagonalization of the shifted linear system on a grid.
#[derive(Clone, Debug, Serialize)]
pub struct DispersionMatrix {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    /// `L = sqrt(p^2 + 4 q^2) / 2`.
    pub l_value: f64,
    pub modes: Vec<ModeDispersion>,
}

impl DispersionMatrix {
    pub fn new(alpha: f64, p: f64, q: f64, grid: &TorusGrid) -> Self {
        let modes = grid.wavenumbers().into_iter().map(|xi| mode_dispersion(alpha, p, q, xi)).collect();
        Self { alpha, p, q, l_value: 0.5 * (p * p + 4.0 * q * q).sqrt(), modes }
    }

    /// Equal dispersion coefficients, the case with the closed-form spectrum.
    pub fn coupled(p: f64, q: f64, grid: &TorusGrid) -> Self {
        Self::new(1.0, p, q, grid)
    }
}

/// Exact flow of `(d_t + d_x^3 + [[0, q], [q, p]] d_x)(u, v) = 0` over time `t`.
pub fn evolve_coupled_linear(state: &FieldPair, grid: &TorusGrid, p: f64, q: f64, t: f64) -> FieldPair {
    let dm = DispersionMatrix::coupled(p, q, grid);
    let mut out = state.clone();
    for (j, mode) in dm.modes.iter().enumerate() {
        let prop = mode.propagator(t);
        let (u, v) = apply(&prop, state.u_hat[j], state.v_hat[j]);
        out.u_hat[j] = u;
        out.v_hat[j] = v;
    }
    out.time = state.time + t;
    out
}
