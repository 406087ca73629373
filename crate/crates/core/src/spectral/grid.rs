use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::SpectralError;

/// Equispaced grid on `[0, 2 pi lambda)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusGrid {
    lambda: f64,
    n_points: usize,
}

impl TorusGrid {
    pub fn new(lambda: f64, n_points: usize) -> Result<Self, SpectralError> {
        if !(lambda.is_finite() && lambda > 0.0) || n_points < 8 || !n_points.is_power_of_two() {
            return Err(SpectralError::InvalidGrid { n: n_points, lambda });
        }
        Ok(Self { lambda, n_points })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        2.0 * PI * self.lambda
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    /// Signed integer index of storage slot `j`; the Nyquist slot maps to `-n/2`.
    pub fn mode_index(&self, j: usize) -> i64 {
        let n = self.n_points;
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        self.mode_index(j) as f64 / self.lambda
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.wavenumber(j)).collect()
    }

    /// Largest retained index under the 2/3 rule.
    pub fn dealias_cutoff(&self) -> usize {
        2 * self.n_points / 6
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| j as f64 * self.dx()).collect()
    }
}

/// Spectral state `(u_hat, v_hat)` at a time.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPair {
    pub u_hat: Vec<Complex64>,
    pub v_hat: Vec<Complex64>,
    pub time: f64,
}

impl FieldPair {
    pub fn zeros(grid: &TorusGrid) -> Self {
        let n = grid.n_points();
        Self { u_hat: vec![Complex64::default(); n], v_hat: vec![Complex64::default(); n], time: 0.0 }
    }

    pub fn from_physical(grid: &TorusGrid, u: &[f64], v: &[f64]) -> Result<Self, SpectralError> {
        let n = grid.n_points();
        for len in [u.len(), v.len()] {
            if len != n {
                return Err(SpectralError::LengthMismatch { found: len, expected: n });
            }
        }
        let mut t = Transform::new(n);
        let mut state = Self {
            u_hat: t.coefficients(&u.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>()),
            v_hat: t.coefficients(&v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>()),
            time: 0.0,
        };
        state.enforce_hermitian();
        Ok(state)
    }

    pub fn from_fn(grid: &TorusGrid, u: impl Fn(f64) -> f64, v: impl Fn(f64) -> f64) -> Self {
        let x = grid.points();
        let uu: Vec<f64> = x.iter().map(|&x| u(x)).collect();
        let vv: Vec<f64> = x.iter().map(|&x| v(x)).collect();
        Self::from_physical(grid, &uu, &vv).expect("sample count matches the grid")
    }

    pub fn to_physical(&self) -> (Vec<f64>, Vec<f64>) {
        let mut t = Transform::new(self.u_hat.len());
        let u = t.values(&self.u_hat).into_iter().map(|z| z.re).collect();
        let v = t.values(&self.v_hat).into_iter().map(|z| z.re).collect();
        (u, v)
    }

    /// Largest `|c(-k) - conj(c(k))|` over both fields.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.u_hat.len();
        let mut worst: f64 = 0.0;
        for c in [&self.u_hat, &self.v_hat] {
            worst = worst.max(c[0].im.abs());
            for k in 1..n {
                worst = worst.max((c[n - k] - c[k].conj()).norm());
            }
        }
        worst
    }

    /// Symmetrize so the fields are real, and clear the Nyquist slot.
    pub fn enforce_hermitian(&mut self) {
        let n = self.u_hat.len();
        for c in [&mut self.u_hat, &mut self.v_hat] {
            c[0].im = 0.0;
            c[n / 2] = Complex64::default();
            for k in 1..n / 2 {
                let avg = (c[k] + c[n - k].conj()) * 0.5;
                c[k] = avg;
                c[n - k] = avg.conj();
            }
        }
    }

    pub fn max_coefficient(&self) -> f64 {
        self.u_hat.iter().chain(&self.v_hat).map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Planned transforms between normalized coefficients and grid values.
pub(crate) struct Transform {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    scale: f64,
}

impl Transform {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self { forward, inverse, scratch: vec![Complex64::default(); len], scale: 1.0 / n as f64 }
    }

    pub(crate) fn values_in_place(&mut self, buf: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
    }

    pub(crate) fn coefficients_in_place(&mut self, buf: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
        for z in buf.iter_mut() {
            *z *= self.scale;
        }
    }

    pub(crate) fn values(&mut self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coeffs.to_vec();
        self.values_in_place(&mut buf);
        buf
    }

    pub(crate) fn coefficients(&mut self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.coefficients_in_place(&mut buf);
        buf
    }
}
