use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dispersion::{apply, mode_dispersion, Mat2, ModeDispersion};
use super::grid::{FieldPair, TorusGrid, Transform};
use super::SpectralError;

/// Coefficient magnitude treated as blow-up.
pub const OVERFLOW_GUARD: f64 = 1e12;
/// Stability bound for `dt * max|xi| * max(|u|, |v|)` in the explicit stages.
const STAGE_BOUND: f64 = 2.8;
/// Contour points for the ETD coefficient functions.
const CONTOUR_POINTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scheme {
    #[default]
    Ifrk4,
    Etdrk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub alpha: f64,
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    /// Apply the 2/3 rule to the quadratic products.
    pub dealias: bool,
    /// Steps between conservation samples; 0 records only the endpoints.
    pub monitor_stride: usize,
    /// Evolve the mean-free fields with the coupling the means induce.
    pub reduce_means: bool,
}

impl SimConfig {
    pub fn new(alpha: f64, dt: f64, t_final: f64) -> Self {
        Self { alpha, dt, t_final, scheme: Scheme::Ifrk4, dealias: true, monitor_stride: 0, reduce_means: false }
    }

    fn validate(&self) -> Result<(), SpectralError> {
        if !(self.alpha.is_finite() && self.alpha != 0.0) {
            return Err(SpectralError::InvalidConfig(format!("alpha must be finite and nonzero, got {}", self.alpha)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SpectralError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(SpectralError::InvalidConfig(format!("t_final must be nonnegative, got {}", self.t_final)));
        }
        Ok(())
    }
}

/// `E1 = int u`, `E2 = int v`, `E3 = int u^2 + v^2`,
/// `E4 = 1/2 int (u_x^2 + alpha v_x^2 - u v^2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ConservedSet {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
}

impl ConservedSet {
    /// Relative change per quantity; absolute where the reference vanishes.
    pub fn drift_from(&self, reference: &ConservedSet) -> ConservedSet {
        let rel = |now: f64, then: f64| {
            let scale = if then.abs() > 1e-300 { then.abs() } else { 1.0 };
            (now - then).abs() / scale
        };
        ConservedSet {
            e1: rel(self.e1, reference.e1),
            e2: rel(self.e2, reference.e2),
            e3: rel(self.e3, reference.e3),
            e4: rel(self.e4, reference.e4),
        }
    }

    fn max_with(&self, other: &ConservedSet) -> ConservedSet {
        ConservedSet {
            e1: self.e1.max(other.e1),
            e2: self.e2.max(other.e2),
            e3: self.e3.max(other.e3),
            e4: self.e4.max(other.e4),
        }
    }
}

pub fn conserved_quantities(state: &FieldPair, grid: &TorusGrid, alpha: f64) -> ConservedSet {
    let len = grid.length();
    let xi = grid.wavenumbers();
    let mut e3 = 0.0;
    let mut grad = 0.0;
    for j in 0..grid.n_points() {
        let (u, v) = (state.u_hat[j].norm_sqr(), state.v_hat[j].norm_sqr());
        e3 += u + v;
        grad += xi[j] * xi[j] * (u + alpha * v);
    }
    ConservedSet {
        e1: len * state.u_hat[0].re,
        e2: len * state.v_hat[0].re,
        e3: len * e3,
        e4: 0.5 * len * (grad - cubic_mean(state)),
    }
}

/// Mean of `u v^2` on a 3/2-padded grid.
fn cubic_mean(state: &FieldPair) -> f64 {
    let n = state.u_hat.len();
    let m = 3 * n / 2;
    let pad = |c: &[Complex64]| {
        let mut out = vec![Complex64::default(); m];
        for k in 0..n / 2 {
            out[k] = c[k];
        }
        for k in 1..n / 2 {
            out[m - k] = c[n - k];
        }
        out
    };
    let mut t = Transform::new(m);
    let u = t.values(&pad(&state.u_hat));
    let v = t.values(&pad(&state.v_hat));
    u.iter().zip(&v).map(|(a, b)| a.re * b.re * b.re).sum::<f64>() / m as f64
}

/// Result of subtracting the spatial means.
#[derive(Clone, Debug)]
pub struct MeanZeroReduction {
    /// Mean of `u`.
    pub p: f64,
    /// Mean of `v`.
    pub q: f64,
    pub shifted: FieldPair,
}

pub fn mean_zero_reduce(state: &FieldPair) -> MeanZeroReduction {
    let mut shifted = state.clone();
    let p = shifted.u_hat[0].re;
    let q = shifted.v_hat[0].re;
    shifted.u_hat[0] = Complex64::default();
    shifted.v_hat[0] = Complex64::default();
    MeanZeroReduction { p, q, shifted }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MonitorRow {
    pub time: f64,
    pub conserved: ConservedSet,
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub state: FieldPair,
    pub steps: usize,
    pub monitor: Vec<MonitorRow>,
    /// Largest relative drift over all monitored times.
    pub drift: ConservedSet,
    pub warnings: Vec<String>,
}

/// Linear stage operators for one frequency.
struct StageOperators {
    full: Mat2,
    half: Mat2,
    etd: Option<[Mat2; 4]>,
}

fn etd_functions(mode: &ModeDispersion, h: f64) -> [Mat2; 4] {
    // contour means of the phi-type functions at z = i d h
    let eval = |d: f64, which: usize| -> Complex64 {
        let z = Complex64::new(0.0, d * h);
        let mut acc = Complex64::default();
        for k in 0..CONTOUR_POINTS {
            let r = Complex64::from_polar(1.0, std::f64::consts::PI * (k as f64 + 0.5) * 2.0 / CONTOUR_POINTS as f64);
            let w = z + r;
            let e = w.exp();
            let w3 = w * w * w;
            acc += match which {
                0 => ((w / 2.0).exp() - 1.0) / w,
                1 => (-4.0 - w + e * (4.0 - 3.0 * w + w * w)) / w3,
                2 => (2.0 + w + e * (-2.0 + w)) / w3,
                _ => (-4.0 - 3.0 * w - w * w + e * (4.0 - w)) / w3,
            };
        }
        acc * (h / CONTOUR_POINTS as f64)
    };
    [0, 1, 2, 3].map(|which| mode.function(|d| eval(d, which)))
}

struct Stepper {
    ops: Vec<StageOperators>,
    xi: Vec<f64>,
    mask: Vec<bool>,
    transform: Transform,
    buf_u: Vec<Complex64>,
    buf_v: Vec<Complex64>,
}

impl Stepper {
    fn new(grid: &TorusGrid, cfg: &SimConfig, p: f64, q: f64, h: f64) -> Self {
        let n = grid.n_points();
        let cutoff = grid.dealias_cutoff() as i64;
        let xi = grid.wavenumbers();
        let ops = xi
            .iter()
            .map(|&x| {
                let mode = mode_dispersion(cfg.alpha, p, q, x);
                StageOperators {
                    full: mode.propagator(h),
                    half: mode.propagator(h / 2.0),
                    etd: (cfg.scheme == Scheme::Etdrk4).then(|| etd_functions(&mode, h)),
                }
            })
            .collect();
        let mask = (0..n)
            .map(|j| {
                let k = grid.mode_index(j);
                k != -(n as i64 / 2) && (!cfg.dealias || k.abs() <= cutoff)
            })
            .collect();
        Self {
            ops,
            xi,
            mask,
            transform: Transform::new(n),
            buf_u: vec![Complex64::default(); n],
            buf_v: vec![Complex64::default(); n],
        }
    }

    /// `(-(v v_x), -(u v)_x)` in coefficient space.
    fn nonlinear(&mut self, u: &[Complex64], v: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        self.buf_u.copy_from_slice(u);
        self.buf_v.copy_from_slice(v);
        self.transform.values_in_place(&mut self.buf_u);
        self.transform.values_in_place(&mut self.buf_v);
        for (a, b) in self.buf_u.iter_mut().zip(self.buf_v.iter_mut()) {
            let (ur, vr) = (a.re, b.re);
            *a = Complex64::new(0.5 * vr * vr, 0.0);
            *b = Complex64::new(ur * vr, 0.0);
        }
        self.transform.coefficients_in_place(&mut self.buf_u);
        self.transform.coefficients_in_place(&mut self.buf_v);
        let mut nu = vec![Complex64::default(); u.len()];
        let mut nv = vec![Complex64::default(); u.len()];
        for j in 0..u.len() {
            if self.mask[j] {
                let d = Complex64::new(0.0, -self.xi[j]);
                nu[j] = d * self.buf_u[j];
                nv[j] = d * self.buf_v[j];
            }
        }
        (nu, nv)
    }

    fn map(&self, pick: impl Fn(&StageOperators) -> &Mat2, u: &[Complex64], v: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut ou = Vec::with_capacity(u.len());
        let mut ov = Vec::with_capacity(u.len());
        for (j, op) in self.ops.iter().enumerate() {
            let (a, b) = apply(pick(op), u[j], v[j]);
            ou.push(a);
            ov.push(b);
        }
        (ou, ov)
    }

    fn ifrk4(&mut self, u: &mut Vec<Complex64>, v: &mut Vec<Complex64>, h: f64) {
        let axpy = |x: &[Complex64], y: &[Complex64], c: f64| -> Vec<Complex64> { x.iter().zip(y).map(|(a, b)| a + b * c).collect() };
        let (k1u, k1v) = self.nonlinear(u, v);
        let (hu, hv) = self.map(|o| &o.half, u, v);
        let (pk1u, pk1v) = self.map(|o| &o.half, &k1u, &k1v);
        let (au, av) = (axpy(&hu, &pk1u, h / 2.0), axpy(&hv, &pk1v, h / 2.0));
        let (k2u, k2v) = self.nonlinear(&au, &av);
        let (bu, bv) = (axpy(&hu, &k2u, h / 2.0), axpy(&hv, &k2v, h / 2.0));
        let (k3u, k3v) = self.nonlinear(&bu, &bv);
        let (fu, fv) = self.map(|o| &o.full, u, v);
        let (pk3u, pk3v) = self.map(|o| &o.half, &k3u, &k3v);
        let (cu, cv) = (axpy(&fu, &pk3u, h), axpy(&fv, &pk3v, h));
        let (k4u, k4v) = self.nonlinear(&cu, &cv);
        let (fk1u, fk1v) = self.map(|o| &o.full, &k1u, &k1v);
        let s23u: Vec<Complex64> = k2u.iter().zip(&k3u).map(|(a, b)| a + b).collect();
        let s23v: Vec<Complex64> = k2v.iter().zip(&k3v).map(|(a, b)| a + b).collect();
        let (p23u, p23v) = self.map(|o| &o.half, &s23u, &s23v);
        for j in 0..u.len() {
            u[j] = fu[j] + (fk1u[j] + p23u[j] * 2.0 + k4u[j]) * (h / 6.0);
            v[j] = fv[j] + (fk1v[j] + p23v[j] * 2.0 + k4v[j]) * (h / 6.0);
        }
    }

    fn etdrk4(&mut self, u: &mut Vec<Complex64>, v: &mut Vec<Complex64>) {
        let etd = |s: &Self, j: usize, which: usize| -> Mat2 { s.ops[j].etd.as_ref().expect("ETD operators prepared")[which] };
        let n = u.len();
        let combine = |s: &Self, base: &[Complex64], base_v: &[Complex64], nu: &[Complex64], nv: &[Complex64]| {
            let mut ou = vec![Complex64::default(); n];
            let mut ov = vec![Complex64::default(); n];
            for j in 0..n {
                let (a, b) = apply(&s.ops[j].half, base[j], base_v[j]);
                let (c, d) = apply(&etd(s, j, 0), nu[j], nv[j]);
                ou[j] = a + c;
                ov[j] = b + d;
            }
            (ou, ov)
        };
        let (n0u, n0v) = self.nonlinear(u, v);
        let (au, av) = combine(self, u, v, &n0u, &n0v);
        let (nau, nav) = self.nonlinear(&au, &av);
        let (bu, bv) = combine(self, u, v, &nau, &nav);
        let (nbu, nbv) = self.nonlinear(&bu, &bv);
        let tu: Vec<Complex64> = (0..n).map(|j| nbu[j] * 2.0 - n0u[j]).collect();
        let tv: Vec<Complex64> = (0..n).map(|j| nbv[j] * 2.0 - n0v[j]).collect();
        let (cu, cv) = combine(self, &au, &av, &tu, &tv);
        let (ncu, ncv) = self.nonlinear(&cu, &cv);
        for j in 0..n {
            let (eu, ev) = apply(&self.ops[j].full, u[j], v[j]);
            let (f1u, f1v) = apply(&etd(self, j, 1), n0u[j], n0v[j]);
            let (f2u, f2v) = apply(&etd(self, j, 2), nau[j] + nbu[j], nav[j] + nbv[j]);
            let (f3u, f3v) = apply(&etd(self, j, 3), ncu[j], ncv[j]);
            u[j] = eu + f1u + f2u * 2.0 + f3u;
            v[j] = ev + f1v + f2v * 2.0 + f3v;
        }
    }
}

/// Advance `state` by `cfg.t_final` with a fixed step no larger than `cfg.dt`.
///
/// Linear terms (including the coupling induced by nonzero means when
/// `reduce_means` is set) are integrated exactly in the eigenbasis of the
/// per-frequency generator; the quadratic terms are computed
/// pseudospectrally.
pub fn evolve(state: &FieldPair, grid: &TorusGrid, cfg: &SimConfig) -> Result<Evolution, SpectralError> {
    cfg.validate()?;
    if state.u_hat.len() != grid.n_points() || state.v_hat.len() != grid.n_points() {
        return Err(SpectralError::LengthMismatch { found: state.u_hat.len(), expected: grid.n_points() });
    }
    let steps = if cfg.t_final == 0.0 { 0 } else { (cfg.t_final / cfg.dt * (1.0 - 1e-12)).ceil() as usize };
    let h = if steps == 0 { 0.0 } else { cfg.t_final / steps as f64 };

    let mut work = state.clone();
    work.enforce_hermitian();
    let (p, q) = if cfg.reduce_means {
        let r = mean_zero_reduce(&work);
        work = r.shifted;
        (r.p, r.q)
    } else {
        (0.0, 0.0)
    };
    let restore = |w: &FieldPair| {
        let mut full = w.clone();
        full.u_hat[0] += p;
        full.v_hat[0] += q;
        full
    };

    let reference = conserved_quantities(state, grid, cfg.alpha);
    let mut monitor = vec![MonitorRow { time: state.time, conserved: reference }];
    let mut drift = ConservedSet::default();
    let mut warnings = Vec::new();
    let kmax = grid.wavenumbers().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut stepper = Stepper::new(grid, cfg, p, q, h);
    let mut warned = false;

    let (mut u, mut v) = (work.u_hat, work.v_hat);
    for step in 1..=steps {
        if !warned {
            let amplitude: f64 = u.iter().chain(&v).map(|z| z.norm()).sum();
            if h * kmax * amplitude > STAGE_BOUND {
                warnings.push(format!(
                    "CFLWarning: dt * max|xi| * amplitude = {:.3} exceeds {STAGE_BOUND} at step {step}",
                    h * kmax * amplitude
                ));
                warned = true;
            }
        }
        match cfg.scheme {
            Scheme::Ifrk4 => stepper.ifrk4(&mut u, &mut v, h),
            Scheme::Etdrk4 => stepper.etdrk4(&mut u, &mut v),
        }
        let mut current = FieldPair { u_hat: u, v_hat: v, time: state.time + step as f64 * h };
        current.enforce_hermitian();
        let magnitude = current.max_coefficient();
        if !(magnitude <= OVERFLOW_GUARD) {
            return Err(SpectralError::BlowupDetected { time: current.time, magnitude });
        }
        let sample = step == steps || (cfg.monitor_stride > 0 && step % cfg.monitor_stride == 0);
        if sample {
            let c = conserved_quantities(&restore(&current), grid, cfg.alpha);
            drift = drift.max_with(&c.drift_from(&reference));
            monitor.push(MonitorRow { time: current.time, conserved: c });
        }
        u = current.u_hat;
        v = current.v_hat;
    }
    let mut out = restore(&FieldPair { u_hat: u, v_hat: v, time: state.time + steps as f64 * h });
    out.time = state.time + cfg.t_final;
    Ok(Evolution { state: out, steps, monitor, drift, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energies_of_single_modes() {
        let g = TorusGrid::new(1.0, 32).unwrap();
        let pi = std::f64::consts::PI;
        let c = conserved_quantities(&FieldPair::from_fn(&g, f64::cos, |_| 0.0), &g, 0.5);
        assert!(c.e1.abs() < 1e-14 && (c.e3 - pi).abs() < 1e-13 && (c.e4 - pi / 2.0).abs() < 1e-13);
        let c = conserved_quantities(&FieldPair::from_fn(&g, |_| 0.0, f64::cos), &g, 0.5);
        assert!((c.e3 - pi).abs() < 1e-13 && (c.e4 - pi / 4.0).abs() < 1e-13);
    }

    #[test]
    fn cubic_term_is_exact_for_resolved_modes() {
        let g = TorusGrid::new(1.0, 16).unwrap();
        // u v^2 with u = cos 4x, v = cos 2x has mean 1/4
        let s = FieldPair::from_fn(&g, |x| (4.0 * x).cos(), |x| (2.0 * x).cos());
        assert!((cubic_mean(&s) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn means_are_split_off() {
        let g = TorusGrid::new(1.0, 16).unwrap();
        let r = mean_zero_reduce(&FieldPair::from_fn(&g, |x| 2.0 + x.sin(), |_| 3.0));
        assert!((r.p - 2.0).abs() < 1e-15 && (r.q - 3.0).abs() < 1e-15);
        assert_eq!(r.shifted.u_hat[0], Complex64::default());
    }
}
