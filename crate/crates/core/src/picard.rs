//! Second and third Picard iterates for resonant initial data and their
//! Sobolev growth in the frequency `N`.
//!
//! Data: `u(0) = 0`, `v(0) = psi = N^(-s) (cos k1 x + cos k2 x)` with
//! `k1 = [c1 N]`, `k2 = N - k1`. Then `phi1 = 0`, `psi2 = 0` and
//!
//! ```text
//! phi2 = -int_0^t S(t - t') d_x (psi1^2)(t') dt'
//! psi3 = -3 int_0^t S_alpha(t - t') d_x (phi2 psi1)(t') dt'
//! ```
//!
//! with Fourier phases `e^{i xi^3 t}` for `S` and `e^{i alpha xi^3 t}` for
//! `S_alpha`. Norms use `||f||^2 = 2 pi sum <xi>^{2s} |c_xi|^2`, `<xi> = 1 + |xi|`,
//! for `f = sum c_xi e^{i xi x}` on the torus of length `2 pi`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::quadrature::GaussLegendre;
use crate::resonance::{c_roots, resonance_gap_integer, Alpha, ResonanceError};
use crate::surd::ratio_to_f64;

/// Fewest quadrature nodes allowed per oscillation of the fastest phase.
pub const MIN_NODES_PER_OSCILLATION: f64 = 64.0;
/// Largest evaluation time accepted.
pub const MAX_TIME: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PicardError {
    #[error("c1 * {0} is not an integer, so the resonance is not exact")]
    NotRationalResonance(u64),
    #[error("evaluation time {0} is outside [0, 0.1]")]
    TimeOutOfRange(f64),
    #[error("{nodes} quadrature nodes resolve fewer than 64 per oscillation (need {required})")]
    QuadratureUnderResolved { nodes: usize, required: usize },
    #[error("a fit needs at least {needed} entries, got {found}")]
    InsufficientEntries { found: usize, needed: usize },
    #[error("cannot fit a power law through a zero norm")]
    DegenerateFit,
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
}

/// How the resonant gap enters the closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PicardMode {
    /// `c1 N` is an integer and the gap vanishes identically.
    RationalCase,
    /// Nearest-integer pair with the exact integer gap.
    NearestInteger,
}

/// A Fourier mode `amp * e^{i freq t}` of a linear solution.
#[derive(Clone, Copy, Debug)]
struct Wave {
    amp: f64,
    freq: f64,
}

/// The linear evolution `psi1` of the initial data, keyed by frequency.
#[derive(Clone, Debug)]
struct InitialWaves {
    modes: BTreeMap<i64, Wave>,
    exact_freq: BTreeMap<i64, BigRational>,
    k1: i64,
    k2: i64,
}

impl InitialWaves {
    fn new(alpha: &Alpha, s: f64, k1: i64, k2: i64, n: u64) -> Self {
        let a = alpha.as_rational();
        let amp = (n as f64).powf(-s);
        let mut modes: BTreeMap<i64, Wave> = BTreeMap::new();
        let mut exact_freq = BTreeMap::new();
        for k in [k1, k2] {
            for (key, weight) in [(k, 0.5), (-k, 0.5)] {
                let f = &a * cube(key);
                let w = modes.entry(key).or_insert(Wave { amp: 0.0, freq: ratio_to_f64(&f) });
                w.amp += weight * amp;
                exact_freq.insert(key, f);
            }
        }
        Self { modes, exact_freq, k1, k2 }
    }

    /// Pairs `(a, b)` of modes with `a + b = xi`.
    fn pairs(&self, xi: i64) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.modes.keys().filter_map(move |&a| self.modes.contains_key(&(xi - a)).then_some((a, xi - a)))
    }

    fn square_modes(&self) -> Vec<i64> {
        let mut out: Vec<i64> = Vec::new();
        for a in self.modes.keys() {
            for b in self.modes.keys() {
                let x = a + b;
                if x != 0 && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn output_modes(&self) -> Vec<i64> {
        let mut v = vec![self.k1, -self.k1, self.k2, -self.k2];
        v.sort_unstable();
        v.dedup();
        v
    }

    /// `omega_a + omega_b - xi^3`, exactly.
    fn detuning(&self, a: i64, b: i64) -> f64 {
        ratio_to_f64(&(&self.exact_freq[&a] + &self.exact_freq[&b] - cube(a + b)))
    }
}

fn cube(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k).pow(3))
}

fn bracket(xi: f64) -> f64 {
    1.0 + xi.abs()
}

/// `H^s` norm of a mode map.
fn sobolev_norm(coeffs: &BTreeMap<i64, Complex64>, s: f64) -> f64 {
    let sum: f64 = coeffs.iter().map(|(&k, c)| bracket(k as f64).powf(2.0 * s) * c.norm_sqr()).sum();
    (2.0 * PI * sum).sqrt()
}

/// `int_0^t r^p e^{i nu r} dr`.
fn moment(p: u32, nu: f64, t: f64) -> Complex64 {
    let i = Complex64::i();
    if (nu * t).abs() < 1.0 {
        // power series in nu t
        let mut sum = Complex64::zero();
        let mut term = Complex64::new(t.powi(p as i32 + 1), 0.0);
        for k in 0..60u32 {
            let piece = term / f64::from(p + k + 1);
            sum += piece;
            if piece.norm() < 1e-18 * sum.norm() {
                break;
            }
            term *= i * nu * t / f64::from(k + 1);
        }
        return sum;
    }
    let e = (i * nu * t).exp();
    let mut m = (e - 1.0) / (i * nu);
    for q in 1..=p {
        m = (e * t.powi(q as i32) - m * f64::from(q)) / (i * nu);
    }
    m
}

/// `int_0^t e^{i nu r} int_0^r e^{i mu w} dw dr`.
fn nested_moment(nu: f64, mu: f64, t: f64) -> Complex64 {
    let i = Complex64::i();
    if (mu * t).abs() >= 1e-4 {
        (moment(0, nu + mu, t) - moment(0, nu, t)) / (i * mu)
    } else {
        // expand e^{i mu w} to third order
        let mut sum = Complex64::zero();
        let mut coeff = Complex64::new(1.0, 0.0);
        for k in 0..4u32 {
            sum += coeff * moment(k + 1, nu, t) / f64::from(k + 1);
            coeff *= i * mu / f64::from(k + 1);
        }
        sum
    }
}

/// Norms of the closed-form resonant channel.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedForm {
    pub n: u64,
    pub k1: i64,
    pub k2: i64,
    pub phi2_norm: f64,
    pub psi3_norm: f64,
    /// Largest `|c_xi|` of `psi3` over the channel.
    pub psi3_peak: f64,
    /// Bound on the `H^s` norm of the `phi2` modes other than `+-N`.
    pub phi2_remainder_bound: f64,
    /// Bound on the `H^s` norm of the `psi3` terms fed by those modes.
    pub psi3_remainder_bound: f64,
    pub gap: f64,
    pub theta: f64,
}

/// Analytic evaluation of the resonant channel of `phi2` and `psi3`.
///
/// The channel is the pair of `phi2` modes at `+-N` fed by the resonant
/// products of `psi1`, and the part of `psi3` they drive back onto
/// `+-k1, +-k2`. Its Duhamel integrals are exponential moments evaluated in
/// closed form; at zero gap they reduce to the secular `t N^(1-2s)` growth.
pub fn picard_closed_form(alpha: &Alpha, s: f64, n: u64, t: f64, mode: PicardMode) -> Result<ClosedForm, PicardError> {
    if !(0.0..=MAX_TIME).contains(&t) {
        return Err(PicardError::TimeOutOfRange(t));
    }
    let record = resonance_gap_integer(alpha, n)?;
    if mode == PicardMode::RationalCase {
        let (c1, _) = c_roots(alpha)?;
        let exact = c1.as_surd().is_some_and(|c| c.scale(&BigRational::from_integer(n.into())).as_rational().is_some_and(|r| r.is_integer()));
        if !exact {
            return Err(PicardError::NotRationalResonance(n));
        }
    }
    let (k1, k2) = (record.nearest_c1n, record.nearest_c2n);
    let waves = InitialWaves::new(alpha, s, k1, k2, n);
    let i = Complex64::i();
    let big_n = n as i64;

    let phi2_at = |xi: i64, time: f64| -> Complex64 {
        let mut acc = Complex64::zero();
        for (a, b) in waves.pairs(xi) {
            let mu = waves.detuning(a, b);
            acc += waves.modes[&a].amp * waves.modes[&b].amp * moment(0, mu, time);
        }
        let x = xi as f64;
        -i * x * (i * x.powi(3) * time).exp() * acc
    };

    let mut phi2 = BTreeMap::new();
    for xi in [big_n, -big_n] {
        phi2.insert(xi, phi2_at(xi, t));
    }

    let mut psi3 = BTreeMap::new();
    for m in waves.output_modes() {
        let mut acc = Complex64::zero();
        for xi in [big_n, -big_n] {
            let Some(wb) = waves.modes.get(&(m - xi)) else { continue };
            let x = xi as f64;
            for (a, b) in waves.pairs(xi) {
                let mu = waves.detuning(a, b);
                let nu = ratio_to_f64(&(cube(xi) + &waves.exact_freq[&(m - xi)] - alpha.as_rational() * cube(m)));
                let weight = waves.modes[&a].amp * waves.modes[&b].amp * wb.amp;
                acc += -i * x * weight * nested_moment(nu, mu, t);
            }
        }
        let mf = m as f64;
        let phase = (i * alpha.to_f64() * mf.powi(3) * t).exp();
        *psi3.entry(m).or_insert(Complex64::zero()) += -3.0 * i * mf * phase * acc;
    }

    let (phi2_rem, psi3_rem) = remainder_bounds(&waves, s, t, big_n);
    Ok(ClosedForm {
        n,
        k1,
        k2,
        phi2_norm: sobolev_norm(&phi2, s),
        psi3_norm: sobolev_norm(&psi3, s),
        psi3_peak: psi3.values().map(|c| c.norm()).fold(0.0, f64::max),
        phi2_remainder_bound: phi2_rem,
        psi3_remainder_bound: psi3_rem,
        gap: record.gap,
        theta: record.theta,
    })
}

/// Bounds on the dropped non-resonant terms.
fn remainder_bounds(waves: &InitialWaves, s: f64, t: f64, big_n: i64) -> (f64, f64) {
    let mut phi2 = BTreeMap::new();
    for xi in waves.square_modes() {
        if xi.abs() == big_n {
            continue;
        }
        let mut bound = 0.0;
        for (a, b) in waves.pairs(xi) {
            let mu = waves.detuning(a, b).abs();
            let integral = if mu > 0.0 { t.min(2.0 / mu) } else { t };
            bound += waves.modes[&a].amp * waves.modes[&b].amp * integral;
        }
        phi2.insert(xi, Complex64::new(xi.abs() as f64 * bound, 0.0));
    }
    let mut psi3: BTreeMap<i64, Complex64> = BTreeMap::new();
    for (&xi, c) in &phi2 {
        for (&b, wb) in &waves.modes {
            let m = xi + b;
            *psi3.entry(m).or_insert(Complex64::zero()) += 3.0 * (m.abs() as f64) * c.re * wb.amp * t;
        }
    }
    (sobolev_norm(&phi2, s), sobolev_norm(&psi3, s))
}

/// Quadrature options.
#[derive(Clone, Debug)]
pub struct QuadratureOptions {
    /// Gauss-Legendre points per panel.
    pub order: usize,
    /// Panel count; chosen from the fastest phase when `None`.
    pub panels: Option<usize>,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { order: 16, panels: None }
    }
}

/// Norms of numerically integrated iterates.
#[derive(Clone, Debug, Serialize)]
pub struct QuadratureNorms {
    pub n: u64,
    pub phi2_norm: f64,
    pub psi3_norm: f64,
    /// `phi2` restricted to the modes `+-N`.
    pub phi2_resonant_norm: f64,
    /// `psi3` driven by the `+-N` modes of `phi2`, on `+-k1, +-k2`.
    pub psi3_resonant_norm: f64,
    /// Largest coefficient of `psi2`; zero because `phi1` vanishes.
    pub psi2_max: f64,
    pub nodes: usize,
}

/// Numerical Duhamel integration of `phi2` and `psi3` by composite Gauss-Legendre.
///
/// Inner integrals are accumulated panel by panel; the node count is tied
/// to the fastest phase so every oscillation gets at least 64 nodes.
pub fn picard_quadrature(alpha: &Alpha, s: f64, n: u64, t: f64, options: &QuadratureOptions) -> Result<QuadratureNorms, PicardError> {
    if !(0.0..=MAX_TIME).contains(&t) {
        return Err(PicardError::TimeOutOfRange(t));
    }
    let record = resonance_gap_integer(alpha, n)?;
    let waves = InitialWaves::new(alpha, s, record.nearest_c1n, record.nearest_c2n, n);
    let big_n = n as i64;
    let af = alpha.to_f64();
    let i = Complex64::i();

    // phi1 = 0 because the u-datum vanishes, so psi2 = -2 int S_alpha d_x(phi1 psi1) = 0
    let phi1: BTreeMap<i64, Complex64> = BTreeMap::new();
    let psi2_max = phi1.values().map(|c| c.norm()).fold(0.0, f64::max);

    let square = waves.square_modes();
    let outputs: Vec<i64> = {
        let mut v: Vec<i64> = square
            .iter()
            .flat_map(|xi| waves.modes.keys().map(move |b| xi + b))
            .filter(|m| *m != 0)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let resonant_outputs = waves.output_modes();

    let mut fastest: f64 = 1.0;
    for &xi in &square {
        for (a, b) in waves.pairs(xi) {
            let mu = waves.modes[&a].freq + waves.modes[&b].freq - (xi as f64).powi(3);
            fastest = fastest.max(mu.abs());
            for (&bb, wb) in &waves.modes {
                let m = (xi + bb) as f64;
                let nu = (xi as f64).powi(3) + wb.freq - af * m.powi(3);
                fastest = fastest.max(nu.abs()).max((nu + mu).abs());
            }
        }
    }
    let oscillations = (fastest * t / (2.0 * PI)).max(1.0);
    let required = (MIN_NODES_PER_OSCILLATION * oscillations).ceil() as usize;
    let order = options.order.max(2);
    let panels = options.panels.unwrap_or_else(|| required.div_ceil(order).max(1));
    let nodes = panels * order;
    if nodes < required {
        return Err(PicardError::QuadratureUnderResolved { nodes, required });
    }
    if t == 0.0 {
        return Ok(QuadratureNorms { n, phi2_norm: 0.0, psi3_norm: 0.0, phi2_resonant_norm: 0.0, psi3_resonant_norm: 0.0, psi2_max, nodes });
    }

    let rule = GaussLegendre::new(order);
    let source = |xi: i64, r: f64| -> Complex64 {
        // e^{-i xi^3 r} (psi1^2)^(xi, r)
        let x3 = (xi as f64).powi(3);
        waves
            .pairs(xi)
            .map(|(a, b)| {
                let (wa, wb) = (waves.modes[&a], waves.modes[&b]);
                wa.amp * wb.amp * (i * (wa.freq + wb.freq - x3) * r).exp()
            })
            .sum()
    };

    let h = t / panels as f64;
    let mut accumulated: BTreeMap<i64, Complex64> = square.iter().map(|&xi| (xi, Complex64::zero())).collect();
    let mut psi3_full: BTreeMap<i64, Complex64> = outputs.iter().map(|&m| (m, Complex64::zero())).collect();
    let mut psi3_res: BTreeMap<i64, Complex64> = resonant_outputs.iter().map(|&m| (m, Complex64::zero())).collect();

    for p in 0..panels {
        let (a, b) = (p as f64 * h, (p + 1) as f64 * h);
        for (tp, wt) in rule.mapped(a, b) {
            // phi2(xi, tp) from the accumulated integral plus the partial panel
            let mut phi2_now: BTreeMap<i64, Complex64> = BTreeMap::new();
            for &xi in &square {
                let partial = rule.integrate(a, tp, |r| source(xi, r).re)
                    + i * rule.integrate(a, tp, |r| source(xi, r).im);
                let w = accumulated[&xi] + partial;
                let x = xi as f64;
                phi2_now.insert(xi, -i * x * (i * x.powi(3) * tp).exp() * w);
            }
            for &m in &outputs {
                let mut acc = Complex64::zero();
                let mut acc_res = Complex64::zero();
                for (&bb, wb) in &waves.modes {
                    let Some(c) = phi2_now.get(&(m - bb)) else { continue };
                    let term = c * wb.amp * (i * wb.freq * tp).exp();
                    acc += term;
                    if (m - bb).abs() == big_n {
                        acc_res += term;
                    }
                }
                let mf = m as f64;
                let kernel = (-i * af * mf.powi(3) * tp).exp() * wt;
                *psi3_full.get_mut(&m).expect("mode") += kernel * acc;
                if let Some(r) = psi3_res.get_mut(&m) {
                    *r += kernel * acc_res;
                }
            }
        }
        for &xi in &square {
            let full = rule.integrate(a, b, |r| source(xi, r).re) + i * rule.integrate(a, b, |r| source(xi, r).im);
            *accumulated.get_mut(&xi).expect("mode") += full;
        }
    }

    let mut phi2_final = BTreeMap::new();
    for &xi in &square {
        let x = xi as f64;
        phi2_final.insert(xi, -i * x * (i * x.powi(3) * t).exp() * accumulated[&xi]);
    }
    let finish = |map: &mut BTreeMap<i64, Complex64>| {
        for (&m, c) in map.iter_mut() {
            let mf = m as f64;
            *c *= -3.0 * i * mf * (i * af * mf.powi(3) * t).exp();
        }
    };
    finish(&mut psi3_full);
    finish(&mut psi3_res);
    let resonant_phi2: BTreeMap<i64, Complex64> =
        phi2_final.iter().filter(|(k, _)| k.abs() == big_n).map(|(k, c)| (*k, *c)).collect();

    Ok(QuadratureNorms {
        n,
        phi2_norm: sobolev_norm(&phi2_final, s),
        psi3_norm: sobolev_norm(&psi3_full, s),
        phi2_resonant_norm: sobolev_norm(&resonant_phi2, s),
        psi3_resonant_norm: sobolev_norm(&psi3_res, s),
        psi2_max,
        nodes,
    })
}

/// Ordinary least-squares line with the standard error of its slope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_std_err: f64,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let slope_std_err = if xs.len() > 2 && sxx > 0.0 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    LineFit { slope, intercept, slope_std_err }
}

/// Power-law fit `norm ~ N^slope`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub slope: f64,
    /// 95% confidence half-width from the residual scatter.
    pub half_width: f64,
    pub intercept: f64,
}

/// Least-squares slope of `log norm` against `log N`.
pub fn growth_fit(entries: &[(f64, f64)]) -> Result<GrowthFit, PicardError> {
    if entries.len() < 4 {
        return Err(PicardError::InsufficientEntries { found: entries.len(), needed: 4 });
    }
    if entries.iter().any(|&(_, v)| !(v > 0.0)) {
        return Err(PicardError::DegenerateFit);
    }
    let xs: Vec<f64> = entries.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = entries.iter().map(|(_, v)| v.ln()).collect();
    let fit = least_squares(&xs, &ys);
    let dof = (entries.len() - 2) as f64;
    let quantile = StudentsT::new(0.0, 1.0, dof).map(|d| d.inverse_cdf(0.975)).unwrap_or(f64::NAN);
    Ok(GrowthFit { slope: fit.slope, half_width: quantile * fit.slope_std_err, intercept: fit.intercept })
}

#[derive(Clone, Debug, Serialize)]
pub struct PicardEntry {
    pub n: u64,
    pub phi2_norm: f64,
    pub psi3_norm: f64,
    pub gap: f64,
    pub theta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PicardReport {
    pub alpha: String,
    pub s: f64,
    pub t_eval: f64,
    pub mode: PicardMode,
    pub entries: Vec<PicardEntry>,
    /// `(phi2, psi3)` slopes, present with at least four entries.
    pub fitted_slopes: Option<(GrowthFit, GrowthFit)>,
}

/// Closed-form norms over a list of frequencies with fitted growth exponents.
pub fn picard_scan(alpha: &Alpha, s: f64, ns: &[u64], t: f64, mode: PicardMode) -> Result<PicardReport, PicardError> {
    let mut entries = Vec::with_capacity(ns.len());
    for &n in ns {
        let c = picard_closed_form(alpha, s, n, t, mode)?;
        entries.push(PicardEntry { n, phi2_norm: c.phi2_norm, psi3_norm: c.psi3_norm, gap: c.gap, theta: c.theta });
    }
    let fitted_slopes = if entries.len() >= 4 {
        let phi: Vec<(f64, f64)> = entries.iter().map(|e| (e.n as f64, e.phi2_norm)).collect();
        let psi: Vec<(f64, f64)> = entries.iter().map(|e| (e.n as f64, e.psi3_norm)).collect();
        match (growth_fit(&phi), growth_fit(&psi)) {
            (Ok(a), Ok(b)) => Some((a, b)),
            _ => None,
        }
    } else {
        None
    };
    Ok(PicardReport { alpha: alpha.to_string(), s, t_eval: t, mode, entries, fitted_slopes })
}

/// Multiples of the denominator of `c1` up to `n_max` (exact resonances).
pub fn resonant_multiples(alpha: &Alpha, n_max: u64) -> Result<Vec<u64>, PicardError> {
    let (c1, _) = c_roots(alpha)?;
    let Some(r) = c1.as_surd().and_then(|c| c.as_rational()) else {
        return Ok(Vec::new());
    };
    let q = r.denom().to_u64().unwrap_or(u64::MAX);
    Ok((1..).map(|j| j * q).take_while(|&n| n <= n_max).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_match_direct_quadrature() {
        let rule = GaussLegendre::new(60);
        for &(p, nu, t) in &[(0u32, 0.3, 0.5), (1, 7.0, 0.4), (2, -25.0, 0.2), (3, 0.01, 1.0), (2, 400.0, 0.01)] {
            let re = rule.integrate(0.0, t, |r| r.powi(p as i32) * (nu * r).cos());
            let im = rule.integrate(0.0, t, |r| r.powi(p as i32) * (nu * r).sin());
            let m = moment(p, nu, t);
            assert!((m - Complex64::new(re, im)).norm() < 1e-13, "p = {p}, nu = {nu}");
        }
    }

    #[test]
    fn nested_moment_branches_agree() {
        let (nu, t) = (-30.0, 0.05);
        for mu in [1e-3, 3e-3, 5e-3] {
            let direct = (moment(0, nu + mu, t) - moment(0, nu, t)) / (Complex64::i() * mu);
            let mut series = Complex64::zero();
            let mut coeff = Complex64::new(1.0, 0.0);
            for k in 0..4u32 {
                series += coeff * moment(k + 1, nu, t) / f64::from(k + 1);
                coeff *= Complex64::i() * mu / f64::from(k + 1);
            }
            assert!((direct - series).norm() < 1e-10 * direct.norm());
        }
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(matches!(growth_fit(&[(1.0, 1.0); 3]), Err(PicardError::InsufficientEntries { .. })));
        let with_zero = [(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)];
        assert_eq!(growth_fit(&with_zero), Err(PicardError::DegenerateFit));
    }
}
