//! Exact evaluation of bilinear spike families, sharpness scans, modulation
//! counting near the resonance set and the rectangle convolution bound.
//!
//! A spike family puts each input on a single frequency with a `tau`-support
//! of half-width 1 (first input) or 2 (second input) around its dispersion
//! curve. Because the frequencies are single points the operator reduces to a
//! one-dimensional convolution in the modulation variable, which is
//! integrated piecewise by Gauss-Legendre between its kinks.
//!
//! Norms use counting measure in frequency and Lebesgue measure in `tau`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::picard::least_squares;
use crate::quadrature::GaussLegendre;
use crate::resonance::{c_roots, cutoff, gamma_f64, resonance_gap_integer, Alpha, ResonanceError};
use crate::surd::ratio_to_f64;

const RULE_POINTS: usize = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BilinearError {
    #[error("family {case:?} does not match the weight dispersions")]
    InconsistentFamily { case: CaseId },
    #[error("c1 * {0} is not an integer")]
    NotResonant(u64),
    #[error("need at least {needed} frequencies for a slope, got {found}")]
    InsufficientWitnesses { found: usize, needed: usize },
    #[error("|xi| = {xi} does not exceed the cutoff {cutoff}")]
    XiBelowCutoff { xi: f64, cutoff: f64 },
    #[error("rectangles have different dimensions")]
    DimensionMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
}

/// Which dispersion curve a modulation weight is measured from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Dispersion {
    /// `tau - xi^3`
    Cubic,
    /// `tau - alpha xi^3`
    AlphaCubic,
}

impl Dispersion {
    fn curve(self, alpha: &BigRational, xi: i64) -> BigRational {
        let c = BigRational::from_integer(BigInt::from(xi).pow(3));
        match self {
            Dispersion::Cubic => c,
            Dispersion::AlphaCubic => alpha * c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightSpec {
    pub s: f64,
    pub b: f64,
    pub dispersion_left: Dispersion,
    pub dispersion_right: Dispersion,
    pub dispersion_out: Dispersion,
}

impl WeightSpec {
    /// Output on the `u` curve, both inputs on the `v` curve.
    pub fn first_form(s: f64, b: f64) -> Self {
        Self { s, b, dispersion_left: Dispersion::AlphaCubic, dispersion_right: Dispersion::AlphaCubic, dispersion_out: Dispersion::Cubic }
    }

    /// Output on the `v` curve, inputs on the `u` and `v` curves.
    pub fn second_form(s: f64, b: f64) -> Self {
        Self { s, b, dispersion_left: Dispersion::Cubic, dispersion_right: Dispersion::AlphaCubic, dispersion_out: Dispersion::AlphaCubic }
    }

    fn dispersions(&self) -> (Dispersion, Dispersion, Dispersion) {
        (self.dispersion_left, self.dispersion_right, self.dispersion_out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[allow(non_camel_case_types)]
pub enum CaseId {
    C1_Rational,
    C2_LowHigh,
    C2_NearestPair,
    C2_Dual,
    P2_MeanBreak,
}

impl CaseId {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::C1_Rational => "C1_Rational",
            CaseId::C2_LowHigh => "C2_LowHigh",
            CaseId::C2_NearestPair => "C2_NearestPair",
            CaseId::C2_Dual => "C2_Dual",
            CaseId::P2_MeanBreak => "P2_MeanBreak",
        }
    }

    /// The weight form whose dispersions this case is built for.
    pub fn weights(self, s: f64, b: f64) -> WeightSpec {
        match self {
            CaseId::C1_Rational | CaseId::C2_LowHigh | CaseId::C2_NearestPair => WeightSpec::first_form(s, b),
            CaseId::C2_Dual | CaseId::P2_MeanBreak => WeightSpec::second_form(s, b),
        }
    }

    /// Dual families move the `1 - b` weight onto the first input.
    fn is_dual(self) -> bool {
        self == CaseId::C2_Dual
    }

    fn dispersions(self) -> (Dispersion, Dispersion, Dispersion) {
        self.weights(0.0, 0.0).dispersions()
    }
}

/// Two single-frequency inputs with interval `tau`-supports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpikeFamily {
    pub case_id: CaseId,
    pub n: u64,
    /// Frequencies of the first and second input.
    pub frequencies: (i64, i64),
    pub tau_half_widths: (f64, f64),
    /// Heights of the two indicators; zero gives the trivial family.
    pub amplitudes: (f64, f64),
    /// Offsets of the input `tau`-centers from their curves.
    #[serde(skip)]
    pub input_shifts: (BigRational, BigRational),
    /// Offset of the output weight's center from its curve.
    #[serde(skip)]
    pub output_shift: BigRational,
}

impl SpikeFamily {
    fn with(case_id: CaseId, n: u64, left: i64, right: i64) -> Self {
        let zero = BigRational::from_integer(BigInt::from(0));
        Self {
            case_id,
            n,
            frequencies: (left, right),
            tau_half_widths: (1.0, 2.0),
            amplitudes: (1.0, 1.0),
            input_shifts: (zero.clone(), zero.clone()),
            output_shift: zero,
        }
    }

    /// Exact resonance `xi1 = c1 N`, `xi2 = c2 N`.
    pub fn rational(alpha: &Alpha, n: u64) -> Result<Self, BilinearError> {
        let record = resonance_gap_integer(alpha, n)?;
        if !record.gap_exact.is_zero() {
            return Err(BilinearError::NotResonant(n));
        }
        Ok(Self::with(CaseId::C1_Rational, n, record.nearest_c1n, record.nearest_c2n))
    }

    /// `xi1 = 1`, `xi2 = N - 1`.
    pub fn low_high(n: u64) -> Self {
        Self::with(CaseId::C2_LowHigh, n, 1, n as i64 - 1)
    }

    /// Nearest integers to `c1 N` and `c2 N`.
    pub fn nearest_pair(alpha: &Alpha, n: u64) -> Result<Self, BilinearError> {
        let record = resonance_gap_integer(alpha, n)?;
        Ok(Self::with(CaseId::C2_NearestPair, n, record.nearest_c1n, record.nearest_c2n))
    }

    /// Dual form: first input on the `u` curve at `N`, second at `xi2`, output at `N - xi2`.
    pub fn dual(n: u64, xi2: i64) -> Self {
        Self::with(CaseId::C2_Dual, n, n as i64, xi2)
    }

    /// Dual form with `xi2 = [c2 N]`.
    pub fn nearest_dual(alpha: &Alpha, n: u64) -> Result<Self, BilinearError> {
        let record = resonance_gap_integer(alpha, n)?;
        Ok(Self::dual(n, record.nearest_c2n))
    }

    /// Zero-frequency spike on the `u` curve against `N` on the `v` curve.
    pub fn mean_break(n: u64) -> Self {
        Self::with(CaseId::P2_MeanBreak, n, 0, n as i64)
    }

    pub fn output_frequency(&self) -> i64 {
        let (l, r) = self.frequencies;
        if self.case_id.is_dual() {
            l - r
        } else {
            l + r
        }
    }

    /// Translate both input centers by `c` and the output weight consistently.
    pub fn shifted(mut self, c: &BigRational) -> Self {
        self.input_shifts.0 += c;
        self.input_shifts.1 += c;
        if !self.case_id.is_dual() {
            self.output_shift += c + c;
        }
        self
    }

    /// Exact offset between the output modulation and the sum of input modulations.
    pub fn modulation_offset(&self, alpha: &Alpha) -> BigRational {
        let a = alpha.as_rational();
        let (dl, dr, dout) = self.case_id.dispersions();
        let (l, r) = self.frequencies;
        let sign = if self.case_id.is_dual() { -1 } else { 1 };
        let right = dr.curve(&a, r) + &self.input_shifts.1;
        let right = if sign < 0 { -right } else { right };
        dl.curve(&a, l) + &self.input_shifts.0 + right - dout.curve(&a, self.output_frequency()) - &self.output_shift
    }

    fn norms(&self) -> (f64, f64) {
        let (a, b) = self.amplitudes;
        let (w1, w2) = self.tau_half_widths;
        (a.abs() * (2.0 * w1).sqrt(), b.abs() * (2.0 * w2).sqrt())
    }
}

fn bracket_pow(x: f64, e: f64) -> f64 {
    (1.0 + x.abs()).powf(e)
}

/// `s`-independent part of the ratio.
#[derive(Clone, Copy, Debug)]
struct Profile {
    /// `||output weight * convolution||_{L^2}` divided by the input norms.
    integral: f64,
    frequencies: (f64, f64, f64),
}

fn profile(alpha: &Alpha, b: f64, family: &SpikeFamily) -> Profile {
    let dual = family.case_id.is_dual();
    let (el, er, eout) = if dual { (b - 1.0, -b, -b) } else { (-b, -b, b - 1.0) };
    let (wl, wr) = family.tau_half_widths;
    let (al, ar) = family.amplitudes;
    let offset = ratio_to_f64(&family.modulation_offset(alpha));
    let (nl, nr) = family.norms();
    let (l, r) = family.frequencies;
    let out = family.output_frequency();
    // numerator frequency is the sum of the other two
    let frequencies = if dual { (l as f64, out as f64, r as f64) } else { (out as f64, l as f64, r as f64) };
    if nl == 0.0 || nr == 0.0 {
        return Profile { integral: 0.0, frequencies };
    }
    let rule = GaussLegendre::new(RULE_POINTS);

    // convolution at z = sigma - offset; the second input is even, so both forms agree
    let conv = |z: f64| -> f64 {
        let lo = (-wl).max(z - wr);
        let hi = wl.min(z + wr);
        if lo >= hi {
            return 0.0;
        }
        let mut cuts = vec![lo, hi];
        for c in [0.0, z] {
            if c > lo && c < hi {
                cuts.push(c);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .map(|w| rule.integrate(w[0], w[1], |y| bracket_pow(y, el) * bracket_pow(z - y, er)))
            .sum::<f64>()
            * al
            * ar
    };
    let span = wl + wr;
    let mut cuts = vec![-span, span];
    for c in [-wl - wr, -wr + wl, -wl + wr, wl - wr, -wl, wl, -wr, wr, 0.0, -offset] {
        if c > -span && c < span {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let sq: f64 = cuts
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], |z| (bracket_pow(offset + z, eout) * conv(z)).powi(2)))
        .sum();
    Profile { integral: sq.sqrt() / (nl * nr), frequencies }
}

fn multiplier(s: f64, (xi, xi1, xi2): (f64, f64, f64)) -> f64 {
    xi.abs() * ((bracket_pow(xi, 1.0).ln() - bracket_pow(xi1, 1.0).ln() - bracket_pow(xi2, 1.0).ln()) * s).exp()
}

/// `||B(f, g)|| / (||f|| ||g||)` for a spike family, evaluated exactly in frequency
/// and by piecewise Gauss-Legendre in the modulation variable.
pub fn spike_ratio(alpha: &Alpha, weights: &WeightSpec, family: &SpikeFamily) -> Result<f64, BilinearError> {
    if family.case_id.dispersions() != weights.dispersions() {
        return Err(BilinearError::InconsistentFamily { case: family.case_id });
    }
    let p = profile(alpha, weights.b, family);
    Ok(multiplier(weights.s, p.frequencies) * p.integral)
}

/// Largest of the three modulations over sampled support points minus the
/// lower bound `|offset| - (half-width sum)`; nonnegative when the
/// maximum-modulation inequality holds at every sample.
pub fn max_modulation_margin(alpha: &Alpha, family: &SpikeFamily, samples: usize) -> f64 {
    let offset = ratio_to_f64(&family.modulation_offset(alpha));
    let (wl, wr) = family.tau_half_widths;
    let sign = if family.case_id.is_dual() { -1.0 } else { 1.0 };
    let k = samples.max(2);
    let mut worst = f64::INFINITY;
    for i in 0..k {
        let yl = -wl + 2.0 * wl * i as f64 / (k - 1) as f64;
        for j in 0..k {
            let yr = -wr + 2.0 * wr * j as f64 / (k - 1) as f64;
            let sigma = yl + sign * yr + offset;
            let largest = yl.abs().max(yr.abs()).max(sigma.abs());
            worst = worst.min(largest - (offset.abs() - (wl + wr)));
        }
    }
    worst
}

/// Row of a ratio table.
#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub case_id: &'static str,
    pub alpha: String,
    pub s: f64,
    pub b: f64,
    pub n: u64,
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum ThresholdEstimate {
    /// Linear interpolation of the sign change of the slope.
    Crossing(f64),
    /// Slopes stay positive on the whole grid.
    AtLeast(f64),
    /// Slopes are negative on the whole grid.
    AtMost(f64),
}

impl ThresholdEstimate {
    pub fn value(&self) -> f64 {
        match *self {
            ThresholdEstimate::Crossing(v) | ThresholdEstimate::AtLeast(v) | ThresholdEstimate::AtMost(v) => v,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdScan {
    pub b: f64,
    /// `(s, slope of log ratio against log N)`.
    pub slopes: Vec<(f64, f64)>,
    pub estimate: ThresholdEstimate,
    pub rows: Vec<RatioRow>,
}

/// Slopes of the nearest-pair family in `N` across a grid of `s`, and the
/// regularity where they change sign.
pub fn threshold_scan(alpha: &Alpha, b: f64, s_grid: &[f64], n_list: &[u64]) -> Result<ThresholdScan, BilinearError> {
    if n_list.len() < 4 {
        return Err(BilinearError::InsufficientWitnesses { found: n_list.len(), needed: 4 });
    }
    if s_grid.is_empty() {
        return Err(BilinearError::InvalidArgument("empty s grid".into()));
    }
    let mut profiles = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let family = SpikeFamily::nearest_pair(alpha, n)?;
        profiles.push((n, profile(alpha, b, &family)));
    }
    let xs: Vec<f64> = n_list.iter().map(|&n| (n as f64).ln()).collect();
    let mut slopes = Vec::with_capacity(s_grid.len());
    let mut rows = Vec::new();
    for &s in s_grid {
        let ys: Vec<f64> = profiles.iter().map(|(_, p)| (multiplier(s, p.frequencies) * p.integral).ln()).collect();
        slopes.push((s, least_squares(&xs, &ys).slope));
        for ((n, _), y) in profiles.iter().zip(&ys) {
            rows.push(RatioRow { case_id: CaseId::C2_NearestPair.as_str(), alpha: alpha.to_string(), s, b, n: *n, ratio: y.exp() });
        }
    }
    let mut sorted = slopes.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let crossing = sorted.windows(2).find(|w| w[0].1 > 0.0 && w[1].1 <= 0.0).map(|w| {
        let ((s0, m0), (s1, m1)) = (w[0], w[1]);
        s0 + (s1 - s0) * m0 / (m0 - m1)
    });
    let estimate = match crossing {
        Some(s) => ThresholdEstimate::Crossing(s),
        None if sorted.iter().all(|(_, m)| *m > 0.0) => ThresholdEstimate::AtLeast(sorted[sorted.len() - 1].0),
        None => ThresholdEstimate::AtMost(sorted[0].0),
    };
    Ok(ThresholdScan { b, slopes, estimate, rows })
}

/// Frequencies `N` at which `c1 N` is an integer, up to `n_max`.
pub fn resonant_frequencies(alpha: &Alpha, n_max: u64) -> Result<Vec<u64>, BilinearError> {
    let (c1, _) = c_roots(alpha)?;
    let Some(r) = c1.as_surd().and_then(|c| c.as_rational()) else {
        return Ok(Vec::new());
    };
    let q = r.denom().to_u64().unwrap_or(u64::MAX);
    Ok((1..).map(|j| j * q).take_while(|&n| n <= n_max).collect())
}

/// Measure of attainable modulations in one dyadic annulus.
#[derive(Clone, Debug, Serialize)]
pub struct OmegaCount {
    pub xi: f64,
    pub lambda: f64,
    pub m_dyadic: f64,
    pub measure: f64,
    /// `lambda * M^(2/3)`.
    pub bound: f64,
    pub window_constant: f64,
    pub applicable: bool,
}

/// Measure of the union of windows `[G - w, G + w]`, `w = c |G|^(1/100)`,
/// around `G = Gamma_xi(xi1)` over lattice `xi1`, inside `M/2 <= |eta| <= 2M`.
pub fn omega_count(alpha: &Alpha, lambda: f64, xi: f64, m_dyadic: f64, window_constant: f64) -> Result<OmegaCount, BilinearError> {
    if !(lambda > 0.0) || !(m_dyadic >= 1.0) || !(window_constant >= 0.0) {
        return Err(BilinearError::InvalidArgument(format!(
            "need lambda > 0, M >= 1, window constant >= 0 (got {lambda}, {m_dyadic}, {window_constant})"
        )));
    }
    let cut = cutoff(alpha)?;
    if xi.abs() <= cut {
        return Err(BilinearError::XiBelowCutoff { xi: xi.abs(), cutoff: cut });
    }
    let a = alpha.to_f64();
    let reach = xi.abs() + (2.0 * m_dyadic / (3.0 * a * xi.abs())).sqrt() + 1.0;
    let j_max = (reach * lambda).floor() as i64;
    let (inner, outer) = (m_dyadic / 2.0, 2.0 * m_dyadic);
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for j in -j_max..=j_max {
        let g = gamma_f64(a, xi, j as f64 / lambda);
        let w = window_constant * g.abs().powf(0.01);
        let (lo, hi) = (g - w, g + w);
        // intersect with both halves of the annulus
        for (alo, ahi) in [(inner, outer), (-outer, -inner)] {
            let (l, h) = (lo.max(alo), hi.min(ahi));
            if l < h {
                pieces.push((l, h));
            }
        }
    }
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut measure = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for (l, h) in pieces {
        current = match current {
            Some((cl, ch)) if l <= ch => Some((cl, ch.max(h))),
            Some((cl, ch)) => {
                measure += ch - cl;
                Some((l, h))
            }
            None => Some((l, h)),
        };
    }
    if let Some((cl, ch)) = current {
        measure += ch - cl;
    }
    Ok(OmegaCount {
        xi,
        lambda,
        m_dyadic,
        measure,
        bound: lambda * m_dyadic.powf(2.0 / 3.0),
        window_constant,
        applicable: true,
    })
}

/// Axis-aligned rectangle in the `(xi, tau)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rectangle {
    pub center: (f64, f64),
    pub half_widths: (f64, f64),
}

impl Rectangle {
    pub fn new(center: (f64, f64), half_widths: (f64, f64)) -> Result<Self, BilinearError> {
        if !(half_widths.0 > 0.0 && half_widths.1 > 0.0) {
            return Err(BilinearError::InvalidArgument("half-widths must be positive".into()));
        }
        Ok(Self { center, half_widths })
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_widths.0 * self.half_widths.1
    }
}

/// `chi_R * chi_S` at a point, as a product of one-dimensional tents.
pub fn rect_convolution(r: &Rectangle, other: &Rectangle, point: (f64, f64)) -> f64 {
    let tent = |x: f64, c: f64, h1: f64, h2: f64| ((h1 + h2) - (x - c).abs()).min(2.0 * h1.min(h2)).max(0.0);
    tent(point.0, r.center.0 + other.center.0, r.half_widths.0, other.half_widths.0)
        * tent(point.1, r.center.1 + other.center.1, r.half_widths.1, other.half_widths.1)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RectangleCheck {
    pub holds: bool,
    /// Smallest value of `conv / (area / 4)` over the samples.
    pub min_ratio: f64,
    /// The bound is attained at all four corners.
    pub equality_at_corners: bool,
}

/// Checks `chi_R * chi_S >= area(R) / 4` on a `k x k` grid of the rectangle
/// centered at the sum of centers with the common dimensions.
pub fn rect_conv_lower_bound(r: &Rectangle, other: &Rectangle, sample_points: usize) -> Result<RectangleCheck, BilinearError> {
    if r.half_widths != other.half_widths {
        return Err(BilinearError::DimensionMismatch);
    }
    let k = sample_points.max(2);
    let quarter = r.area() / 4.0;
    let (cx, ct) = (r.center.0 + other.center.0, r.center.1 + other.center.1);
    let (hx, ht) = r.half_widths;
    let mut min_ratio = f64::INFINITY;
    for i in 0..k {
        let x = cx - hx + 2.0 * hx * i as f64 / (k - 1) as f64;
        for j in 0..k {
            let t = ct - ht + 2.0 * ht * j as f64 / (k - 1) as f64;
            min_ratio = min_ratio.min(rect_convolution(r, other, (x, t)) / quarter);
        }
    }
    let corners = [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)];
    let equality_at_corners = corners.iter().all(|(sx, st)| {
        let v = rect_convolution(r, other, (cx + sx * hx, ct + st * ht));
        (v - quarter).abs() <= 1e-12 * quarter
    });
    Ok(RectangleCheck { holds: min_ratio >= 1.0 - 1e-12, min_ratio, equality_at_corners })
}
