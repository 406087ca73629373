//! Resonance roots of the coupled system and resonance gaps on the lattice `Z/lambda`.
//!
//! The c-roots solve `1 = alpha*(c^3 + (1-c)^3)` and the d-roots solve
//! `alpha = d^3 + alpha*(1-d)^3`. Rational coupling constants give exact
//! [`QuadraticSurd`] roots; floating constants are taken at their exact binary
//! value and yield enclosures at [`crate::real::PRECISION_BITS`] bits.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::real::{Real, RealInterval};
use crate::surd::{ratio_to_f64, QuadraticSurd, SurdError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error("alpha must be nonzero")]
    AlphaZero,
    #[error("alpha = {0} is outside the range with real resonance roots")]
    AlphaOutOfRange(String),
    #[error("alpha = 1 makes the d-root formula degenerate")]
    AlphaDegenerate,
    #[error("lambda must be a positive rational, got {0}")]
    InvalidLambda(String),
    #[error("frequency {0} is not on the lattice Z/{1}")]
    NotOnLattice(String, String),
    #[error("search radius {0} excludes both resonant points")]
    RangeTooSmall(String),
    #[error("cannot parse {0:?} as a number")]
    Parse(String),
    #[error("enclosure too wide to decide the nearest integer")]
    PrecisionExhausted,
    #[error(transparent)]
    Surd(#[from] SurdError),
}

/// The dispersion ratio `alpha`, either exact or a floating value.
#[derive(Clone, Debug, PartialEq)]
pub enum Alpha {
    Exact(BigRational),
    Float(f64),
}

impl Alpha {
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Alpha::Exact(BigRational::new(numer.into(), denom.into()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Alpha::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Alpha::Exact(r) => ratio_to_f64(r),
            Alpha::Float(x) => *x,
        }
    }

    /// The exact rational value; a float is read as its binary64 value.
    pub fn as_rational(&self) -> BigRational {
        match self {
            Alpha::Exact(r) => r.clone(),
            Alpha::Float(x) => BigRational::from_float(*x).unwrap_or_else(BigRational::zero),
        }
    }
}

impl FromStr for Alpha {
    type Err = ResonanceError;

    /// `"p/q"` and plain integers parse exactly; anything else is a float.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Ok(r) = parse_rational(t) {
            return Ok(Alpha::Exact(r));
        }
        match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Alpha::Float(x)),
            _ => Err(ResonanceError::Parse(s.to_string())),
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Exact(r) => write!(f, "{r}"),
            Alpha::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Parses `"p/q"` or an integer literal.
pub fn parse_rational(s: &str) -> Result<BigRational, ResonanceError> {
    let err = || ResonanceError::Parse(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(p, q))
        }
        None => t.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| err()),
    }
}

/// Coupling constant together with the spatial period divisor `lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingParameter {
    pub alpha: Alpha,
    pub lambda: BigRational,
}

impl CouplingParameter {
    pub fn new(alpha: Alpha, lambda: BigRational) -> Result<Self, ResonanceError> {
        if alpha.as_rational().is_zero() {
            return Err(ResonanceError::AlphaZero);
        }
        if !lambda.is_positive() {
            return Err(ResonanceError::InvalidLambda(lambda.to_string()));
        }
        Ok(Self { alpha, lambda })
    }
}

fn checked_alpha(alpha: &Alpha) -> Result<BigRational, ResonanceError> {
    let a = alpha.as_rational();
    if a.is_zero() {
        return Err(ResonanceError::AlphaZero);
    }
    if a.is_negative() || a > BigRational::from_integer(4.into()) {
        return Err(ResonanceError::AlphaOutOfRange(alpha.to_string()));
    }
    Ok(a)
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Square root of a non-negative rational on the path chosen by `alpha`.
fn root_of(alpha: &Alpha, r: &BigRational) -> Result<Real, ResonanceError> {
    Ok(match alpha {
        Alpha::Exact(_) => Real::Surd(QuadraticSurd::sqrt_rational(r)?),
        Alpha::Float(_) => Real::Approx(RealInterval::sqrt(r)),
    })
}

/// The c-roots `(c1, c2)`, `c1 >= c2`, `c1 + c2 = 1`.
pub fn c_roots(alpha: &Alpha) -> Result<(Real, Real), ResonanceError> {
    let a = checked_alpha(alpha)?;
    let r = rat(12) / &a - rat(3);
    let s = root_of(alpha, &r)?.mul_rational(&BigRational::new(1.into(), 6.into()));
    let half = BigRational::new(1.into(), 2.into());
    let c1 = s.add_rational(&half);
    let c2 = s.mul_rational(&-BigRational::one()).add_rational(&half);
    Ok((c1, c2))
}

/// The d-roots `(d1, d2)` taking the `+` and `-` branches of the square root.
pub fn d_roots(alpha: &Alpha) -> Result<(Real, Real), ResonanceError> {
    let a = checked_alpha(alpha)?;
    if a.is_one() {
        return Err(ResonanceError::AlphaDegenerate);
    }
    let root = root_of(alpha, &(rat(3) * &a * (rat(4) - &a)))?;
    let scale = (rat(2) * (rat(1) - &a)).recip();
    let shift = -rat(3) * &a * &scale;
    let d1 = root.mul_rational(&scale).add_rational(&shift);
    let d2 = root.mul_rational(&-scale).add_rational(&shift);
    Ok((d1, d2))
}

/// Small-frequency cutoff `6 / sqrt(-3 + 12/alpha)`; infinite at `alpha = 4`.
pub fn cutoff(alpha: &Alpha) -> Result<f64, ResonanceError> {
    let a = checked_alpha(alpha)?;
    let r = ratio_to_f64(&(rat(12) / a - rat(3)));
    Ok(if r == 0.0 { f64::INFINITY } else { 6.0 / r.sqrt() })
}

/// Residual `1 - alpha*c^3 - alpha*(1-c)^3` of the c-root equation.
pub fn c_equation(alpha: &Alpha, c: &Real) -> Real {
    let a = alpha.as_rational();
    let one = Real::rational(BigRational::one());
    let other = one.sub(c);
    c.cube().add(&other.cube()).mul_rational(&-a).add_rational(&BigRational::one())
}

/// Residual `alpha - d^3 - alpha*(1-d)^3` of the d-root equation.
pub fn d_equation(alpha: &Alpha, d: &Real) -> Real {
    let a = alpha.as_rational();
    let one = Real::rational(BigRational::one());
    let other = one.sub(d).cube().mul_rational(&a);
    d.cube().add(&other).mul_rational(&-BigRational::one()).add_rational(&a)
}

/// Resonance roots with the small-frequency cutoff.
#[derive(Clone, Debug)]
pub struct ResonanceRoots {
    pub c1: Real,
    pub c2: Real,
    pub d: Option<(Real, Real)>,
    pub cutoff: f64,
}

impl ResonanceRoots {
    pub fn compute(alpha: &Alpha) -> Result<Self, ResonanceError> {
        let (c1, c2) = c_roots(alpha)?;
        let d = match d_roots(alpha) {
            Ok(pair) => Some(pair),
            Err(ResonanceError::AlphaDegenerate) => None,
            Err(e) => return Err(e),
        };
        Ok(Self { c1, c2, d, cutoff: cutoff(alpha)? })
    }
}

/// `-xi^3 + alpha*xi1^3 + alpha*xi2^3` with `xi2 = xi - xi1`.
pub fn gamma(alpha: &Alpha, xi: &BigRational, xi1: &BigRational) -> BigRational {
    let a = alpha.as_rational();
    let xi2 = xi - xi1;
    -(xi * xi * xi) + &a * (xi1 * xi1 * xi1) + a * (&xi2 * &xi2 * &xi2)
}

/// The factored form `3*alpha*xi*xi1^2 - 3*alpha*xi^2*xi1 - (1-alpha)*xi^3`.
pub fn gamma_factored(alpha: &Alpha, xi: &BigRational, xi1: &BigRational) -> BigRational {
    let a = alpha.as_rational();
    let three_a = rat(3) * &a;
    &three_a * xi * xi1 * xi1 - three_a * xi * xi * xi1 - (rat(1) - a) * xi * xi * xi
}

/// Floating evaluation of [`gamma`].
pub fn gamma_f64(alpha: f64, xi: f64, xi1: f64) -> f64 {
    let xi2 = xi - xi1;
    -xi * xi * xi + alpha * xi1 * xi1 * xi1 + alpha * xi2 * xi2 * xi2
}

/// Floating evaluation of [`gamma_factored`].
pub fn gamma_factored_f64(alpha: f64, xi: f64, xi1: f64) -> f64 {
    3.0 * alpha * xi * xi1 * xi1 - 3.0 * alpha * xi * xi * xi1 - (1.0 - alpha) * xi * xi * xi
}

/// Nearest-integer data and the resonance gap at frequency `n`.
#[derive(Clone, Debug, Serialize)]
pub struct ResonanceGapRecord {
    pub n: u64,
    pub nearest_c1n: i64,
    pub nearest_c2n: i64,
    /// `[c1 n] - c1 n`.
    pub theta: f64,
    /// `|alpha*[c1 n]^3 + alpha*[c2 n]^3 - n^3|`.
    pub gap: f64,
    /// Signed value `alpha*[c1 n]^3 + alpha*[c2 n]^3 - n^3`.
    pub gamma_at_nearest: f64,
    /// `c1 - c2`.
    pub c3: f64,
    #[serde(skip)]
    pub gap_exact: BigRational,
    #[serde(skip)]
    pub alpha: f64,
}

impl ResonanceGapRecord {
    /// Two-term expansion `3*alpha*c3*n^2*theta + 3*alpha*n*theta^2` of the signed gap.
    pub fn expansion(&self) -> f64 {
        let n = self.n as f64;
        3.0 * self.alpha * self.c3 * n * n * self.theta + 3.0 * self.alpha * n * self.theta * self.theta
    }

    /// The same two terms with absolute values taken termwise.
    pub fn absolute_expansion(&self) -> f64 {
        let n = self.n as f64;
        3.0 * self.alpha * self.c3.abs() * n * n * self.theta.abs()
            + 3.0 * self.alpha * n * self.theta * self.theta
    }
}

/// Resonance gap at integer frequency `n` under the half-away rounding rule.
///
/// `[c1 n]` is the nearest integer with ties away from zero and
/// `[c2 n] = n - [c1 n]`, so the pair always sums to `n`.
pub fn resonance_gap_integer(alpha: &Alpha, n: u64) -> Result<ResonanceGapRecord, ResonanceError> {
    let (c1, c2) = c_roots(alpha)?;
    let nb = BigInt::from(n);
    let (k1, theta) = c1.nearest_multiple(&nb).ok_or(ResonanceError::PrecisionExhausted)?;
    let k2 = &nb - &k1;
    let a = alpha.as_rational();
    let cube = |k: &BigInt| BigRational::from_integer(k * k * k);
    let signed = &a * (cube(&k1) + cube(&k2)) - cube(&nb);
    Ok(ResonanceGapRecord {
        n,
        nearest_c1n: k1.to_i64().unwrap_or(i64::MAX),
        nearest_c2n: k2.to_i64().unwrap_or(i64::MIN),
        theta,
        gap: ratio_to_f64(&signed.abs()),
        gamma_at_nearest: ratio_to_f64(&signed),
        c3: c1.sub(&c2).to_f64(),
        gap_exact: signed.abs(),
        alpha: alpha.to_f64(),
    })
}

/// Which resonant point a lattice minimizer sits next to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NearRoot {
    C1,
    C2,
    Neither,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeMinimum {
    pub xi1: BigRational,
    pub gap: BigRational,
    pub near: NearRoot,
}

#[derive(Clone, Debug, Default)]
pub struct LatticeSearch {
    /// Search radius for `|xi1|`; defaults to `4|xi|`.
    pub radius: Option<BigRational>,
    /// Skip `xi1 = 0` and `xi2 = 0`.
    pub mean_zero: bool,
}

/// Minimizes `|Gamma_xi(xi1)|` over `xi1` in `Z/lambda` with `|xi1| <= R`.
///
/// Ties go to the `xi1` closest to `c1*xi`.
pub fn min_gap_on_lattice(
    alpha: &Alpha,
    lambda: &BigRational,
    xi: &BigRational,
    search: &LatticeSearch,
) -> Result<LatticeMinimum, ResonanceError> {
    if !lambda.is_positive() {
        return Err(ResonanceError::InvalidLambda(lambda.to_string()));
    }
    let scaled_xi = xi * lambda;
    if !scaled_xi.is_integer() {
        return Err(ResonanceError::NotOnLattice(xi.to_string(), lambda.to_string()));
    }
    let (c1, c2) = c_roots(alpha)?;
    let radius = search.radius.clone().unwrap_or_else(|| rat(4) * xi.abs());
    let xf = ratio_to_f64(xi);
    let (r1, r2) = (c1.to_f64() * xf, c2.to_f64() * xf);
    let rf = ratio_to_f64(&radius);
    if r1.abs() > rf && r2.abs() > rf {
        return Err(ResonanceError::RangeTooSmall(radius.to_string()));
    }
    let bound = (&radius * lambda).floor().to_integer();
    let bound = bound.to_i64().unwrap_or(i64::MAX);
    let mut best: Option<(BigRational, BigRational, f64)> = None;
    for j in -bound..=bound {
        let xi1 = BigRational::new(j.into(), lambda.numer().clone()) * BigRational::from_integer(lambda.denom().clone());
        if search.mean_zero && (xi1.is_zero() || xi1 == *xi) {
            continue;
        }
        let g = gamma(alpha, xi, &xi1).abs();
        let distance = (ratio_to_f64(&xi1) - r1).abs();
        let better = match &best {
            None => true,
            Some((_, bg, bd)) => g < *bg || (g == *bg && distance < *bd),
        };
        if better {
            best = Some((xi1, g, distance));
        }
    }
    let (xi1, gap, _) = best.ok_or_else(|| ResonanceError::RangeTooSmall(radius.to_string()))?;
    let step = 1.0 / ratio_to_f64(lambda);
    let x = ratio_to_f64(&xi1);
    let near = if (x - r1).abs() <= step {
        NearRoot::C1
    } else if (x - r2).abs() <= step {
        NearRoot::C2
    } else {
        NearRoot::Neither
    };
    Ok(LatticeMinimum { xi1, gap, near })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn alpha_parsing_routes_paths() {
        assert_eq!("12/7".parse::<Alpha>().unwrap(), Alpha::ratio(12, 7));
        assert_eq!("4".parse::<Alpha>().unwrap(), Alpha::ratio(4, 1));
        assert_eq!("0.899".parse::<Alpha>().unwrap(), Alpha::Float(0.899));
        assert!("abc".parse::<Alpha>().is_err());
        assert!("1/0".parse::<Alpha>().is_err());
    }

    #[test]
    fn out_of_range_alpha() {
        assert_eq!(c_roots(&Alpha::ratio(0, 1)).unwrap_err(), ResonanceError::AlphaZero);
        assert!(matches!(c_roots(&Alpha::ratio(5, 1)), Err(ResonanceError::AlphaOutOfRange(_))));
        assert!(matches!(c_roots(&Alpha::ratio(-1, 2)), Err(ResonanceError::AlphaOutOfRange(_))));
        assert_eq!(d_roots(&Alpha::ratio(1, 1)).unwrap_err(), ResonanceError::AlphaDegenerate);
    }

    #[test]
    fn lattice_search_mean_zero_filter() {
        let m = min_gap_on_lattice(&Alpha::ratio(1, 1), &q(1, 1), &q(3, 1), &LatticeSearch::default()).unwrap();
        assert_eq!(m.gap, q(0, 1));
        assert!(m.xi1 == q(3, 1) || m.xi1 == q(0, 1));
        let filtered = LatticeSearch { mean_zero: true, ..Default::default() };
        let m = min_gap_on_lattice(&Alpha::ratio(1, 1), &q(1, 1), &q(3, 1), &filtered).unwrap();
        assert_eq!(m.gap, q(18, 1));
    }

    #[test]
    fn lattice_search_rejects_small_radius() {
        let tiny = LatticeSearch { radius: Some(q(1, 2)), mean_zero: false };
        let r = min_gap_on_lattice(&Alpha::ratio(1, 2), &q(1, 1), &q(4, 1), &tiny);
        assert!(matches!(r, Err(ResonanceError::RangeTooSmall(_))));
    }

    #[test]
    fn off_lattice_frequency() {
        let r = min_gap_on_lattice(&Alpha::ratio(1, 2), &q(2, 1), &q(1, 3), &LatticeSearch::default());
        assert!(matches!(r, Err(ResonanceError::NotOnLattice(..))));
    }
}
