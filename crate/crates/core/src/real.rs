//! Real numbers that are either exact quadratic surds or rigorous enclosures.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::surd::{ratio_to_f64, QuadraticSurd, SurdError};

/// Working precision, in bits, of interval endpoints.
pub const PRECISION_BITS: usize = 192;

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RealInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Self { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    /// The binary64 value taken at face value.
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Self::point)
    }

    /// A binary64 value known only to half a unit in the last place.
    pub fn from_f64_measured(x: f64) -> Option<Self> {
        let mid = BigRational::from_float(x)?;
        let half = BigRational::from_float(x.abs() * f64::EPSILON / 2.0)?;
        if half.is_zero() {
            return Some(Self::point(mid));
        }
        Some(Self::new(&mid - &half, &mid + &half))
    }

    /// Enclosure of `sqrt(r)` for `r >= 0`.
    pub fn sqrt(r: &BigRational) -> Self {
        assert!(!r.is_negative(), "square root of a negative rational");
        let shift = BigInt::one() << (2 * PRECISION_BITS);
        let scaled = (r * BigRational::from_integer(shift)).floor().to_integer();
        let s = scaled.sqrt();
        let unit = BigInt::one() << PRECISION_BITS;
        let lo = BigRational::new(s.clone(), unit.clone());
        let hi = BigRational::new(s + 1, unit);
        Self { lo, hi }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.midpoint())
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Largest absolute value in the interval.
    pub fn magnitude(&self) -> f64 {
        ratio_to_f64(&self.lo.abs().max(self.hi.abs()))
    }

    /// The common floor of every point, if there is one.
    pub fn floor(&self) -> Option<BigInt> {
        let a = self.lo.floor().to_integer();
        let b = self.hi.floor().to_integer();
        (a == b).then_some(a)
    }

    /// Outward rounding onto the dyadic grid of the working precision.
    fn rounded(self) -> Self {
        let unit = BigInt::one() << PRECISION_BITS;
        let scale = BigRational::from_integer(unit.clone());
        let lo = (&self.lo * &scale).floor().to_integer();
        let hi = (&self.hi * &scale).ceil().to_integer();
        Self { lo: BigRational::new(lo, unit.clone()), hi: BigRational::new(hi, unit) }
    }

    pub fn add_rational(&self, r: &BigRational) -> Self {
        Self { lo: &self.lo + r, hi: &self.hi + r }
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        let (a, b) = (&self.lo * r, &self.hi * r);
        if r.is_negative() {
            Self { lo: b, hi: a }
        } else {
            Self { lo: a, hi: b }
        }
        .rounded()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn neg(&self) -> Self {
        Self { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().cloned().unwrap_or_default();
        let hi = products.iter().max().cloned().unwrap_or_default();
        Self { lo, hi }.rounded()
    }

    /// Reciprocal; `None` when the interval contains zero.
    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        Some(Self { lo: self.hi.recip(), hi: self.lo.recip() }.rounded())
    }

    /// Nearest integer, ties away from zero, when it is the same for every point.
    pub fn round_half_away(&self) -> Option<BigInt> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let round = |x: &BigRational| -> BigInt {
            if x.is_negative() {
                -(-x + &half).floor().to_integer()
            } else {
                (x + &half).floor().to_integer()
            }
        };
        let (a, b) = (round(&self.lo), round(&self.hi));
        (a == b).then_some(a)
    }
}

/// A real number carried either exactly or as a rigorous enclosure.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Surd(QuadraticSurd),
    Approx(RealInterval),
}

impl Real {
    pub fn rational(r: BigRational) -> Self {
        Real::Surd(QuadraticSurd::from_rational(r))
    }

    /// A measured floating value, uncertain by half an ulp.
    pub fn from_f64(x: f64) -> Option<Self> {
        RealInterval::from_f64_measured(x).map(Real::Approx)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Surd(s) => s.to_f64(),
            Real::Approx(i) => i.to_f64(),
        }
    }

    /// Decided rationality; `None` for enclosures.
    pub fn is_rational(&self) -> Option<bool> {
        match self {
            Real::Surd(s) => Some(s.is_rational()),
            Real::Approx(_) => None,
        }
    }

    pub fn as_surd(&self) -> Option<&QuadraticSurd> {
        match self {
            Real::Surd(s) => Some(s),
            Real::Approx(_) => None,
        }
    }

    /// Enclosure of the value at working precision.
    pub fn enclosure(&self) -> RealInterval {
        match self {
            Real::Approx(i) => i.clone(),
            Real::Surd(s) => {
                let root = RealInterval::sqrt(&BigRational::from_integer(BigInt::from(s.radicand())));
                root.mul_rational(s.b()).add_rational(s.a())
            }
        }
    }

    pub fn floor(&self) -> Option<BigInt> {
        match self {
            Real::Surd(s) => Some(s.floor()),
            Real::Approx(i) => i.floor(),
        }
    }

    pub fn add_rational(&self, r: &BigRational) -> Self {
        match self {
            Real::Surd(s) => Real::Surd(s.add_rational(r)),
            Real::Approx(i) => Real::Approx(i.add_rational(r)),
        }
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        match self {
            Real::Surd(s) => Real::Surd(s.scale(r)),
            Real::Approx(i) => Real::Approx(i.mul_rational(r)),
        }
    }

    fn combine(
        &self,
        other: &Self,
        exact: impl Fn(&QuadraticSurd, &QuadraticSurd) -> Result<QuadraticSurd, SurdError>,
        approx: impl Fn(&RealInterval, &RealInterval) -> RealInterval,
    ) -> Self {
        if let (Real::Surd(a), Real::Surd(b)) = (self, other) {
            if let Ok(v) = exact(a, b) {
                return Real::Surd(v);
            }
        }
        Real::Approx(approx(&self.enclosure(), &other.enclosure()))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, QuadraticSurd::checked_add, RealInterval::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, QuadraticSurd::checked_sub, RealInterval::sub)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, QuadraticSurd::checked_mul, RealInterval::mul)
    }

    pub fn cube(&self) -> Self {
        self.mul(self).mul(self)
    }

    /// Exactly zero (surds) or an upper bound on the magnitude (enclosures).
    pub fn magnitude_bound(&self) -> f64 {
        match self {
            Real::Surd(s) => s.to_f64().abs(),
            Real::Approx(i) => i.magnitude(),
        }
    }

    /// `round_half_away(n * x)` and the signed offset `theta = k - n*x`.
    pub fn nearest_multiple(&self, n: &BigInt) -> Option<(BigInt, f64)> {
        let nr = BigRational::from_integer(n.clone());
        match self {
            Real::Surd(s) => {
                let (a, b, m) = s.scaled_parts();
                let d = BigInt::from(s.radicand());
                let (an, bn) = (a * n, b * n);
                let k = crate::surd::round_scaled(&an, &bn, &m, &d);
                let theta = crate::surd::scaled_to_f64(&(&k * &m - an), &(-bn), &m, &d);
                Some((k, theta))
            }
            Real::Approx(i) => {
                let scaled = i.mul_rational(&nr);
                let k = scaled.round_half_away()?;
                let theta = ratio_to_f64(&(BigRational::from_integer(k.clone()) - scaled.midpoint()));
                Some((k, theta))
            }
        }
    }
}

impl From<QuadraticSurd> for Real {
    fn from(s: QuadraticSurd) -> Self {
        Real::Surd(s)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Surd(s) => write!(f, "{s}"),
            Real::Approx(i) => write!(f, "{:.17e}", i.to_f64()),
        }
    }
}
