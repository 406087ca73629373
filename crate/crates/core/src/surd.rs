//! Exact arithmetic in real quadratic fields `Q(sqrt d)`.
//!
//! A [`QuadraticSurd`] is kept in canonical form: the radicand is square-free
//! and greater than one, or the value is rational and the radicand is stored
//! as zero. Rationality is therefore a structural property (`b == 0`).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest trial divisor used when reducing a radicand to square-free form.
const TRIAL_LIMIT: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurdError {
    #[error("negative radicand {0}")]
    NegativeRadicand(BigInt),
    #[error("radicand {0} is too large to reduce to square-free form")]
    RadicandTooLarge(BigInt),
    #[error("operands live in different quadratic fields (sqrt {0} and sqrt {1})")]
    FieldMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
}

/// Splits `n` as `s^2 * d` with `d` square-free, returning `(s, d)`.
///
/// Trial division runs up to the cube root of the remaining cofactor; a
/// cofactor with no prime factor below its cube root has at most two prime
/// factors, so it is square-ful exactly when it is a perfect square.
pub fn square_free_split(n: &BigUint) -> Result<(BigUint, u64), SurdError> {
    let too_large = || SurdError::RadicandTooLarge(BigInt::from(n.clone()));
    if n.is_zero() {
        return Ok((BigUint::zero(), 0));
    }
    let mut rest: u128 = n.to_u128().ok_or_else(too_large)?;
    let mut root: u128 = 1;
    let mut square_free: u128 = 1;
    let mut p: u128 = 2;
    while p.checked_pow(3).is_some_and(|c| c <= rest) {
        if p > TRIAL_LIMIT {
            return Err(too_large());
        }
        let mut exponent = 0u32;
        while rest % p == 0 {
            rest /= p;
            exponent += 1;
        }
        root *= p.pow(exponent / 2);
        if exponent % 2 == 1 {
            square_free *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.isqrt();
    if r * r == rest {
        root *= r;
    } else {
        square_free *= rest;
    }
    let d = u64::try_from(square_free).map_err(|_| too_large())?;
    Ok((BigUint::from(root), d))
}

/// Exact value `a + b*sqrt(d)` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    a: BigRational,
    b: BigRational,
    d: u64,
}

impl QuadraticSurd {
    /// Builds `a + b*sqrt(radicand)` and reduces it to canonical form.
    pub fn new(a: BigRational, b: BigRational, radicand: &BigInt) -> Result<Self, SurdError> {
        if radicand.is_negative() {
            return Err(SurdError::NegativeRadicand(radicand.clone()));
        }
        let (root, d) = square_free_split(radicand.magnitude())?;
        let b = b * BigRational::from_integer(BigInt::from(root));
        Ok(Self::from_parts(a, b, d))
    }

    fn from_parts(a: BigRational, b: BigRational, d: u64) -> Self {
        match d {
            0 => Self { a, b: BigRational::zero(), d: 0 },
            1 => Self { a: a + b, b: BigRational::zero(), d: 0 },
            _ if b.is_zero() => Self { a, b, d: 0 },
            _ => Self { a, b, d },
        }
    }

    pub fn from_rational(a: BigRational) -> Self {
        Self { a, b: BigRational::zero(), d: 0 }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// The non-negative square root of a non-negative rational.
    pub fn sqrt_rational(r: &BigRational) -> Result<Self, SurdError> {
        // sqrt(n/m) = sqrt(n*m)/m with m > 0
        let radicand = r.numer() * r.denom();
        let b = BigRational::new(BigInt::one(), r.denom().clone());
        Self::new(BigRational::zero(), b, &radicand)
    }

    /// Rational part.
    pub fn a(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient of the square root.
    pub fn b(&self) -> &BigRational {
        &self.b
    }

    /// Square-free radicand, or zero for rational values.
    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The rational value, if the surd is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    /// Galois conjugate `a - b*sqrt(d)`.
    pub fn conjugate(&self) -> Self {
        Self { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm `a^2 - b^2 d`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d))
    }

    fn common_radicand(&self, other: &Self) -> Result<u64, SurdError> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (d, e) if d == e => Ok(d),
            (d, e) => Err(SurdError::FieldMismatch(d, e)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SurdError> {
        let d = self.common_radicand(other)?;
        Ok(Self::from_parts(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SurdError> {
        let d = self.common_radicand(other)?;
        Ok(Self::from_parts(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, SurdError> {
        let d = self.common_radicand(other)?;
        let dr = BigRational::from_integer(BigInt::from(d));
        let a = &self.a * &other.a + &self.b * &other.b * dr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::from_parts(a, b, d))
    }

    pub fn recip(&self) -> Result<Self, SurdError> {
        if self.is_zero() {
            return Err(SurdError::DivisionByZero);
        }
        let n = self.norm();
        Ok(Self::from_parts(&self.a / &n, -&self.b / &n, self.d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, SurdError> {
        self.checked_mul(&other.recip()?)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::from_parts(&self.a * r, &self.b * r, self.d)
    }

    pub fn add_rational(&self, r: &BigRational) -> Self {
        Self { a: &self.a + r, b: self.b.clone(), d: self.d }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact sign of the value.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        if sa == 0 {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Exact comparison of two surds of compatible fields.
    pub fn cmp_exact(&self, other: &Self) -> Result<Ordering, SurdError> {
        Ok(self.checked_sub(other)?.signum().cmp(&0))
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Value as `(A + B*sqrt(d)) / m` with integers and `m > 0`.
    pub fn scaled_parts(&self) -> (BigInt, BigInt, BigInt) {
        let m = self.a.denom().lcm(self.b.denom());
        let a = self.a.numer() * (&m / self.a.denom());
        let b = self.b.numer() * (&m / self.b.denom());
        (a, b, m)
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        let (a, b, m) = self.scaled_parts();
        floor_scaled(&a, &b, &m, &BigInt::from(self.d))
    }

    /// Nearest integer, ties rounded away from zero.
    pub fn round_half_away(&self) -> BigInt {
        let (a, b, m) = self.scaled_parts();
        round_scaled(&a, &b, &m, &BigInt::from(self.d))
    }

    /// Accurate conversion that avoids cancellation between `a` and `b*sqrt(d)`.
    pub fn to_f64(&self) -> f64 {
        let a = ratio_to_f64(&self.a);
        if self.is_rational() {
            return a;
        }
        let root = (self.d as f64).sqrt();
        let b = ratio_to_f64(&self.b);
        if sign_of(&self.a) * sign_of(&self.b) >= 0 {
            a + b * root
        } else {
            ratio_to_f64(&self.norm()) / (a - b * root)
        }
    }
}

fn sign_of(r: &BigRational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Conversion of a big rational that keeps full precision for huge parts.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back to scaling by powers of two
        let nb = r.numer().bits() as i64;
        let db = r.denom().bits() as i64;
        let shift = nb - db - 60;
        let scaled = if shift >= 0 {
            r / BigRational::from_integer(BigInt::one() << shift as usize)
        } else {
            r * BigRational::from_integer(BigInt::one() << (-shift) as usize)
        };
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    })
}

/// Exact `floor((a + b*sqrt(d)) / m)` for integers with `m > 0` and `d`
/// either zero or not a perfect square.
pub(crate) fn floor_scaled(a: &BigInt, b: &BigInt, m: &BigInt, d: &BigInt) -> BigInt {
    if b.is_zero() || d.is_zero() {
        return a.div_floor(m);
    }
    let s = (b * b * d).sqrt();
    if b.is_positive() {
        (a + s).div_floor(m)
    } else {
        (a - s - 1u32).div_floor(m)
    }
}

/// Exact sign of `a + b*sqrt(d)` for integers.
pub(crate) fn sign_scaled(a: &BigInt, b: &BigInt, d: &BigInt) -> i32 {
    let sa = a.signum().to_i32().unwrap_or(0);
    let sb = if d.is_zero() { 0 } else { b.signum().to_i32().unwrap_or(0) };
    if sb == 0 || sa == sb || sa == 0 {
        return if sa == 0 { sb } else { sa };
    }
    match (a * a).cmp(&(b * b * d)) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => 0,
    }
}

/// Nearest integer to `(a + b*sqrt(d)) / m`, ties away from zero.
pub(crate) fn round_scaled(a: &BigInt, b: &BigInt, m: &BigInt, d: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    if sign_scaled(a, b, d) >= 0 {
        floor_scaled(&(&two * a + m), &(&two * b), &(&two * m), d)
    } else {
        -floor_scaled(&(m - &two * a), &(-&two * b), &(&two * m), d)
    }
}

/// Accurate `f64` value of `(r + s*sqrt(d)) / m`.
pub(crate) fn scaled_to_f64(r: &BigInt, s: &BigInt, m: &BigInt, d: &BigInt) -> f64 {
    let mf = m.to_f64().unwrap_or(f64::INFINITY);
    if s.is_zero() || d.is_zero() {
        return ratio_to_f64(&BigRational::new(r.clone(), m.clone()));
    }
    let root = d.to_f64().unwrap_or(f64::INFINITY).sqrt();
    let rf = r.to_f64().unwrap_or(f64::NAN);
    let sf = s.to_f64().unwrap_or(f64::NAN);
    if r.signum() * s.signum() >= BigInt::zero() {
        (rf + sf * root) / mf
    } else {
        let num = r * r - s * s * d;
        let num = ratio_to_f64(&BigRational::new(num, m.clone()));
        num / (rf - sf * root)
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let coefficient = |b: &BigRational| -> String {
            if b.is_one() {
                String::new()
            } else {
                format!("{}*", b)
            }
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                return write!(f, "-{}sqrt({})", coefficient(&-self.b.clone()), self.d);
            }
            return write!(f, "{}sqrt({})", coefficient(&self.b), self.d);
        }
        let (op, mag) = if self.b.is_negative() {
            ('-', -self.b.clone())
        } else {
            ('+', self.b.clone())
        };
        write!(f, "{} {} {}sqrt({})", self.a, op, coefficient(&mag), self.d)
    }
}

impl Neg for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn neg(self) -> QuadraticSurd {
        QuadraticSurd { a: -self.a.clone(), b: -self.b.clone(), d: self.d }
    }
}

impl Neg for QuadraticSurd {
    type Output = QuadraticSurd;
    fn neg(self) -> QuadraticSurd {
        -&self
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&QuadraticSurd> for &QuadraticSurd {
            type Output = QuadraticSurd;
            /// Panics when the operands belong to different quadratic fields.
            fn $method(self, rhs: &QuadraticSurd) -> QuadraticSurd {
                self.$checked(rhs).expect("incompatible quadratic surds")
            }
        }
        impl $trait for QuadraticSurd {
            type Output = QuadraticSurd;
            fn $method(self, rhs: QuadraticSurd) -> QuadraticSurd {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn square_free_split_examples() {
        assert_eq!(square_free_split(&BigUint::from(72u32)).unwrap(), (BigUint::from(6u32), 2));
        assert_eq!(square_free_split(&BigUint::from(49u32)).unwrap(), (BigUint::from(7u32), 1));
        assert_eq!(square_free_split(&BigUint::from(21u32)).unwrap(), (BigUint::from(1u32), 21));
        let big = BigUint::from(1_000_003u64) * BigUint::from(1_000_003u64) * BigUint::from(6u32);
        assert_eq!(square_free_split(&big).unwrap(), (BigUint::from(1_000_003u64), 6));
    }

    #[test]
    fn canonical_form_folds_perfect_squares() {
        let x = QuadraticSurd::new(q(1, 2), q(1, 3), &BigInt::from(9)).unwrap();
        assert!(x.is_rational());
        assert_eq!(x.a(), &q(3, 2));
        assert_eq!(x.radicand(), 0);
        let y = QuadraticSurd::new(q(0, 1), q(1, 1), &BigInt::from(12)).unwrap();
        assert_eq!((y.b().clone(), y.radicand()), (q(2, 1), 3));
    }

    #[test]
    fn field_arithmetic_is_exact() {
        let phi = QuadraticSurd::new(q(1, 2), q(1, 2), &BigInt::from(5)).unwrap();
        // phi^2 = phi + 1
        assert_eq!(&phi * &phi, phi.add_rational(&q(1, 1)));
        assert_eq!(&phi * &phi.recip().unwrap(), QuadraticSurd::one());
        assert_eq!(phi.floor(), BigInt::from(1));
        assert_eq!((-&phi).floor(), BigInt::from(-2));
        assert_eq!(phi.to_string(), "1/2 + 1/2*sqrt(5)");
    }

    #[test]
    fn accurate_conversion_under_cancellation() {
        // 10^8 - sqrt(10^16 - 1) ~ 5e-9
        let x = QuadraticSurd::new(q(100_000_000, 1), q(-1, 1), &BigInt::from(9_999_999_999_999_999i64))
            .unwrap();
        let expected = 1.0 / (1e8 + (1e16f64 - 1.0).sqrt());
        assert!((x.to_f64() - expected).abs() < 1e-22);
        assert_eq!(x.signum(), 1);
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let a = QuadraticSurd::sqrt_rational(&q(2, 1)).unwrap();
        let b = QuadraticSurd::sqrt_rational(&q(3, 1)).unwrap();
        assert_eq!(a.checked_add(&b), Err(SurdError::FieldMismatch(2, 3)));
    }

    #[test]
    fn rounding_rule() {
        assert_eq!(QuadraticSurd::from_rational(q(3, 2)).round_half_away(), BigInt::from(2));
        assert_eq!(QuadraticSurd::from_rational(q(-3, 2)).round_half_away(), BigInt::from(-2));
        let c1 = QuadraticSurd::new(q(1, 2), q(1, 6), &BigInt::from(21)).unwrap();
        assert_eq!(c1.scale(&q(4, 1)).round_half_away(), BigInt::from(5));
    }
}
