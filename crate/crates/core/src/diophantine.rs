//! Continued fractions, convergents and type-index estimation.
//!
//! A real `x` has type `(K, nu)` when `|x - m/n| >= K / n^(2+nu)` for all
//! integers `m` and `n >= 1`; the minimal type index is the infimum of the
//! admissible `nu` (infinite for rationals, zero for quadratic irrationals).

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::real::Real;
use crate::surd::{ratio_to_f64, QuadraticSurd, SurdError};
use crate::util::display_string;

/// Upper limit on the number of steps spent looking for a period.
const PERIOD_SEARCH_LIMIT: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiophantineError {
    #[error("precision exhausted before the first partial quotient was determined")]
    PrecisionExhausted,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("only {found} convergents with denominator <= {n_max}; at least {needed} are needed")]
    InsufficientWitnesses { found: usize, needed: usize, n_max: u64 },
    #[error("x = {numerator}/{denominator} is rational")]
    XRational { numerator: BigInt, denominator: BigInt },
    #[error("requested {requested} terms but only {available} are known")]
    NotEnoughTerms { requested: usize, available: usize },
    #[error("no period found within {0} steps")]
    PeriodTooLong(usize),
    #[error(transparent)]
    Surd(#[from] SurdError),
}

/// Expansion `[a0; a1, a2, ...]`.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    pub a0: BigInt,
    /// Quotients after `a0`. For periodic expansions at least one full period is kept.
    pub partial_quotients: Vec<BigInt>,
    /// `(preperiod_len, period_len)` counted within `partial_quotients`.
    pub period: Option<(usize, usize)>,
    /// The expansion of a rational value ended exactly.
    pub terminates: bool,
    /// The enclosure became too wide to determine further quotients.
    pub precision_exhausted: bool,
    value: Real,
}

impl ContinuedFraction {
    pub fn value(&self) -> &Real {
        &self.value
    }

    /// Term `k` of the expansion (`k = 0` is `a0`), extended through the period.
    pub fn term(&self, k: usize) -> Option<BigInt> {
        if k == 0 {
            return Some(self.a0.clone());
        }
        let i = k - 1;
        if let Some(t) = self.partial_quotients.get(i) {
            return Some(t.clone());
        }
        let (pre, len) = self.period?;
        Some(self.partial_quotients[pre + (i - pre) % len].clone())
    }

    /// Number of known terms including `a0`; `None` when periodic (unbounded).
    pub fn available_terms(&self) -> Option<usize> {
        match self.period {
            Some(_) => None,
            None => Some(self.partial_quotients.len() + 1),
        }
    }

    /// Rebuilds the exact value from the preperiod and period, or from a
    /// terminating expansion.
    pub fn reconstruct(&self) -> Option<QuadraticSurd> {
        let prefix_len = match (self.period, self.terminates) {
            (Some((pre, _)), _) => pre,
            (None, true) => self.partial_quotients.len(),
            (None, false) => return None,
        };
        let mut prefix = vec![self.a0.clone()];
        prefix.extend(self.partial_quotients[..prefix_len].iter().cloned());
        let (p, p_prev, q, q_prev) = convergent_matrix(&prefix);
        let Some((pre, len)) = self.period else {
            return Some(QuadraticSurd::from_rational(BigRational::new(p, q)));
        };
        let block = &self.partial_quotients[pre..pre + len];
        let (bp, bp_prev, bq, bq_prev) = convergent_matrix(block);
        // tail y = [block; y] solves bq*y^2 + (bq_prev - bp)*y - bp_prev = 0
        let disc = (&bq_prev - &bp).pow(2) + BigInt::from(4) * &bq * &bp_prev;
        let two_bq = BigRational::from_integer(BigInt::from(2) * &bq);
        let y_a = BigRational::from_integer(&bp - &bq_prev) / &two_bq;
        let y_b = BigRational::one() / two_bq;
        // the field is known when expanding a surd; this avoids factoring `disc`
        let known = self.value.as_surd().map(QuadraticSurd::radicand).filter(|&d| d > 1).and_then(|d| {
            let d = BigInt::from(d);
            let (k2, rem) = disc.div_rem(&d);
            let k = k2.sqrt();
            (rem.is_zero() && &k * &k == k2).then(|| QuadraticSurd::new(y_a.clone(), &y_b * BigRational::from_integer(k), &d))
        });
        let y = match known {
            Some(y) => y.ok()?,
            None => QuadraticSurd::new(y_a, y_b, &disc).ok()?,
        };
        let lift = |a: &BigInt| QuadraticSurd::from_rational(BigRational::from_integer(a.clone()));
        let num = (&y * &lift(&p)).checked_add(&lift(&p_prev)).ok()?;
        let den = (&y * &lift(&q)).checked_add(&lift(&q_prev)).ok()?;
        num.checked_div(&den).ok()
    }
}

/// `(p_n, p_{n-1}, q_n, q_{n-1})` of a finite expansion.
fn convergent_matrix(terms: &[BigInt]) -> (BigInt, BigInt, BigInt, BigInt) {
    let (mut p, mut p_prev) = (BigInt::one(), BigInt::zero());
    let (mut q, mut q_prev) = (BigInt::zero(), BigInt::one());
    for a in terms {
        let np = a * &p + &p_prev;
        let nq = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, np);
        q_prev = std::mem::replace(&mut q, nq);
    }
    (p, p_prev, q, q_prev)
}

/// Continued fraction of `x` with up to `max_terms` terms (including `a0`).
///
/// Surds are expanded exactly and their period is always located;
/// enclosures stop once the next quotient is no longer determined.
pub fn cf_expand(x: &Real, max_terms: usize) -> Result<ContinuedFraction, DiophantineError> {
    if max_terms == 0 {
        return Err(DiophantineError::InvalidArgument("max_terms must be at least 1".into()));
    }
    match x {
        Real::Surd(s) if s.is_rational() => Ok(expand_rational(s.a(), max_terms, x.clone())),
        Real::Surd(s) => expand_surd(s, max_terms, x.clone()),
        Real::Approx(_) => expand_enclosure(x, max_terms),
    }
}

fn expand_rational(r: &BigRational, max_terms: usize, value: Real) -> ContinuedFraction {
    let (mut num, mut den) = (r.numer().clone(), r.denom().clone());
    let mut terms = Vec::new();
    let mut terminates = false;
    while terms.len() < max_terms {
        let (a, rem) = num.div_mod_floor(&den);
        terms.push(a);
        if rem.is_zero() {
            terminates = true;
            break;
        }
        num = std::mem::replace(&mut den, rem);
    }
    let a0 = terms.remove(0);
    ContinuedFraction {
        a0,
        partial_quotients: terms,
        period: None,
        terminates,
        precision_exhausted: false,
        value,
    }
}

fn expand_surd(s: &QuadraticSurd, max_terms: usize, value: Real) -> Result<ContinuedFraction, DiophantineError> {
    // x = (P + sqrt(D)) / Q with Q | D - P^2
    let (a, b, m) = s.scaled_parts();
    let mut d = &b * &b * BigInt::from(s.radicand());
    let (mut p, mut q) = if b.is_positive() { (a, m) } else { (-a, -m) };
    if !(&d - &p * &p).is_multiple_of(&q) {
        let qa = q.abs();
        p *= &qa;
        d *= &qa * &qa;
        q *= &qa;
    }
    let root = d.sqrt();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut terms: Vec<BigInt> = Vec::new();
    let (start, end) = loop {
        let key = (p.clone(), q.clone());
        if let Some(&i) = seen.get(&key) {
            break (i, terms.len());
        }
        if terms.len() > PERIOD_SEARCH_LIMIT {
            return Err(DiophantineError::PeriodTooLong(PERIOD_SEARCH_LIMIT));
        }
        seen.insert(key, terms.len());
        let t = if q.is_positive() {
            (&p + &root).div_floor(&q)
        } else {
            (-&p - &root - 1u32).div_floor(&(-&q))
        };
        p = &t * &q - &p;
        q = (&d - &p * &p) / &q;
        terms.push(t);
    };
    let a0 = terms.remove(0);
    if start == 0 {
        // a0 belongs to the period; close the cycle after it
        terms.push(a0.clone());
    }
    let len = end - start;
    let pre = start.max(1) - 1;
    let mut cf = ContinuedFraction {
        a0,
        partial_quotients: terms,
        period: Some((pre, len)),
        terminates: false,
        precision_exhausted: false,
        value,
    };
    cf.partial_quotients.truncate(pre + len);
    let wanted = max_terms.saturating_sub(1);
    while cf.partial_quotients.len() < wanted {
        let next = cf.term(cf.partial_quotients.len() + 1).expect("periodic expansion");
        cf.partial_quotients.push(next);
    }
    Ok(cf)
}

fn expand_enclosure(x: &Real, max_terms: usize) -> Result<ContinuedFraction, DiophantineError> {
    let mut current = x.enclosure();
    let mut terms = Vec::new();
    let mut terminates = false;
    let mut exhausted = false;
    while terms.len() < max_terms {
        let Some(a) = current.floor() else {
            exhausted = true;
            break;
        };
        let frac = current.add_rational(&-BigRational::from_integer(a.clone()));
        terms.push(a);
        if frac.lo().is_zero() && frac.hi().is_zero() {
            terminates = true;
            break;
        }
        match frac.recip() {
            Some(next) if frac.lo().is_positive() => current = next,
            _ => {
                exhausted = true;
                break;
            }
        }
    }
    if terms.is_empty() {
        return Err(DiophantineError::PrecisionExhausted);
    }
    let a0 = terms.remove(0);
    Ok(ContinuedFraction {
        a0,
        partial_quotients: terms,
        period: None,
        terminates,
        precision_exhausted: exhausted,
        value: x.clone(),
    })
}

/// Convergent `p/q` with its error `|x - p/q|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Convergent {
    #[serde(serialize_with = "display_string")]
    pub p: BigInt,
    #[serde(serialize_with = "display_string")]
    pub q: BigInt,
    pub error: f64,
}

fn distance_to(x: &Real, p: &BigInt, q: &BigInt) -> f64 {
    let r = BigRational::new(p.clone(), q.clone());
    match x {
        Real::Surd(s) => s.add_rational(&-r).to_f64().abs(),
        Real::Approx(i) => ratio_to_f64(&(i.midpoint() - r)).abs(),
    }
}

/// The first `k` convergents of `cf`.
pub fn convergents(cf: &ContinuedFraction, k: usize) -> Result<Vec<Convergent>, DiophantineError> {
    if let Some(available) = cf.available_terms() {
        if k > available {
            return Err(DiophantineError::NotEnoughTerms { requested: k, available });
        }
    }
    let mut out = Vec::with_capacity(k);
    let (mut p, mut p_prev) = (BigInt::one(), BigInt::zero());
    let (mut q, mut q_prev) = (BigInt::zero(), BigInt::one());
    for i in 0..k {
        let a = cf.term(i).expect("term within range");
        let np = &a * &p + &p_prev;
        let nq = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, np);
        q_prev = std::mem::replace(&mut q, nq);
        let error = distance_to(cf.value(), &p, &q);
        out.push(Convergent { p: p.clone(), q: q.clone(), error });
    }
    Ok(out)
}

/// Convergents with `q <= q_max`, generated lazily from the expansion.
fn convergents_up_to(x: &Real, q_max: u64) -> Result<(ContinuedFraction, Vec<Convergent>), DiophantineError> {
    let mut terms = 64;
    loop {
        let cf = cf_expand(x, terms)?;
        let available = cf.available_terms().unwrap_or(usize::MAX).min(terms);
        let all = convergents(&cf, available)?;
        let bound = BigInt::from(q_max);
        let reached = all.last().is_some_and(|c| c.q > bound);
        let finished = cf.terminates || cf.precision_exhausted;
        if reached || finished {
            let kept = all.into_iter().filter(|c| c.q <= bound).collect();
            return Ok((cf, kept));
        }
        terms *= 2;
    }
}

/// Signed distance from `n*x` to its nearest integer (ties away from zero).
///
/// Evaluated at integer level, exactly, for rational and quadratic inputs.
#[derive(Clone, Debug)]
enum ThetaScanner {
    Small { a: i128, b: i128, m: i128, d: i128 },
    Big { a: BigInt, b: BigInt, m: BigInt, d: BigInt },
    Enclosed(Real),
}

impl ThetaScanner {
    fn new(x: &Real, n_max: u64) -> Self {
        let Real::Surd(s) = x else {
            return ThetaScanner::Enclosed(x.clone());
        };
        let (a, b, m) = s.scaled_parts();
        let d = BigInt::from(s.radicand());
        let limit = BigInt::one() << 60;
        let root = BigInt::from((s.radicand() as f64).sqrt().ceil() as u64 + 1);
        let largest = a.abs().max(b.abs() * root).max(m.clone()) * BigInt::from(n_max.max(1)) * 4;
        if largest < limit {
            let c = |v: &BigInt| v.to_i128().expect("bounded");
            return ThetaScanner::Small { a: c(&a), b: c(&b), m: c(&m), d: c(&d) };
        }
        ThetaScanner::Big { a, b, m, d }
    }

    fn theta(&self, n: u64) -> Option<f64> {
        match self {
            ThetaScanner::Small { a, b, m, d } => {
                let (an, bn) = (a * n as i128, b * n as i128);
                let k = round_small(an, bn, *m, *d);
                Some(small_to_f64(k * m - an, -bn, *m, *d))
            }
            _ => self.nearest(n).map(|(_, t)| t),
        }
    }

    fn nearest(&self, n: u64) -> Option<(BigInt, f64)> {
        let nb = BigInt::from(n);
        match self {
            ThetaScanner::Small { a, b, m, d } => {
                let (an, bn) = (a * n as i128, b * n as i128);
                let k = round_small(an, bn, *m, *d);
                Some((BigInt::from(k), small_to_f64(k * m - an, -bn, *m, *d)))
            }
            ThetaScanner::Big { a, b, m, d } => {
                let (an, bn) = (a * &nb, b * &nb);
                let k = crate::surd::round_scaled(&an, &bn, m, d);
                let theta = crate::surd::scaled_to_f64(&(&k * m - an), &(-bn), m, d);
                Some((k, theta))
            }
            ThetaScanner::Enclosed(x) => x.nearest_multiple(&nb),
        }
    }
}

fn floor_small(a: i128, b: i128, m: i128, d: i128) -> i128 {
    if b == 0 || d == 0 {
        return a.div_euclid(m);
    }
    let s = ((b * b) as u128 * d as u128).isqrt() as i128;
    if b > 0 {
        (a + s).div_euclid(m)
    } else {
        (a - s - 1).div_euclid(m)
    }
}

fn sign_small(a: i128, b: i128, d: i128) -> i32 {
    let (sa, sb) = (a.signum() as i32, if d == 0 { 0 } else { b.signum() as i32 });
    if sb == 0 || sa == sb || sa == 0 {
        return if sa == 0 { sb } else { sa };
    }
    match (a * a).cmp(&(b * b * d)) {
        std::cmp::Ordering::Greater => sa,
        std::cmp::Ordering::Less => sb,
        std::cmp::Ordering::Equal => 0,
    }
}

fn round_small(a: i128, b: i128, m: i128, d: i128) -> i128 {
    if sign_small(a, b, d) >= 0 {
        floor_small(2 * a + m, 2 * b, 2 * m, d)
    } else {
        -floor_small(m - 2 * a, -2 * b, 2 * m, d)
    }
}

fn small_to_f64(r: i128, s: i128, m: i128, d: i128) -> f64 {
    let root = (d as f64).sqrt();
    if s == 0 || d == 0 {
        return r as f64 / m as f64;
    }
    if r.signum() * s.signum() >= 0 {
        (r as f64 + s as f64 * root) / m as f64
    } else {
        let num = r * r - s * s * d;
        (num as f64 / m as f64) / (r as f64 - s as f64 * root)
    }
}

/// `theta = [n x] - n x` with `[.]` the nearest integer, ties away from zero.
pub fn nearest_int_dist(x: &Real, n: u64) -> Result<f64, DiophantineError> {
    ThetaScanner::new(x, n).theta(n).ok_or(DiophantineError::PrecisionExhausted)
}

/// Minimal type index, `INFINITE` for rationals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TypeIndex {
    Finite(f64),
    Infinite,
}

impl TypeIndex {
    pub fn as_f64(&self) -> f64 {
        match self {
            TypeIndex::Finite(v) => *v,
            TypeIndex::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for TypeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeIndex::Finite(v) => write!(f, "{v}"),
            TypeIndex::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for TypeIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TypeIndex::Finite(v) => s.serialize_f64(*v),
            TypeIndex::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    Rational,
    QuadraticSurd,
    Empirical,
}

/// A point `(n, n^(1+nu) * dist(n x, Z))` backing an estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeWitness {
    pub n: u64,
    pub scaled_distance: f64,
}

/// Bounded partial quotients over the detected period.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodCertificate {
    pub preperiod_len: usize,
    pub period_len: usize,
    #[serde(serialize_with = "display_string")]
    pub max_partial_quotient: BigInt,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeIndexEstimate {
    pub nu_hat: TypeIndex,
    pub k_hat: f64,
    pub classification: Classification,
    pub witnesses: Vec<TypeWitness>,
    pub certificate: Option<PeriodCertificate>,
}

/// Estimates the minimal type index of `x` from data with `n <= n_max`.
///
/// Rationals are classified exactly, quadratic irrationals receive `nu = 0`
/// with a period certificate, and other inputs get a regression of
/// `-log dist(q x, Z)` on `log q` over convergent denominators.
pub fn estimate_type_index(x: &Real, n_max: u64) -> Result<TypeIndexEstimate, DiophantineError> {
    if n_max < 100 {
        return Err(DiophantineError::InvalidArgument(format!("n_max = {n_max} is below 100")));
    }
    let (cf, convs) = convergents_up_to(x, n_max)?;
    let scanner = ThetaScanner::new(x, n_max);
    let mut witnesses = Vec::new();
    for c in &convs {
        let Some(q) = c.q.to_u64() else { continue };
        if witnesses.last().is_some_and(|w: &TypeWitness| w.n == q) {
            continue;
        }
        let dist = scanner.theta(q).ok_or(DiophantineError::PrecisionExhausted)?.abs();
        witnesses.push(TypeWitness { n: q, scaled_distance: q as f64 * dist });
    }
    match x.is_rational() {
        Some(true) => {
            let r = x.as_surd().and_then(|s| s.as_rational()).cloned().unwrap_or_default();
            Ok(TypeIndexEstimate {
                nu_hat: TypeIndex::Infinite,
                k_hat: 1.0 / r.denom().to_f64().unwrap_or(f64::INFINITY),
                classification: Classification::Rational,
                witnesses,
                certificate: None,
            })
        }
        Some(false) => {
            let (pre, len) = cf.period.expect("irrational surds are periodic");
            let max_partial_quotient = cf.partial_quotients[pre..pre + len].iter().max().cloned().unwrap_or_default();
            // Legendre: any n with n*dist(n x) < 1/2 is a convergent denominator.
            let smallest = witnesses.iter().map(|w| w.scaled_distance).fold(0.5, f64::min);
            Ok(TypeIndexEstimate {
                nu_hat: TypeIndex::Finite(0.0),
                k_hat: smallest * (1.0 - 1e-9),
                classification: Classification::QuadraticSurd,
                witnesses,
                certificate: Some(PeriodCertificate { preperiod_len: pre, period_len: len, max_partial_quotient }),
            })
        }
        None => empirical_estimate(witnesses, n_max),
    }
}

fn empirical_estimate(mut witnesses: Vec<TypeWitness>, n_max: u64) -> Result<TypeIndexEstimate, DiophantineError> {
    witnesses.retain(|w| w.scaled_distance > 0.0);
    if witnesses.len() < 3 {
        return Err(DiophantineError::InsufficientWitnesses { found: witnesses.len(), needed: 3, n_max });
    }
    let xs: Vec<f64> = witnesses.iter().map(|w| (w.n as f64).ln()).collect();
    let ys: Vec<f64> = witnesses
        .iter()
        .map(|w| -(w.scaled_distance / w.n as f64).ln())
        .collect();
    let slope = crate::picard::least_squares(&xs, &ys).slope;
    let nu = (slope - 1.0).max(0.0);
    let scaled: Vec<TypeWitness> = witnesses
        .iter()
        .map(|w| TypeWitness { n: w.n, scaled_distance: w.scaled_distance * (w.n as f64).powf(nu) })
        .collect();
    let k_hat = scaled.iter().map(|w| w.scaled_distance).fold(f64::INFINITY, f64::min);
    Ok(TypeIndexEstimate {
        nu_hat: TypeIndex::Finite(nu),
        k_hat,
        classification: Classification::Empirical,
        witnesses: scaled,
        certificate: None,
    })
}

/// Result of an exhaustive type-bound check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeBoundCheck {
    pub holds: bool,
    /// First `(m, n)` with `|x - m/n| < K / n^(2+nu)`.
    pub first_violation: Option<(String, u64)>,
}

/// Checks `|x - m/n| >= k_const / n^(2+nu)` for `1 <= n <= n_max`, `m` nearest to `n x`.
pub fn verify_type_bound(x: &Real, k_const: f64, nu: f64, n_max: u64) -> Result<TypeBoundCheck, DiophantineError> {
    if !(k_const > 0.0) || !(nu >= 0.0) {
        return Err(DiophantineError::InvalidArgument(format!("need K > 0 and nu >= 0, got K = {k_const}, nu = {nu}")));
    }
    let scanner = ThetaScanner::new(x, n_max);
    for n in 1..=n_max {
        let theta = scanner.theta(n).ok_or(DiophantineError::PrecisionExhausted)?;
        if theta.abs() * (n as f64).powf(1.0 + nu) < k_const {
            let (m, _) = scanner.nearest(n).ok_or(DiophantineError::PrecisionExhausted)?;
            return Ok(TypeBoundCheck { holds: false, first_violation: Some((m.to_string(), n)) });
        }
    }
    Ok(TypeBoundCheck { holds: true, first_violation: None })
}

/// A frequency `n` with its nearest integer to `n x` and `theta = [n x] - n x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaWitness {
    pub n: u64,
    #[serde(serialize_with = "display_string")]
    pub nearest: BigInt,
    pub theta: f64,
}

/// Convergent denominators `n <= n_max` with `|theta_n| < 1/n`.
pub fn theta_subsequence(x: &Real, n_max: u64) -> Result<Vec<ThetaWitness>, DiophantineError> {
    if let Some(r) = x.as_surd().and_then(|s| s.as_rational()) {
        return Err(DiophantineError::XRational { numerator: r.numer().clone(), denominator: r.denom().clone() });
    }
    let (_, convs) = convergents_up_to(x, n_max)?;
    let scanner = ThetaScanner::new(x, n_max);
    let mut out: Vec<ThetaWitness> = Vec::new();
    for c in convs {
        let Some(n) = c.q.to_u64() else { continue };
        if out.last().is_some_and(|w| w.n == n) {
            continue;
        }
        let (nearest, theta) = scanner.nearest(n).ok_or(DiophantineError::PrecisionExhausted)?;
        if theta.abs() < 1.0 / n as f64 {
            out.push(ThetaWitness { n, nearest, theta });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surd(a: (i64, i64), b: (i64, i64), d: i64) -> Real {
        Real::Surd(
            QuadraticSurd::new(
                BigRational::new(a.0.into(), a.1.into()),
                BigRational::new(b.0.into(), b.1.into()),
                &BigInt::from(d),
            )
            .unwrap(),
        )
    }

    #[test]
    fn small_and_big_scanners_agree() {
        let x = surd((3, 6), (1, 6), 21);
        let small = ThetaScanner::new(&x, 1000);
        assert!(matches!(small, ThetaScanner::Small { .. }));
        let Real::Surd(s) = &x else { unreachable!() };
        let (a, b, m) = s.scaled_parts();
        let big = ThetaScanner::Big { a, b, m, d: BigInt::from(21) };
        for n in 1..1000 {
            let (t1, t2) = (small.theta(n).unwrap(), big.theta(n).unwrap());
            assert!((t1 - t2).abs() <= 1e-15 * t1.abs().max(1e-300), "n = {n}");
        }
    }

    #[test]
    fn purely_periodic_expansion() {
        // 1 + sqrt(2) = [2; 2, 2, ...]
        let cf = cf_expand(&surd((1, 1), (1, 1), 2), 5).unwrap();
        assert_eq!(cf.a0, BigInt::from(2));
        assert_eq!(cf.period, Some((0, 1)));
        assert_eq!(cf.partial_quotients, vec![BigInt::from(2); 4]);
    }

    #[test]
    fn negative_surd_expansion() {
        // -sqrt(2) = [-2; 1, 1, 2, 2, ...]
        let x = surd((0, 1), (-1, 1), 2);
        let cf = cf_expand(&x, 6).unwrap();
        assert_eq!(cf.a0, BigInt::from(-2));
        let terms: Vec<i64> = cf.partial_quotients.iter().map(|t| t.to_i64().unwrap()).collect();
        assert_eq!(terms, vec![1, 1, 2, 2, 2]);
        assert_eq!(cf.reconstruct(), x.as_surd().cloned());
    }

    #[test]
    fn enclosure_expansion_stops_honestly() {
        let x = Real::from_f64(std::f64::consts::PI).unwrap();
        let cf = cf_expand(&x, 100).unwrap();
        assert!(cf.precision_exhausted);
        let head: Vec<i64> = cf.partial_quotients.iter().take(4).map(|t| t.to_i64().unwrap()).collect();
        assert_eq!((cf.a0.to_i64().unwrap(), head), (3, vec![7, 15, 1, 292]));
    }

    #[test]
    fn bad_arguments() {
        let x = surd((1, 2), (0, 1), 0);
        assert!(matches!(cf_expand(&x, 0), Err(DiophantineError::InvalidArgument(_))));
        assert!(matches!(estimate_type_index(&x, 10), Err(DiophantineError::InvalidArgument(_))));
        assert!(matches!(verify_type_bound(&x, 0.0, 0.0, 10), Err(DiophantineError::InvalidArgument(_))));
    }
}
