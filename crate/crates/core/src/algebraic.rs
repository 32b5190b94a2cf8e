//! Exact real numbers of the form `c₀ + Σ cᵢ·√dᵢ`.
//!
//! A [`Real`] is a rational linear combination of square roots of distinct
//! square-free positive integers. The set is a field (it is the union of all
//! multi-quadratic extensions of Q), closed under `+ - * /`, and has a
//! decidable order: the sign of `A + B·√p`, with `A`, `B` free of `√p`, is
//! settled by comparing `A²` against `p·B²` one prime at a time.
//!
//! This is enough to carry quantum correlations such as `-cos 30° = -√3/2`
//! through the inequality evaluators and the LP kernel exactly.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{fmt_q, q_to_f64, qi, sqrt_bounds, Scalar, Q};

/// Largest radicand accepted by [`Real::sqrt`]; factorization is by trial division.
pub const MAX_RADICAND: u64 = 1 << 40;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Real {
    /// square-free radicand (1 for the rational part) -> nonzero coefficient
    terms: BTreeMap<u64, Q>,
}

/// Closed rational interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn point(value: Q) -> Self {
        Interval { lo: value.clone(), hi: value }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn contains(&self, value: &Q) -> bool {
        &self.lo <= value && value <= &self.hi
    }

    /// Sign decided by the enclosure alone, if it excludes zero.
    pub fn certified_sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

impl Real {
    pub fn rational(value: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(1, value);
        }
        Real { terms }
    }

    pub fn from_int(value: i64) -> Self {
        Real::rational(qi(value))
    }

    /// `√value` for a non-negative rational `value`.
    pub fn sqrt(value: &Q) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::NotRepresentable(format!("sqrt({}) is not real", fmt_q(value))));
        }
        if value.is_zero() {
            return Ok(Real::zero());
        }
        // sqrt(n/d) = sqrt(n*d) / d
        let product: BigInt = value.numer() * value.denom();
        let product = product
            .to_u64()
            .filter(|p| *p <= MAX_RADICAND)
            .ok_or_else(|| Error::NotRepresentable(format!("sqrt({}) radicand too large", fmt_q(value))))?;
        let (root, free) = square_split(product);
        let coeff = Q::new(BigInt::from(root), value.denom().clone());
        Ok(Real::term(coeff, free))
    }

    fn term(coeff: Q, radicand: u64) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(radicand, coeff);
        }
        Real { terms }
    }

    /// `cos(degrees)` for angles whose cosine lies in this field: multiples of 15° and 36°.
    pub fn cos_degrees(degrees: &Q) -> Result<Self> {
        let unsupported = || {
            Error::NotRepresentable(format!("cos({}°) is not supported; use multiples of 15° or 36°", fmt_q(degrees)))
        };
        if !degrees.is_integer() {
            return Err(unsupported());
        }
        let full = BigInt::from(360);
        let mut d = degrees.numer() % &full;
        if d.is_negative() {
            d += &full;
        }
        let mut d = d.to_i64().expect("reduced modulo 360");
        if d > 180 {
            d = 360 - d;
        }
        let mut negate = false;
        if d > 90 {
            d = 180 - d;
            negate = true;
        }
        let quarter = Q::new(BigInt::one(), BigInt::from(4));
        let half = Q::new(BigInt::one(), BigInt::from(2));
        let sqrt = |n: i64| Real::sqrt(&qi(n)).expect("small radicand");
        let value = match d {
            0 => Real::one(),
            15 => (sqrt(6) + sqrt(2)) * Real::rational(quarter),
            30 => sqrt(3) * Real::rational(half),
            36 => (Real::one() + sqrt(5)) * Real::rational(quarter),
            45 => sqrt(2) * Real::rational(half),
            60 => Real::rational(half),
            72 => (sqrt(5) - Real::one()) * Real::rational(quarter),
            75 => (sqrt(6) - sqrt(2)) * Real::rational(quarter),
            90 => Real::zero(),
            _ => return Err(unsupported()),
        };
        Ok(if negate { -value } else { value })
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&d| d == 1)
    }

    pub fn to_rational(&self) -> Option<Q> {
        if self.is_rational() {
            Some(self.terms.get(&1).cloned().unwrap_or_else(Q::zero))
        } else {
            None
        }
    }

    /// `(radicand, coefficient)` pairs, radicand 1 being the rational part.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Q)> {
        self.terms.iter().map(|(d, c)| (*d, c))
    }

    pub fn signum(&self) -> Ordering {
        sign_of_terms(&self.terms)
    }

    pub fn abs(&self) -> Real {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(a: &Real, b: &Real) -> Real {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn recip(&self) -> Result<Real> {
        if self.terms.is_empty() {
            return Err(Error::Validation("division by zero".into()));
        }
        Ok(recip_terms(&self.terms))
    }

    pub fn to_f64_value(&self) -> f64 {
        self.terms.iter().map(|(d, c)| q_to_f64(c) * (*d as f64).sqrt()).sum()
    }

    /// Rational enclosure of width at most `max_width` (which must be positive).
    pub fn enclose(&self, max_width: &Q) -> Interval {
        assert!(max_width.is_positive(), "enclosure width must be positive");
        let mut bits = 32;
        loop {
            let iv = self.enclose_bits(bits);
            if iv.width() <= *max_width {
                return iv;
            }
            bits += 32;
        }
    }

    fn enclose_bits(&self, bits: u32) -> Interval {
        let mut lo = Q::zero();
        let mut hi = Q::zero();
        for (d, c) in &self.terms {
            if *d == 1 {
                lo += c;
                hi += c;
                continue;
            }
            let (s_lo, s_hi) = sqrt_bounds(&qi(*d as i64), bits);
            if c.is_positive() {
                lo += c * &s_lo;
                hi += c * &s_hi;
            } else {
                lo += c * &s_hi;
                hi += c * &s_lo;
            }
        }
        Interval { lo, hi }
    }

    /// Monic minimal polynomial over Q, coefficients from degree 0 upward.
    pub fn minimal_polynomial(&self) -> Vec<Q> {
        let primes = self.primes();
        let mut conjugates: Vec<Real> = Vec::new();
        for mask in 0u32..(1u32 << primes.len()) {
            let mut terms = BTreeMap::new();
            for (d, c) in &self.terms {
                let flips = primes.iter().enumerate().filter(|(i, p)| mask & (1 << i) != 0 && d % *p == 0).count();
                let c = if flips % 2 == 1 { -c.clone() } else { c.clone() };
                terms.insert(*d, c);
            }
            let conj = Real { terms };
            if !conjugates.contains(&conj) {
                conjugates.push(conj);
            }
        }
        // prod (x - conj)
        let mut poly: Vec<Real> = vec![Real::one()];
        for conj in conjugates {
            let mut next = vec![Real::zero(); poly.len() + 1];
            for (k, coeff) in poly.iter().enumerate() {
                next[k + 1] = next[k + 1].clone() + coeff.clone();
                next[k] = next[k].clone() - coeff.clone() * conj.clone();
            }
            poly = next;
        }
        poly.into_iter().map(|c| c.to_rational().expect("symmetric functions of conjugates are rational")).collect()
    }

    fn primes(&self) -> Vec<u64> {
        let mut primes: Vec<u64> = self.terms.keys().flat_map(|&d| prime_factors(d)).collect();
        primes.sort_unstable();
        primes.dedup();
        primes
    }
}

/// n = root² · free with `free` square-free.
fn square_split(mut n: u64) -> (u64, u64) {
    let mut root = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut count = 0;
        while n.is_multiple_of(p) {
            n /= p;
            count += 1;
        }
        root *= p.pow(count / 2);
        if count % 2 == 1 {
            free *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    free *= n;
    (root, free)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn smallest_prime(n: u64) -> u64 {
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    n
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn add_term(terms: &mut BTreeMap<u64, Q>, radicand: u64, coeff: Q) {
    if coeff.is_zero() {
        return;
    }
    let entry = terms.entry(radicand).or_insert_with(Q::zero);
    *entry += coeff;
    if entry.is_zero() {
        terms.remove(&radicand);
    }
}

fn mul_terms(a: &BTreeMap<u64, Q>, b: &BTreeMap<u64, Q>) -> BTreeMap<u64, Q> {
    let mut out = BTreeMap::new();
    for (da, ca) in a {
        for (db, cb) in b {
            // √da·√db = g·√((da/g)(db/g)) for square-free da, db with g = gcd
            let g = gcd(*da, *db);
            let radicand = (da / g).checked_mul(db / g).expect("radicand overflow in algebraic product");
            add_term(&mut out, radicand, ca * cb * qi(g as i64));
        }
    }
    out
}

/// Splits `x = A + B·√p`, with `A` and `B` free of the prime `p`.
fn split(terms: &BTreeMap<u64, Q>, p: u64) -> (BTreeMap<u64, Q>, BTreeMap<u64, Q>) {
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    for (d, c) in terms {
        if d % p == 0 {
            b.insert(d / p, c.clone());
        } else {
            a.insert(*d, c.clone());
        }
    }
    (a, b)
}

fn pick_prime(terms: &BTreeMap<u64, Q>) -> Option<u64> {
    terms.keys().filter(|&&d| d > 1).map(|&d| smallest_prime(d)).min()
}

fn sign_of_terms(terms: &BTreeMap<u64, Q>) -> Ordering {
    let Some(p) = pick_prime(terms) else {
        return terms.get(&1).map_or(Ordering::Equal, |c| c.cmp(&Q::zero()));
    };
    let (a, b) = split(terms, p);
    let sa = sign_of_terms(&a);
    let sb = sign_of_terms(&b);
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // Opposite signs: whichever of |A| and |B|√p is larger wins.
    let mut diff = mul_terms(&a, &a);
    for (d, c) in mul_terms(&b, &b) {
        add_term(&mut diff, d, -(c * qi(p as i64)));
    }
    match sign_of_terms(&diff) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

fn recip_terms(terms: &BTreeMap<u64, Q>) -> Real {
    let Some(p) = pick_prime(terms) else {
        let c = terms.get(&1).expect("nonzero");
        return Real::rational(c.recip());
    };
    // 1/(A + B√p) = (A - B√p) / (A² - p·B²)
    let (a, b) = split(terms, p);
    let mut denom = mul_terms(&a, &a);
    for (d, c) in mul_terms(&b, &b) {
        add_term(&mut denom, d, -(c * qi(p as i64)));
    }
    let mut conj = a;
    for (d, c) in b {
        add_term(&mut conj, d * p, -c);
    }
    let inv = recip_terms(&denom);
    Real { terms: mul_terms(&conj, &inv.terms) }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0/1");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(d, c)| if *d == 1 { fmt_q(c) } else { format!("{}*sqrt({d})", fmt_q(c)) })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({self})")
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut diff = self.terms.clone();
        for (d, c) in &other.terms {
            add_term(&mut diff, *d, -c.clone());
        }
        sign_of_terms(&diff)
    }
}

impl From<Q> for Real {
    fn from(value: Q) -> Self {
        Real::rational(value)
    }
}

impl Zero for Real {
    fn zero() -> Self {
        Real::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Real {
    fn one() -> Self {
        Real::rational(Q::one())
    }
}

impl Add for Real {
    type Output = Real;

    fn add(mut self, rhs: Real) -> Real {
        for (d, c) in rhs.terms {
            add_term(&mut self.terms, d, c);
        }
        self
    }
}

impl Sub for Real {
    type Output = Real;

    fn sub(mut self, rhs: Real) -> Real {
        for (d, c) in rhs.terms {
            add_term(&mut self.terms, d, -c);
        }
        self
    }
}

impl Mul for Real {
    type Output = Real;

    fn mul(self, rhs: Real) -> Real {
        Real { terms: mul_terms(&self.terms, &rhs.terms) }
    }
}

impl Div for Real {
    type Output = Real;

    fn div(self, rhs: Real) -> Real {
        self * rhs.recip().expect("division by zero")
    }
}

impl Neg for Real {
    type Output = Real;

    fn neg(mut self) -> Real {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Scalar for Real {
    fn as_rational(&self) -> Option<Q> {
        self.to_rational()
    }

    fn to_f64(&self) -> f64 {
        self.to_f64_value()
    }

    fn exact_string(&self) -> String {
        self.to_string()
    }
}
