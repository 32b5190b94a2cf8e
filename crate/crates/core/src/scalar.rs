//! Exact ordered-field scalars.
//!
//! Everything on the finite side of the engine is computed over an exact
//! ordered field. [`Q`] (arbitrary-precision rationals) is the default;
//! [`crate::algebraic::Real`] extends it with square roots so that targets such
//! as `-cos 30°` can be fed to the same LP kernel without rounding.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Q = BigRational;

/// An exact ordered field.
pub trait Scalar:
    Clone
    + Ord
    + Eq
    + std::hash::Hash
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + From<Q>
    + Send
    + Sync
    + 'static
{
    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }

    fn is_positive_value(&self) -> bool {
        *self > Self::zero()
    }

    fn abs_value(&self) -> Self {
        if self.is_negative_value() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// The value as a rational, if it is one.
    fn as_rational(&self) -> Option<Q>;

    fn to_f64(&self) -> f64;

    /// Canonical exact rendering (`p/q` for rationals).
    fn exact_string(&self) -> String;
}

impl Scalar for Q {
    fn as_rational(&self) -> Option<Q> {
        Some(self.clone())
    }

    fn to_f64(&self) -> f64 {
        q_to_f64(self)
    }

    fn exact_string(&self) -> String {
        fmt_q(self)
    }
}

/// `p/q` rendering, always with an explicit denominator.
pub fn fmt_q(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn q_to_f64(q: &Q) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Very large numerator or denominator: shift both down together.
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
            let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `p/q`, an integer, or a finite decimal such as `-0.25` or `1e-10`.
pub fn parse_q(text: &str) -> Result<Q> {
    let s = text.trim();
    let bad = || Error::Validation(format!("`{text}` is not an exact rational (use p/q, an integer or a decimal)"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Validation(format!("`{text}` has a zero denominator")));
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 4096 {
        return Err(bad());
    }
    let ten = BigInt::from(10);
    let mut value = Q::from_integer(all * sign);
    if scale >= 0 {
        value *= Q::from_integer(num::pow(ten, scale as usize));
    } else {
        value /= Q::from_integer(num::pow(ten, (-scale) as usize));
    }
    Ok(value)
}

/// Exact square root of a rational when it is a perfect square.
pub fn exact_sqrt(value: &Q) -> Option<Q> {
    if value.is_negative() {
        return None;
    }
    let n = value.numer();
    let d = value.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Q::new(rn, rd))
}

/// Rational enclosure `[lo, hi]` of `sqrt(value)` with `hi - lo <= 2^-bits`.
pub fn sqrt_bounds(value: &Q, bits: u32) -> (Q, Q) {
    assert!(!value.is_negative(), "sqrt of a negative rational");
    if let Some(r) = exact_sqrt(value) {
        return (r.clone(), r);
    }
    // sqrt(n/d) = sqrt(n*d)/d, and isqrt brackets sqrt(n*d*4^bits).
    let n = value.numer();
    let d = value.denom();
    let scaled: BigInt = (n * d) << (2 * bits as usize);
    let root = scaled.sqrt();
    let denom: BigInt = d << bits as usize;
    let lo = Q::new(root.clone(), denom.clone());
    let hi = Q::new(root + 1, denom);
    (lo, hi)
}
