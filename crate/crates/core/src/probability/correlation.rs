use std::cmp::Ordering;

use num::{Signed, Zero};

use super::JointDistribution;
use crate::algebraic::{Interval, Real};
use crate::error::Result;
use crate::scalar::{exact_sqrt, q, Q};

/// Default enclosure width for irrational correlations.
pub fn default_width() -> Q {
    q(1, 1_000_000_000_000)
}

/// Pearson correlation held as `covariance / sqrt(variance_product)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationValue {
    pub covariance: Q,
    pub variance_product: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Correlation {
    Defined(CorrelationValue),
    /// A variance is zero; no convention is imposed.
    Undefined {
        reason: String,
    },
}

impl CorrelationValue {
    /// The correlation as a rational, when `variance_product` is a perfect square.
    pub fn exact(&self) -> Option<Q> {
        exact_sqrt(&self.variance_product).map(|s| &self.covariance / s)
    }

    /// The correlation as an exact algebraic number, when the radicand is small enough.
    pub fn to_real(&self) -> Option<Real> {
        let root = Real::sqrt(&self.variance_product).ok()?;
        Some(Real::rational(self.covariance.clone()) / root)
    }

    /// Rational enclosure of width at most `width`.
    pub fn enclose(&self, width: &Q) -> Interval {
        if let Some(r) = self.exact() {
            return Interval::point(r);
        }
        // ρ = cov / √v; tighten the root until the quotient is narrow enough.
        let mut bits = 40;
        loop {
            let (lo, hi) = crate::scalar::sqrt_bounds(&self.variance_product, bits);
            let (a, b) = (&self.covariance / &hi, &self.covariance / &lo);
            let iv = if a <= b { Interval { lo: a, hi: b } } else { Interval { lo: b, hi: a } };
            if &iv.width() <= width {
                return iv;
            }
            bits += 32;
        }
    }

    /// Exact comparison of the correlation with a rational threshold.
    pub fn cmp_rational(&self, threshold: &Q) -> Ordering {
        // Compare cov with t·√v (√v > 0) by signs, then by squares.
        let sc = self.covariance.cmp(&Q::zero());
        let st = threshold.cmp(&Q::zero());
        if sc != st {
            return sc.cmp(&st);
        }
        if sc == Ordering::Equal {
            return Ordering::Equal;
        }
        let lhs = &self.covariance * &self.covariance;
        let rhs = threshold * threshold * &self.variance_product;
        if self.covariance.is_positive() {
            lhs.cmp(&rhs)
        } else {
            rhs.cmp(&lhs)
        }
    }

    pub fn to_f64(&self) -> f64 {
        crate::scalar::q_to_f64(&self.covariance) / crate::scalar::q_to_f64(&self.variance_product).sqrt()
    }
}

impl Correlation {
    pub fn value(&self) -> Option<&CorrelationValue> {
        match self {
            Correlation::Defined(v) => Some(v),
            Correlation::Undefined { .. } => None,
        }
    }

    pub fn exact(&self) -> Option<Q> {
        self.value().and_then(CorrelationValue::exact)
    }
}

/// Pearson correlation of `x` and `y`, exact where the variances allow it.
pub fn correlation(dist: &JointDistribution, x: &str, y: &str) -> Result<Correlation> {
    let vx = dist.variance(x)?;
    let vy = dist.variance(y)?;
    let cov = dist.covariance(x, y)?;
    if vx.is_zero() || vy.is_zero() {
        let which = if vx.is_zero() { x } else { y };
        return Ok(Correlation::Undefined { reason: format!("variance of `{which}` is zero") });
    }
    Ok(Correlation::Defined(CorrelationValue { covariance: cov, variance_product: vx * vy }))
}
