//! Exchangeable `±1` pairs and hidden variables with symmetric, conditionally
//! independent conditionals.

use num::{One, Signed, Zero};

use super::{verify_factorization, FactorizationOrder, HiddenVariableModel, LambdaPoint};
use crate::error::{Error, Result};
use crate::probability::{correlation, Correlation, FiniteRandomVariable, JointDistribution};
use crate::scalar::{fmt_q, qi, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymmetricVerdict {
    Exists { rho: Q },
    DoesNotExist { rho: Q },
    Undefined { reason: String },
}

impl SymmetricVerdict {
    pub fn exists(&self) -> bool {
        matches!(self, SymmetricVerdict::Exists { .. })
    }
}

fn pair_distribution(p11: &Q, p10: &Q, p01: &Q, p00: &Q) -> Result<JointDistribution> {
    let vars = vec![FiniteRandomVariable::pm1("X"), FiniteRandomVariable::pm1("Y")];
    let rows = [(1, 1, p11), (1, -1, p10), (-1, 1, p01), (-1, -1, p00)]
        .into_iter()
        .map(|(x, y, p)| (vec![qi(x), qi(y)], p.clone()))
        .collect();
    JointDistribution::from_values(vars, rows)
}

fn exchangeable_pair(p11: &Q, p10: &Q, p01: &Q, p00: &Q) -> Result<JointDistribution> {
    let dist = pair_distribution(p11, p10, p01, p00)?;
    if p10 != p01 {
        return Err(Error::Validation(format!(
            "not exchangeable: P(X=1,Y=-1) = {} but P(X=-1,Y=1) = {}",
            fmt_q(p10),
            fmt_q(p01)
        )));
    }
    Ok(dist)
}

/// A symmetric factoring hidden variable exists iff the correlation is non-negative.
pub fn exchangeable_symmetric_criterion(p11: &Q, p10: &Q, p01: &Q, p00: &Q) -> Result<SymmetricVerdict> {
    let dist = exchangeable_pair(p11, p10, p01, p00)?;
    Ok(match correlation(&dist, "X", "Y")? {
        Correlation::Undefined { reason } => SymmetricVerdict::Undefined { reason },
        Correlation::Defined(value) => {
            // equal variances, so the correlation is rational
            let rho = value.exact().ok_or_else(|| Error::Internal("exchangeable correlation is irrational".into()))?;
            if rho.is_negative() {
                SymmetricVerdict::DoesNotExist { rho }
            } else {
                SymmetricVerdict::Exists { rho }
            }
        }
    })
}

/// Conditional pmf with `P(X=1) = P(Y=1) = (1+t)/2`, independent.
fn symmetric_point(t: &Q) -> Result<JointDistribution> {
    let up = (Q::one() + t) / qi(2);
    let down = Q::one() - &up;
    pair_distribution(&(&up * &up), &(&up * &down), &(&down * &up), &(&down * &down))
}

/// Builds a mixture of at most two symmetric, conditionally independent
/// λ points that reproduces the pair exactly, or `None` when the criterion fails.
///
/// With mean `m` and covariance `v > 0`, the points are `t = 1` and
/// `t = m - v/(1-m)`, weighted `v` and `(1-m)²` up to normalization; both
/// are rational.
pub fn exchangeable_symmetric_construct(
    p11: &Q,
    p10: &Q,
    p01: &Q,
    p00: &Q,
) -> Result<(SymmetricVerdict, Option<HiddenVariableModel>)> {
    let verdict = exchangeable_symmetric_criterion(p11, p10, p01, p00)?;
    if !verdict.exists() {
        return Ok((verdict, None));
    }
    let dist = exchangeable_pair(p11, p10, p01, p00)?;
    let m = p11 - p00;
    let e = p11 + p00 - p10 - p01;
    let v = &e - &m * &m;
    let one = Q::one();
    let ts: Vec<(Q, Q)> = if v.is_zero() {
        vec![(m.clone(), one)]
    } else {
        let gap = &one - &m;
        let total = &gap * &gap + &v;
        vec![(&m - &v / &gap, &gap * &gap / &total), (one, &v / &total)]
    };
    let points = ts
        .iter()
        .map(|(t, w)| {
            Ok(LambdaPoint {
                label: format!("t={}", fmt_q(t)),
                probability: w.clone(),
                conditional: symmetric_point(t)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let model = HiddenVariableModel::new(dist.variables().to_vec(), points)?;

    if model.recompose()? != dist || !verify_factorization(&model, FactorizationOrder::Full)?.holds {
        return Err(Error::Internal("symmetric mixture does not reproduce the pair".into()));
    }
    if ts.iter().any(|(t, _)| t.abs() > qi(1)) {
        return Err(Error::Internal("symmetric mixture point outside [-1, 1]".into()));
    }
    Ok((verdict, Some(model)))
}
