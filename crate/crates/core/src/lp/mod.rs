//! Exact feasibility of moment problems over the atom lattice.
//!
//! The unknowns are the atom masses `p_a >= 0` with `Σ p_a = 1`, and each
//! moment constraint contributes one linear row `Σ m(a)·p_a (=, >=, <=) b`.
//! [`decide`] answers with either a witness distribution or a Farkas
//! certificate `y`: the functional `y₀ + Σ y_k·m_k(a)` is non-negative on every
//! atom while `y₀ + Σ y_k·b_k < 0`, which no distribution can reconcile.

mod columns;
pub mod oracle;
pub mod problem;
pub mod reduce;
mod simplex;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::probability::JointDistribution;
use crate::scalar::{Scalar, Q};

use columns::Columns;
pub use oracle::brute_force_oracle;
pub use problem::{MomentConstraint, MomentProblem, Relation};
pub use reduce::{reduce_then_test, ReduceOutcome, SignMap};

/// Default cap on the number of atoms [`decide`] will handle.
pub const DEFAULT_ATOM_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Feasible,
    Infeasible,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
        }
    }
}

/// Multipliers `[y₀, y₁, …, y_K]`: `y₀` on the normalization row, then one per constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate<T: Scalar = Q> {
    pub multipliers: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityResult<T: Scalar = Q> {
    pub verdict: Verdict,
    pub witness: Option<JointDistribution<T>>,
    pub certificate: Option<Certificate<T>>,
}

impl<T: Scalar> FeasibilityResult<T> {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }

    pub(crate) fn feasible(witness: JointDistribution<T>) -> Self {
        FeasibilityResult { verdict: Verdict::Feasible, witness: Some(witness), certificate: None }
    }

    pub(crate) fn infeasible(certificate: Certificate<T>) -> Self {
        FeasibilityResult { verdict: Verdict::Infeasible, witness: None, certificate: Some(certificate) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecideOptions {
    pub atom_cap: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { atom_cap: DEFAULT_ATOM_CAP }
    }
}

/// Decides feasibility with the default atom cap.
pub fn decide<T: Scalar>(problem: &MomentProblem<T>) -> Result<FeasibilityResult<T>> {
    decide_with(problem, &DecideOptions::default())
}

pub fn decide_with<T: Scalar>(problem: &MomentProblem<T>, options: &DecideOptions) -> Result<FeasibilityResult<T>> {
    check_cap(problem, options.atom_cap)?;
    let result = match range_precheck(problem)? {
        Some(cert) => FeasibilityResult::infeasible(cert),
        None => simplex::solve(problem)?,
    };
    audit(problem, &result)?;
    Ok(result)
}

pub(crate) fn check_cap<T: Scalar>(problem: &MomentProblem<T>, cap: usize) -> Result<()> {
    let count = problem.atom_count();
    if count > num::BigUint::from(cap) {
        return Err(Error::AtomCapExceeded { atoms: count.to_string(), cap });
    }
    Ok(())
}

/// A constraint whose target lies outside its monomial's range gets a two-term certificate.
fn range_precheck<T: Scalar>(problem: &MomentProblem<T>) -> Result<Option<Certificate<T>>> {
    let k = problem.constraints().len();
    for (i, c) in problem.constraints().iter().enumerate() {
        let (lo, hi) = problem.monomial_range(&c.monomial)?;
        let (lo, hi) = (T::from(lo), T::from(hi));
        let above = c.target > hi && c.relation != Relation::AtMost;
        let below = c.target < lo && c.relation != Relation::AtLeast;
        if above || below {
            let mut y = vec![T::zero(); k + 1];
            if above {
                // hi - m >= 0 on every atom, hi - target < 0
                y[0] = hi;
                y[i + 1] = -T::one();
            } else {
                y[0] = -lo;
                y[i + 1] = T::one();
            }
            return Ok(Some(Certificate { multipliers: y }));
        }
    }
    Ok(None)
}

/// Re-checks whatever is about to be returned.
pub(crate) fn audit<T: Scalar>(problem: &MomentProblem<T>, result: &FeasibilityResult<T>) -> Result<()> {
    match (&result.verdict, &result.witness, &result.certificate) {
        (Verdict::Feasible, Some(w), None) => {
            if !problem.is_satisfied_by(w)? {
                return Err(Error::Internal("witness does not satisfy every constraint".into()));
            }
        }
        (Verdict::Infeasible, None, Some(c)) => {
            if !verify_certificate(problem, c)? {
                return Err(Error::Internal("infeasibility certificate failed verification".into()));
            }
        }
        _ => return Err(Error::Internal("result must carry exactly one of witness or certificate".into())),
    }
    Ok(())
}

/// Exact check of a Farkas certificate against every atom of the lattice.
pub fn verify_certificate<T: Scalar>(problem: &MomentProblem<T>, certificate: &Certificate<T>) -> Result<bool> {
    let y = &certificate.multipliers;
    let k = problem.constraints().len();
    if y.len() != k + 1 {
        return Err(Error::DimensionMismatch { expected: k + 1, got: y.len() });
    }
    let mut constant = y[0].clone();
    for (c, yk) in problem.constraints().iter().zip(&y[1..]) {
        let sign_ok = match c.relation {
            Relation::Eq => true,
            Relation::AtLeast => !yk.is_positive_value(),
            Relation::AtMost => !yk.is_negative_value(),
        };
        if !sign_ok {
            return Ok(false);
        }
        constant = constant + yk.clone() * c.target.clone();
    }
    if !constant.is_negative_value() {
        return Ok(false);
    }
    let columns = Columns::new(problem)?;
    for j in 0..columns.atoms() {
        let col = columns.column(j);
        let value = col
            .iter()
            .zip(y)
            .fold(T::zero(), |acc, (a, yi)| if yi.is_zero() { acc } else { acc + a.clone() * yi.clone() });
        if value.is_negative_value() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Witness distribution from `(atom index, mass)` pairs.
pub(crate) fn witness_from<T: Scalar>(
    problem: &MomentProblem<T>,
    columns: &Columns<T>,
    masses: impl IntoIterator<Item = (usize, T)>,
) -> Result<JointDistribution<T>> {
    let mut mass = BTreeMap::new();
    for (j, m) in masses {
        if !m.is_zero() {
            let entry = mass.entry(columns.decode(j)).or_insert_with(T::zero);
            *entry = entry.clone() + m;
        }
    }
    JointDistribution::new(problem.variables().to_vec(), mass)
}
