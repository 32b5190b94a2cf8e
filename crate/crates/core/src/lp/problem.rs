use std::collections::BTreeSet;
use std::fmt;

use num::{BigUint, One};

use crate::error::{Error, Result};
use crate::probability::{check_unique_names, FiniteRandomVariable, JointDistribution, Monomial};
use crate::scalar::{Scalar, Q};

/// How a moment relates to its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Eq,
    /// `E(m) >= target`
    AtLeast,
    /// `E(m) <= target`
    AtMost,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentConstraint<T: Scalar = Q> {
    pub monomial: Monomial,
    pub relation: Relation,
    pub target: T,
}

impl<T: Scalar> MomentConstraint<T> {
    pub fn eq(monomial: Monomial, target: T) -> Self {
        MomentConstraint { monomial, relation: Relation::Eq, target }
    }

    pub fn at_least(monomial: Monomial, target: T) -> Self {
        MomentConstraint { monomial, relation: Relation::AtLeast, target }
    }

    pub fn at_most(monomial: Monomial, target: T) -> Self {
        MomentConstraint { monomial, relation: Relation::AtMost, target }
    }

    /// Whether `value` satisfies this constraint.
    pub fn admits(&self, value: &T) -> bool {
        match self.relation {
            Relation::Eq => *value == self.target,
            Relation::AtLeast => *value >= self.target,
            Relation::AtMost => *value <= self.target,
        }
    }
}

impl<T: Scalar> fmt::Display for MomentConstraint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.monomial, self.relation, self.target.exact_string())
    }
}

/// Variables plus exact moment constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentProblem<T: Scalar = Q> {
    variables: Vec<FiniteRandomVariable>,
    constraints: Vec<MomentConstraint<T>>,
    label: String,
    higher_order: bool,
}

impl<T: Scalar> MomentProblem<T> {
    /// Validates names, monomials and duplicates. Exponents above 2 are rejected.
    pub fn new(
        variables: Vec<FiniteRandomVariable>,
        constraints: Vec<MomentConstraint<T>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::build(variables, constraints, label.into(), false)
    }

    /// Like [`MomentProblem::new`] but accepts exponents above 2.
    pub fn higher_order(
        variables: Vec<FiniteRandomVariable>,
        constraints: Vec<MomentConstraint<T>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::build(variables, constraints, label.into(), true)
    }

    fn build(
        variables: Vec<FiniteRandomVariable>,
        constraints: Vec<MomentConstraint<T>>,
        label: String,
        higher_order: bool,
    ) -> Result<Self> {
        check_unique_names(&variables)?;
        let mut seen = BTreeSet::new();
        for c in &constraints {
            c.monomial.resolve(&variables)?;
            if !higher_order && c.monomial.max_exponent() > 2 {
                return Err(Error::Validation(format!(
                    "{} has an exponent above 2; mark the problem higher-order to allow it",
                    c.monomial
                )));
            }
            if !seen.insert(c.monomial.clone()) {
                return Err(Error::Validation(format!("duplicate constraint on {}", c.monomial)));
            }
        }
        Ok(MomentProblem { variables, constraints, label, higher_order })
    }

    pub fn variables(&self) -> &[FiniteRandomVariable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[MomentConstraint<T>] {
        &self.constraints
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_higher_order(&self) -> bool {
        self.higher_order
    }

    /// Same variables and label with a different constraint list.
    pub fn with_constraints(&self, constraints: Vec<MomentConstraint<T>>) -> Result<Self> {
        Self::build(self.variables.clone(), constraints, self.label.clone(), self.higher_order)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Exact lattice size, which may exceed `usize`.
    pub fn atom_count(&self) -> BigUint {
        self.variables.iter().fold(BigUint::one(), |acc, v| acc * BigUint::from(v.len()))
    }

    /// Whether every constraint holds exactly under `dist` (same variable order required).
    pub fn is_satisfied_by(&self, dist: &JointDistribution<T>) -> Result<bool> {
        if dist.variables() != self.variables.as_slice() {
            return Err(Error::ConstraintMismatch("distribution variables differ from the problem's".into()));
        }
        for c in &self.constraints {
            if !c.admits(&dist.expectation(&c.monomial)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Smallest and largest value of a constraint's monomial over the lattice.
    pub fn monomial_range(&self, monomial: &Monomial) -> Result<(Q, Q)> {
        let resolved = monomial.resolve(&self.variables)?;
        Ok(monomial_range(&self.variables, &resolved))
    }
}

/// Range of `Π xᵢ^kᵢ` over the lattice, by interval multiplication of per-factor ranges.
pub(crate) fn monomial_range(variables: &[FiniteRandomVariable], resolved: &[(usize, u32)]) -> (Q, Q) {
    let mut lo = Q::one();
    let mut hi = Q::one();
    for &(i, k) in resolved {
        let powers: Vec<Q> = variables[i].support().iter().map(|v| pow(v, k)).collect();
        let flo = powers.iter().min().expect("non-empty support").clone();
        let fhi = powers.iter().max().expect("non-empty support").clone();
        let products = [&lo * &flo, &lo * &fhi, &hi * &flo, &hi * &fhi];
        lo = products.iter().min().expect("four products").clone();
        hi = products.iter().max().expect("four products").clone();
    }
    (lo, hi)
}

pub(crate) fn pow(v: &Q, k: u32) -> Q {
    (0..k).fold(Q::one(), |acc, _| acc * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn xy() -> Vec<FiniteRandomVariable> {
        vec![FiniteRandomVariable::from_ints("X", &[-1, 0, 2]), FiniteRandomVariable::pm1("Y")]
    }

    #[test]
    fn validation() {
        let m = Monomial::product(&["X", "Y"]).unwrap();
        let dup = vec![MomentConstraint::eq(m.clone(), qi(0)), MomentConstraint::eq(m.clone(), q(1, 2))];
        assert!(MomentProblem::new(xy(), dup, "").is_err());
        let unknown = vec![MomentConstraint::eq(Monomial::product(&["W"]).unwrap(), qi(0))];
        assert!(matches!(MomentProblem::new(xy(), unknown, ""), Err(Error::ConstraintMismatch(_))));
        let cubic = vec![MomentConstraint::eq(Monomial::new([("X", 3)]).unwrap(), qi(0))];
        assert!(MomentProblem::new(xy(), cubic.clone(), "").is_err());
        assert!(MomentProblem::higher_order(xy(), cubic, "").is_ok());
    }

    #[test]
    fn ranges() {
        let p = MomentProblem::<Q>::new(xy(), vec![], "").unwrap();
        let r = |m: Monomial| p.monomial_range(&m).unwrap();
        assert_eq!(r(Monomial::product(&["X", "Y"]).unwrap()), (qi(-2), qi(2)));
        assert_eq!(r(Monomial::new([("X", 2)]).unwrap()), (qi(0), qi(4)));
        assert_eq!(r(Monomial::new([("X", 2), ("Y", 1)]).unwrap()), (qi(-4), qi(4)));
        assert_eq!(p.atom_count(), BigUint::from(6u32));
    }
}
