//! Map each variable to `±1`, then test the induced problem.
//!
//! A map `f` on a finite support agrees there with its interpolating
//! polynomial `Σ c_k x^k`, so `E f(X)` and `E f(X) g(Y)` are linear in the
//! given moments `E(X^k)` and `E(X^k Y^l)`. If the mapped problem is
//! infeasible, so is the original; a feasible mapped problem says nothing.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};

use super::{decide, FeasibilityResult, MomentConstraint, MomentProblem, Relation};
use crate::error::{Error, Result};
use crate::probability::{FiniteRandomVariable, Monomial};
use crate::scalar::{fmt_q, qi, Q};

/// A `±1`-valued function on one variable's support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMap {
    pub variable: String,
    pub values: BTreeMap<Q, i8>,
}

impl SignMap {
    pub fn from_fn(var: &FiniteRandomVariable, f: impl Fn(&Q) -> i8) -> Self {
        SignMap { variable: var.name().to_string(), values: var.support().iter().map(|v| (v.clone(), f(v))).collect() }
    }

    /// `v ↦ v`, for variables already valued in `±1`.
    pub fn identity(var: &FiniteRandomVariable) -> Self {
        Self::from_fn(var, |v| if v.is_one() { 1 } else { -1 })
    }

    /// Sign with zero sent to `+1`.
    pub fn nonnegative_plus(var: &FiniteRandomVariable) -> Self {
        Self::from_fn(var, |v| if *v >= Q::zero() { 1 } else { -1 })
    }

    fn check(&self, var: &FiniteRandomVariable) -> Result<()> {
        let bad =
            |reason: String| Error::MalformedFunction { name: format!("sign map of `{}`", self.variable), reason };
        for v in var.support() {
            match self.values.get(v) {
                Some(1) | Some(-1) => {}
                Some(other) => return Err(bad(format!("value {other} at {} is not ±1", fmt_q(v)))),
                None => return Err(bad(format!("no value at {}", fmt_q(v)))),
            }
        }
        if self.values.len() != var.len() {
            return Err(bad("defined outside the variable's support".into()));
        }
        Ok(())
    }

    /// Coefficients `c_0..c_{s-1}` of the interpolating polynomial over the support.
    fn polynomial(&self, var: &FiniteRandomVariable) -> Vec<Q> {
        let xs = var.support();
        let s = xs.len();
        let mut rows: Vec<Vec<Q>> = xs
            .iter()
            .map(|x| {
                let mut row: Vec<Q> = Vec::with_capacity(s + 1);
                let mut p = Q::one();
                for _ in 0..s {
                    row.push(p.clone());
                    p *= x;
                }
                row.push(qi(self.values[x] as i64));
                row
            })
            .collect();
        // Vandermonde on distinct nodes is invertible; plain Gauss-Jordan suffices.
        for c in 0..s {
            let p = (c..s).find(|&i| !rows[i][c].is_zero()).expect("distinct nodes");
            rows.swap(c, p);
            let inv = rows[c][c].recip();
            for v in rows[c].iter_mut() {
                *v *= &inv;
            }
            let pivot = rows[c].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != c && !row[c].is_zero() {
                    let f = row[c].clone();
                    for (v, w) in row.iter_mut().zip(&pivot) {
                        *v -= &f * w;
                    }
                }
            }
        }
        rows.into_iter().map(|r| r[s].clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReduceOutcome {
    /// The mapped problem has no joint distribution, hence neither does the original.
    OriginalInfeasible { mapped: MomentProblem, result: FeasibilityResult },
    /// The mapped problem is feasible; nothing follows for the original.
    Inconclusive { mapped: MomentProblem, result: FeasibilityResult },
    /// These moments would be needed to compute the mapped moments but are not given.
    Underdetermined { missing: Vec<Monomial> },
}

/// Builds the mapped `±1` problem from the given equality moments and decides it.
///
/// Mapped means are produced for every variable with a given mean, and mapped
/// products for every pair with a given product moment.
pub fn reduce_then_test(problem: &MomentProblem, signmaps: &[SignMap]) -> Result<ReduceOutcome> {
    let vars = problem.variables();
    let mut polys: BTreeMap<&str, Vec<Q>> = BTreeMap::new();
    for sm in signmaps {
        let var = vars
            .iter()
            .find(|v| v.name() == sm.variable)
            .ok_or_else(|| Error::ConstraintMismatch(format!("sign map for unknown variable `{}`", sm.variable)))?;
        sm.check(var)?;
        if polys.insert(var.name(), sm.polynomial(var)).is_some() {
            return Err(Error::ConstraintMismatch(format!("two sign maps for `{}`", sm.variable)));
        }
    }
    if let Some(v) = vars.iter().find(|v| !polys.contains_key(v.name())) {
        return Err(Error::ConstraintMismatch(format!("no sign map for `{}`", v.name())));
    }

    let given: BTreeMap<&Monomial, &Q> =
        problem.constraints().iter().filter(|c| c.relation == Relation::Eq).map(|c| (&c.monomial, &c.target)).collect();
    let mut missing: BTreeSet<Monomial> = BTreeSet::new();
    let mut moment = |exps: Vec<(&str, u32)>| -> Q {
        let exps: Vec<(&str, u32)> = exps.into_iter().filter(|(_, k)| *k > 0).collect();
        if exps.is_empty() {
            return Q::one();
        }
        let m = Monomial::new(exps).expect("positive exponents on distinct names");
        match given.get(&m) {
            Some(v) => (*v).clone(),
            None => {
                missing.insert(m);
                Q::zero()
            }
        }
    };

    let mut constraints = Vec::new();
    for c in problem.constraints().iter().filter(|c| c.relation == Relation::Eq) {
        let exps: Vec<(&String, &u32)> = c.monomial.exponents().iter().collect();
        let target = match exps.as_slice() {
            [(x, 1)] => {
                let cx = &polys[x.as_str()];
                let mut t = Q::zero();
                for (k, ck) in cx.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    t += ck * moment(vec![(x.as_str(), k as u32)]);
                }
                t
            }
            [(x, 1), (y, 1)] => {
                let (cx, cy) = (&polys[x.as_str()], &polys[y.as_str()]);
                let mut t = Q::zero();
                for (k, ck) in cx.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    for (l, cl) in cy.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                        t += ck * cl * moment(vec![(x.as_str(), k as u32), (y.as_str(), l as u32)]);
                    }
                }
                t
            }
            _ => continue,
        };
        constraints.push(MomentConstraint::eq(c.monomial.clone(), target));
    }
    if !missing.is_empty() {
        return Ok(ReduceOutcome::Underdetermined { missing: missing.into_iter().collect() });
    }

    let mapped_vars = vars.iter().map(|v| FiniteRandomVariable::pm1(v.name())).collect();
    let mapped = MomentProblem::new(mapped_vars, constraints, format!("{} mapped to ±1", problem.label()))?;
    let result = decide(&mapped)?;
    Ok(if result.is_feasible() {
        ReduceOutcome::Inconclusive { mapped, result }
    } else {
        ReduceOutcome::OriginalInfeasible { mapped, result }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::tests::pm1_triple;
    use crate::scalar::q;

    #[test]
    fn interpolation() {
        let v = FiniteRandomVariable::from_ints("A", &[-1, 0, 1]);
        // 0 ↦ +1: f(x) = 1 + x - x²
        assert_eq!(SignMap::nonnegative_plus(&v).polynomial(&v), vec![qi(1), qi(1), qi(-1)]);
        let s = FiniteRandomVariable::pm1("S");
        assert_eq!(SignMap::identity(&s).polynomial(&s), vec![qi(0), qi(1)]);
    }

    #[test]
    fn identity_maps_match_decide() {
        for (a, b, c) in [(q(-1, 2), q(-1, 2), q(-1, 2)), (q(1, 2), q(-1, 2), q(-1, 2))] {
            let p = pm1_triple(a, b, c);
            let maps: Vec<_> = p.variables().iter().map(SignMap::identity).collect();
            let out = reduce_then_test(&p, &maps).unwrap();
            let expected = decide(&p).unwrap().verdict;
            match out {
                ReduceOutcome::OriginalInfeasible { result, .. } | ReduceOutcome::Inconclusive { result, .. } => {
                    assert_eq!(result.verdict, expected)
                }
                ReduceOutcome::Underdetermined { .. } => panic!("identity maps need only given moments"),
            }
        }
    }

    #[test]
    fn underdetermined_is_reported() {
        let vars =
            vec![FiniteRandomVariable::from_ints("A", &[-1, 0, 1]), FiniteRandomVariable::from_ints("B", &[-1, 0, 1])];
        let cs = vec![
            MomentConstraint::eq(Monomial::product(&["A"]).unwrap(), qi(0)),
            MomentConstraint::eq(Monomial::product(&["A", "B"]).unwrap(), qi(0)),
        ];
        let p = MomentProblem::new(vars, cs, "").unwrap();
        let maps: Vec<_> = p.variables().iter().map(SignMap::nonnegative_plus).collect();
        match reduce_then_test(&p, &maps).unwrap() {
            ReduceOutcome::Underdetermined { missing } => {
                assert!(missing.contains(&Monomial::new([("A", 2)]).unwrap()));
                assert!(missing.contains(&Monomial::new([("A", 2), ("B", 2)]).unwrap()));
            }
            other => panic!("expected underdetermined, got {other:?}"),
        }
    }

    #[test]
    fn malformed_maps() {
        let p = pm1_triple(qi(0), qi(0), qi(0));
        let maps: Vec<_> = p.variables().iter().map(SignMap::identity).collect();
        let mut bad = maps.clone();
        bad[0].values.insert(qi(1), 0);
        assert!(matches!(reduce_then_test(&p, &bad), Err(Error::MalformedFunction { .. })));
        assert!(matches!(reduce_then_test(&p, &maps[1..]), Err(Error::ConstraintMismatch(_))));
    }
}
