//! Hidden-variable models: construction from a joint distribution and the
//! factorization and noncontextuality checks.

mod exchangeable;

use std::collections::{BTreeMap, BTreeSet};

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::probability::{
    atom_label, check_unique_names, lattice, Atom, FiniteRandomVariable, JointDistribution, Monomial,
};
use crate::scalar::Q;

pub use exchangeable::{exchangeable_symmetric_construct, exchangeable_symmetric_criterion, SymmetricVerdict};

/// One value of the hidden variable with its probability and the conditional
/// joint distribution of the observables given that value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaPoint {
    pub label: String,
    pub probability: Q,
    pub conditional: JointDistribution,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenVariableModel {
    variables: Vec<FiniteRandomVariable>,
    points: Vec<LambdaPoint>,
    /// per-context λ probabilities, aligned with `points`; empty for a single global λ
    context_tables: BTreeMap<String, Vec<Q>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorizationOrder {
    /// `E(X₁⋯Xₙ | λ) = Π E(Xᵢ | λ)`
    First,
    /// the first-order condition plus the same identity for squares
    Second,
    /// the conditional pmf is the product of its marginals
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationReport {
    pub holds: bool,
    /// largest absolute gap over all checked identities, exact
    pub worst_discrepancy: Q,
    pub worst_point: Option<String>,
}

/// A measurement context: a label and the variables measured together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub label: String,
    pub variables: Vec<String>,
}

impl HiddenVariableModel {
    /// Validates λ probabilities (non-negative, summing to one) and that every
    /// conditional is over `variables`.
    pub fn new(variables: Vec<FiniteRandomVariable>, points: Vec<LambdaPoint>) -> Result<Self> {
        check_unique_names(&variables)?;
        if points.is_empty() {
            return Err(Error::InvalidDistribution("a hidden variable needs at least one point".into()));
        }
        let mut labels = BTreeSet::new();
        let mut total = Q::zero();
        for p in &points {
            if p.probability.is_negative() {
                return Err(Error::InvalidDistribution(format!("λ point {} has negative probability", p.label)));
            }
            if p.conditional.variables() != variables.as_slice() {
                return Err(Error::InvalidDistribution(format!(
                    "conditional at λ point {} is over different variables",
                    p.label
                )));
            }
            if !labels.insert(p.label.clone()) {
                return Err(Error::InvalidDistribution(format!("duplicate λ label {}", p.label)));
            }
            total += &p.probability;
        }
        if total != Q::from_integer(1.into()) {
            return Err(Error::InvalidDistribution(format!(
                "λ probabilities sum to {}, not 1",
                crate::scalar::fmt_q(&total)
            )));
        }
        Ok(HiddenVariableModel { variables, points, context_tables: BTreeMap::new() })
    }

    /// Attaches a λ distribution specific to one measurement context.
    pub fn with_context_table(mut self, context: impl Into<String>, probabilities: Vec<Q>) -> Result<Self> {
        if probabilities.len() != self.points.len() {
            return Err(Error::DimensionMismatch { expected: self.points.len(), got: probabilities.len() });
        }
        if probabilities.iter().any(|p| p.is_negative()) || probabilities.iter().sum::<Q>() != Q::from_integer(1.into())
        {
            return Err(Error::InvalidDistribution("context λ table must be a probability vector".into()));
        }
        self.context_tables.insert(context.into(), probabilities);
        Ok(self)
    }

    pub fn variables(&self) -> &[FiniteRandomVariable] {
        &self.variables
    }

    pub fn points(&self) -> &[LambdaPoint] {
        &self.points
    }

    pub fn context_tables(&self) -> &BTreeMap<String, Vec<Q>> {
        &self.context_tables
    }

    /// Every conditional is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.points.iter().all(|p| p.conditional.support_len() == 1)
    }

    /// Conditional variance of one variable at each λ point.
    pub fn conditional_variances(&self, name: &str) -> Result<Vec<Q>> {
        self.points.iter().map(|p| p.conditional.variance(name)).collect()
    }

    /// The observable distribution `Σ_λ P(λ)·P(· | λ)`.
    pub fn recompose(&self) -> Result<JointDistribution> {
        let mut mass: BTreeMap<Atom, Q> = BTreeMap::new();
        for p in &self.points {
            for (atom, m) in p.conditional.iter() {
                *mass.entry(atom.clone()).or_default() += &p.probability * m;
            }
        }
        JointDistribution::new(self.variables.clone(), mass)
    }
}

/// One λ point per positive-mass atom, carrying that atom's probability, with a
/// point-mass conditional on the atom.
pub fn construct_deterministic(dist: &JointDistribution) -> Result<HiddenVariableModel> {
    let variables = dist.variables().to_vec();
    let points = dist
        .iter()
        .map(|(atom, m)| {
            Ok(LambdaPoint {
                label: atom_label(atom, &variables),
                probability: m.clone(),
                conditional: JointDistribution::point_mass(variables.clone(), atom.clone())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    HiddenVariableModel::new(variables, points)
}

pub fn verify_factorization(model: &HiddenVariableModel, order: FactorizationOrder) -> Result<FactorizationReport> {
    let mut worst = Q::zero();
    let mut worst_point = None;
    let names: Vec<&str> = model.variables.iter().map(|v| v.name()).collect();
    for p in &model.points {
        let gap = match order {
            FactorizationOrder::First => moment_gap(&p.conditional, &names, 1)?,
            FactorizationOrder::Second => {
                let a = moment_gap(&p.conditional, &names, 1)?;
                let b = moment_gap(&p.conditional, &names, 2)?;
                a.max(b)
            }
            FactorizationOrder::Full => pmf_gap(&p.conditional)?,
        };
        if gap > worst {
            worst = gap;
            worst_point = Some(p.label.clone());
        }
    }
    Ok(FactorizationReport { holds: worst.is_zero(), worst_discrepancy: worst, worst_point })
}

/// `|E(Π Xᵢ^k) - Π E(Xᵢ^k)|` under one conditional.
fn moment_gap(dist: &JointDistribution, names: &[&str], k: u32) -> Result<Q> {
    let joint = dist.expectation(&Monomial::new(names.iter().map(|n| (*n, k)))?)?;
    let mut product = Q::from_integer(1.into());
    for n in names {
        product *= dist.expectation(&Monomial::new([(*n, k)])?)?;
    }
    Ok((joint - product).abs())
}

/// Largest `|P(a) - Π P(aᵢ)|` over the lattice.
fn pmf_gap(dist: &JointDistribution) -> Result<Q> {
    let vars = dist.variables();
    let marginals: Vec<Vec<Q>> = (0..vars.len())
        .map(|i| {
            let mut m = vec![Q::zero(); vars[i].len()];
            for (atom, p) in dist.iter() {
                m[atom.0[i]] += p;
            }
            m
        })
        .collect();
    let mut worst = Q::zero();
    for atom in lattice(vars) {
        let product: Q = atom.0.iter().enumerate().map(|(i, &j)| marginals[i][j].clone()).product();
        let gap = (dist.mass(&atom) - product).abs();
        if gap > worst {
            worst = gap;
        }
    }
    Ok(worst)
}

/// True iff every declared context sees the same λ distribution.
///
/// Contexts must name known variables and be pairwise disjoint. A model
/// without context tables uses one global λ and always passes.
pub fn verify_noncontextuality(model: &HiddenVariableModel, contexts: &[Context]) -> Result<bool> {
    let mut seen = BTreeSet::new();
    for c in contexts {
        for v in &c.variables {
            if !model.variables.iter().any(|x| x.name() == v) {
                return Err(Error::UnknownVariable(v.clone()));
            }
            if !seen.insert(v.as_str()) {
                return Err(Error::Validation(format!("variable `{v}` appears in two contexts")));
            }
        }
    }
    let global: Vec<&Q> = model.points.iter().map(|p| &p.probability).collect();
    Ok(contexts.iter().all(|c| match model.context_tables.get(&c.label) {
        Some(table) => table.iter().eq(global.iter().copied()),
        None => true,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn six_atom() -> JointDistribution {
        let vars = ["X", "Y", "Z"].map(|n| FiniteRandomVariable::from_ints(n, &[-1, 0, 1])).to_vec();
        let rows = [[-1, 0, 1], [-1, 1, 0], [0, -1, 1], [0, 1, -1], [1, -1, 0], [1, 0, -1]]
            .iter()
            .map(|r| (r.iter().map(|&v| qi(v)).collect(), q(1, 6)))
            .collect();
        JointDistribution::from_values(vars, rows).unwrap()
    }

    #[test]
    fn deterministic_construction_round_trips() {
        let d = six_atom();
        let m = construct_deterministic(&d).unwrap();
        assert_eq!(m.points().len(), 6);
        assert!(m.points().iter().all(|p| p.probability == q(1, 6)));
        assert!(m.is_deterministic());
        assert_eq!(m.points()[0].label, "(-1/1,0/1,1/1)");
        assert_eq!(m.recompose().unwrap(), d);
        for order in [FactorizationOrder::First, FactorizationOrder::Second, FactorizationOrder::Full] {
            assert!(verify_factorization(&m, order).unwrap().holds);
        }
        assert!(m.conditional_variances("Y").unwrap().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn correlated_conditional_fails() {
        let vars = vec![FiniteRandomVariable::pm1("X"), FiniteRandomVariable::pm1("Y")];
        let rows = vec![
            (vec![qi(1), qi(1)], q(5, 16)),
            (vec![qi(-1), qi(-1)], q(5, 16)),
            (vec![qi(1), qi(-1)], q(3, 16)),
            (vec![qi(-1), qi(1)], q(3, 16)),
        ];
        let cond = JointDistribution::from_values(vars.clone(), rows).unwrap();
        let m = HiddenVariableModel::new(
            vars,
            vec![LambdaPoint { label: "l".into(), probability: qi(1), conditional: cond }],
        )
        .unwrap();
        let r = verify_factorization(&m, FactorizationOrder::First).unwrap();
        assert!(!r.holds);
        assert_eq!(r.worst_discrepancy, q(1, 4));
        assert_eq!(r.worst_point.as_deref(), Some("l"));
        assert!(!verify_factorization(&m, FactorizationOrder::Full).unwrap().holds);
        // squares of ±1 are constant, so the second-moment identity alone cannot see it
        assert_eq!(verify_factorization(&m, FactorizationOrder::Second).unwrap().worst_discrepancy, q(1, 4));
    }

    #[test]
    fn noncontextuality() {
        let d = six_atom();
        let m = construct_deterministic(&d).unwrap();
        let ctx = vec![
            Context { label: "xy".into(), variables: vec!["X".into(), "Y".into()] },
            Context { label: "z".into(), variables: vec!["Z".into()] },
        ];
        assert!(verify_noncontextuality(&m, &ctx).unwrap());
        assert!(verify_noncontextuality(&m, &[]).unwrap());
        let mut table = vec![q(1, 6); 6];
        table[0] += q(1, 100);
        table[1] -= q(1, 100);
        let perturbed = m.clone().with_context_table("xy", table).unwrap();
        assert!(!verify_noncontextuality(&perturbed, &ctx).unwrap());
        let same = m.with_context_table("xy", vec![q(1, 6); 6]).unwrap();
        assert!(verify_noncontextuality(&same, &ctx).unwrap());
        let overlapping = vec![
            Context { label: "a".into(), variables: vec!["X".into()] },
            Context { label: "b".into(), variables: vec!["X".into()] },
        ];
        assert!(verify_noncontextuality(&same, &overlapping).is_err());
    }
}
