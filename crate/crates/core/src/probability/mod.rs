//! Finite random variables, exact joint distributions and their moments.

mod correlation;
pub mod lemmas;
mod pushforward;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{fmt_q, qi, Scalar, Q};

pub use correlation::{correlation, default_width, Correlation, CorrelationValue};
pub use pushforward::{pushforward, NamedFunction, Rule};

/// A named observable with a finite, strictly increasing rational support.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteRandomVariable {
    name: String,
    support: Vec<Q>,
}

impl FiniteRandomVariable {
    pub fn new(name: impl Into<String>, support: Vec<Q>) -> Result<Self> {
        let name = name.into();
        validate_name(&name)?;
        if support.is_empty() {
            return Err(Error::InvalidVariable { name, reason: "support is empty".into() });
        }
        if let Some(w) = support.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidVariable {
                name,
                reason: format!("support must be strictly increasing, found {} before {}", fmt_q(&w[0]), fmt_q(&w[1])),
            });
        }
        Ok(FiniteRandomVariable { name, support })
    }

    /// A `{-1, +1}` valued variable.
    pub fn pm1(name: impl Into<String>) -> Self {
        Self::from_ints(name, &[-1, 1])
    }

    /// Convenience constructor for integer supports; panics on an invalid name or support.
    pub fn from_ints(name: impl Into<String>, values: &[i64]) -> Self {
        Self::new(name, values.iter().map(|&v| qi(v)).collect()).expect("valid integer support")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> &[Q] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn index_of(&self, value: &Q) -> Option<usize> {
        self.support.binary_search(value).ok()
    }

    pub fn value(&self, index: usize) -> &Q {
        &self.support[index]
    }

    pub fn min(&self) -> &Q {
        &self.support[0]
    }

    pub fn max(&self) -> &Q {
        self.support.last().expect("non-empty support")
    }
}

/// Identifiers: a letter or `_`, then letters, digits, `_` or `'`.
pub fn validate_name(name: &str) -> Result<()> {
    let mut chars = name.chars();
    let ok = match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidVariable {
            name: name.to_string(),
            reason: "names must be identifiers (letter or `_`, then letters, digits, `_` or `'`)".into(),
        })
    }
}

pub(crate) fn check_unique_names(variables: &[FiniteRandomVariable]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for v in variables {
        if !seen.insert(v.name()) {
            return Err(Error::InvalidVariable {
                name: v.name().to_string(),
                reason: "duplicate variable name".into(),
            });
        }
    }
    Ok(())
}

/// One joint outcome: a support index per variable, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(pub Vec<usize>);

impl Atom {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn values<'a>(&'a self, variables: &'a [FiniteRandomVariable]) -> impl Iterator<Item = &'a Q> + 'a {
        self.0.iter().zip(variables).map(|(&i, v)| v.value(i))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A set of atoms, standing for an event.
pub type Event = BTreeSet<Atom>;

/// Number of atoms in the product lattice, or `None` on overflow.
pub fn lattice_size(variables: &[FiniteRandomVariable]) -> Option<usize> {
    variables.iter().try_fold(1usize, |acc, v| acc.checked_mul(v.len()))
}

/// Every atom of the lattice, in lexicographic order of indices.
pub fn lattice(variables: &[FiniteRandomVariable]) -> impl Iterator<Item = Atom> + '_ {
    let radices: Vec<usize> = variables.iter().map(|v| v.len()).collect();
    let total = lattice_size(variables).expect("lattice size overflow");
    (0..total).map(move |mut k| {
        let mut idx = vec![0; radices.len()];
        for (slot, r) in idx.iter_mut().zip(&radices).rev() {
            *slot = k % r;
            k /= r;
        }
        Atom(idx)
    })
}

/// Human-readable rendering of an atom's values, e.g. `(-1/1,0/1,1/1)`.
pub fn atom_label(atom: &Atom, variables: &[FiniteRandomVariable]) -> String {
    let parts: Vec<String> = atom.values(variables).map(fmt_q).collect();
    format!("({})", parts.join(","))
}

/// A product monomial `Π Xᵢ^kᵢ` with positive exponents, keyed by variable name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(BTreeMap<String, u32>);

impl Monomial {
    pub fn new<S: Into<String>>(exponents: impl IntoIterator<Item = (S, u32)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (name, k) in exponents {
            let name = name.into();
            if k == 0 {
                return Err(Error::Validation(format!("exponent of `{name}` must be positive")));
            }
            if map.insert(name.clone(), k).is_some() {
                return Err(Error::Validation(format!("variable `{name}` repeated in a monomial")));
            }
        }
        if map.is_empty() {
            return Err(Error::Validation("a monomial needs at least one variable".into()));
        }
        Ok(Monomial(map))
    }

    /// Product of the named variables, each to the first power.
    pub fn product(names: &[&str]) -> Result<Self> {
        Self::new(names.iter().map(|n| (*n, 1)))
    }

    pub fn exponents(&self) -> &BTreeMap<String, u32> {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn max_exponent(&self) -> u32 {
        self.0.values().copied().max().unwrap_or(0)
    }

    /// `(variable position, exponent)` pairs resolved against `variables`.
    pub fn resolve(&self, variables: &[FiniteRandomVariable]) -> Result<Vec<(usize, u32)>> {
        self.0
            .iter()
            .map(|(name, &k)| {
                variables.iter().position(|v| v.name() == name).map(|i| (i, k)).ok_or_else(|| {
                    Error::ConstraintMismatch(format!("monomial {self} names unknown variable `{name}`"))
                })
            })
            .collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.0.iter().map(|(n, k)| if *k == 1 { n.clone() } else { format!("{n}^{k}") }).collect();
        write!(f, "E({})", parts.join("*"))
    }
}

/// Value of a resolved monomial at an atom.
pub(crate) fn monomial_value(resolved: &[(usize, u32)], atom: &Atom, variables: &[FiniteRandomVariable]) -> Q {
    let mut acc = Q::one();
    for &(i, k) in resolved {
        let v = variables[i].value(atom.0[i]);
        for _ in 0..k {
            acc *= v;
        }
    }
    acc
}

/// Exact probability assignment over the atom lattice; absent atoms have mass zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution<T: Scalar = Q> {
    variables: Vec<FiniteRandomVariable>,
    mass: BTreeMap<Atom, T>,
}

impl<T: Scalar> JointDistribution<T> {
    /// Validates masses (non-negative, summing to one, atoms in range); zero masses are dropped.
    pub fn new(variables: Vec<FiniteRandomVariable>, mass: BTreeMap<Atom, T>) -> Result<Self> {
        check_unique_names(&variables)?;
        let mut total = T::zero();
        let mut kept = BTreeMap::new();
        for (atom, m) in mass {
            if atom.0.len() != variables.len() {
                return Err(Error::InvalidDistribution(format!(
                    "atom {atom} has {} indices for {} variables",
                    atom.0.len(),
                    variables.len()
                )));
            }
            if let Some((i, v)) = atom.0.iter().zip(&variables).find(|(i, v)| **i >= v.len()) {
                return Err(Error::InvalidDistribution(format!(
                    "atom {atom} index {i} is outside the support of `{}`",
                    v.name()
                )));
            }
            if m.is_negative_value() {
                return Err(Error::InvalidDistribution(format!("atom {atom} has negative mass {}", m.exact_string())));
            }
            if !m.is_zero() {
                total = total + m.clone();
                kept.insert(atom, m);
            }
        }
        if total != T::one() {
            return Err(Error::InvalidDistribution(format!("masses sum to {}, not 1", total.exact_string())));
        }
        Ok(JointDistribution { variables, mass: kept })
    }

    /// Builds from `(values, mass)` rows; repeated value tuples accumulate.
    pub fn from_values(variables: Vec<FiniteRandomVariable>, rows: Vec<(Vec<Q>, T)>) -> Result<Self> {
        let mut mass: BTreeMap<Atom, T> = BTreeMap::new();
        for (values, m) in rows {
            if values.len() != variables.len() {
                return Err(Error::InvalidDistribution(format!(
                    "row has {} values for {} variables",
                    values.len(),
                    variables.len()
                )));
            }
            let idx = values
                .iter()
                .zip(&variables)
                .map(|(x, v)| {
                    v.index_of(x)
                        .ok_or_else(|| Error::OutOfRange { what: format!("variable `{}`", v.name()), value: fmt_q(x) })
                })
                .collect::<Result<Vec<_>>>()?;
            let entry = mass.entry(Atom(idx)).or_insert_with(T::zero);
            *entry = entry.clone() + m;
        }
        Self::new(variables, mass)
    }

    pub fn point_mass(variables: Vec<FiniteRandomVariable>, atom: Atom) -> Result<Self> {
        Self::new(variables, BTreeMap::from([(atom, T::one())]))
    }

    pub fn variables(&self) -> &[FiniteRandomVariable] {
        &self.variables
    }

    pub fn variable_index(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name() == name)
            .ok_or_else(|| Error::ConstraintMismatch(format!("unknown variable `{name}`")))
    }

    pub fn variable(&self, name: &str) -> Result<&FiniteRandomVariable> {
        Ok(&self.variables[self.variable_index(name)?])
    }

    /// Atoms with positive mass, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &T)> {
        self.mass.iter()
    }

    pub fn mass(&self, atom: &Atom) -> T {
        self.mass.get(atom).cloned().unwrap_or_else(T::zero)
    }

    pub fn support_len(&self) -> usize {
        self.mass.len()
    }

    pub fn masses(&self) -> &BTreeMap<Atom, T> {
        &self.mass
    }

    /// Exact `E(monomial)`.
    pub fn expectation(&self, monomial: &Monomial) -> Result<T> {
        let resolved = monomial.resolve(&self.variables)?;
        Ok(self.expectation_resolved(&resolved))
    }

    pub(crate) fn expectation_resolved(&self, resolved: &[(usize, u32)]) -> T {
        self.mass.iter().fold(T::zero(), |acc, (atom, m)| {
            acc + m.clone() * T::from(monomial_value(resolved, atom, &self.variables))
        })
    }

    pub fn probability(&self, event: &Event) -> T {
        event.iter().fold(T::zero(), |acc, a| acc + self.mass(a))
    }

    /// Probability of the atoms satisfying `pred`.
    pub fn probability_where(&self, mut pred: impl FnMut(&Atom) -> bool) -> T {
        self.mass.iter().filter(|(a, _)| pred(a)).fold(T::zero(), |acc, (_, m)| acc + m.clone())
    }

    /// `P(a | b)`, or `None` when `P(b) = 0`.
    pub fn conditional(&self, a: &Event, b: &Event) -> Option<T> {
        let pb = self.probability(b);
        if pb.is_zero() {
            return None;
        }
        let pab = b.iter().filter(|x| a.contains(x)).fold(T::zero(), |acc, x| acc + self.mass(x));
        Some(pab / pb)
    }

    /// The lattice atoms satisfying `pred`.
    pub fn event_where(&self, pred: impl Fn(&Atom) -> bool) -> Event {
        lattice(&self.variables).filter(|a| pred(a)).collect()
    }

    /// Marginal over the named variables, in the order given.
    pub fn marginal(&self, names: &[&str]) -> Result<Self> {
        let idx = names.iter().map(|n| self.variable_index(n)).collect::<Result<Vec<_>>>()?;
        let variables = idx.iter().map(|&i| self.variables[i].clone()).collect();
        let mut mass: BTreeMap<Atom, T> = BTreeMap::new();
        for (atom, m) in &self.mass {
            let key = Atom(idx.iter().map(|&i| atom.0[i]).collect());
            let entry = mass.entry(key).or_insert_with(T::zero);
            *entry = entry.clone() + m.clone();
        }
        Self::new(variables, mass)
    }

    pub fn value_of(&self, atom: &Atom, var: usize) -> &Q {
        self.variables[var].value(atom.0[var])
    }
}

impl JointDistribution<Q> {
    /// Uniform mass on every atom of the lattice.
    pub fn uniform(variables: Vec<FiniteRandomVariable>) -> Result<Self> {
        let n = lattice_size(&variables)
            .ok_or_else(|| Error::Validation("lattice too large for a uniform distribution".into()))?;
        let each = Q::new(1.into(), n.into());
        let mass = lattice(&variables).map(|a| (a, each.clone())).collect();
        Self::new(variables, mass)
    }

    /// Product of independent one-variable marginals.
    pub fn independent(marginals: Vec<(FiniteRandomVariable, Vec<Q>)>) -> Result<Self> {
        for (v, p) in &marginals {
            if p.len() != v.len() {
                return Err(Error::InvalidDistribution(format!(
                    "marginal of `{}` has {} masses for {} values",
                    v.name(),
                    p.len(),
                    v.len()
                )));
            }
        }
        let variables: Vec<_> = marginals.iter().map(|(v, _)| v.clone()).collect();
        let mass = lattice(&variables)
            .map(|a| {
                let m = a.0.iter().zip(&marginals).map(|(&i, (_, p))| p[i].clone()).product();
                (a, m)
            })
            .filter(|(_, m): &(Atom, Q)| !m.is_zero())
            .collect();
        Self::new(variables, mass)
    }

    /// Exact variance of one variable.
    pub fn variance(&self, name: &str) -> Result<Q> {
        let m1 = self.expectation(&Monomial::new([(name, 1)])?)?;
        let m2 = self.expectation(&Monomial::new([(name, 2)])?)?;
        Ok(m2 - &m1 * &m1)
    }

    /// Exact covariance of two distinct variables.
    pub fn covariance(&self, x: &str, y: &str) -> Result<Q> {
        if x == y {
            return self.variance(x);
        }
        let exy = self.expectation(&Monomial::product(&[x, y])?)?;
        let ex = self.expectation(&Monomial::new([(x, 1)])?)?;
        let ey = self.expectation(&Monomial::new([(y, 1)])?)?;
        Ok(exy - ex * ey)
    }

    /// Same distribution with every value of every variable multiplied by `factor > 0`.
    pub fn rescaled(&self, factor: &Q) -> Result<Self> {
        if factor <= &Q::zero() {
            return Err(Error::Validation("rescaling factor must be positive".into()));
        }
        let variables = self
            .variables
            .iter()
            .map(|v| FiniteRandomVariable::new(v.name(), v.support().iter().map(|x| x * factor).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(variables, self.mass.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    pub(crate) fn six_atom() -> JointDistribution {
        let vars = ["X", "Y", "Z"].map(|n| FiniteRandomVariable::from_ints(n, &[-1, 0, 1])).to_vec();
        let rows = [[-1, 0, 1], [-1, 1, 0], [0, -1, 1], [0, 1, -1], [1, -1, 0], [1, 0, -1]]
            .iter()
            .map(|r| (r.iter().map(|&v| qi(v)).collect(), q(1, 6)))
            .collect();
        JointDistribution::from_values(vars, rows).unwrap()
    }

    #[test]
    fn variable_validation() {
        assert!(FiniteRandomVariable::new("X", vec![]).is_err());
        assert!(FiniteRandomVariable::new("X", vec![qi(1), qi(1)]).is_err());
        assert!(FiniteRandomVariable::new("X", vec![qi(1), qi(0)]).is_err());
        assert!(FiniteRandomVariable::new("1X", vec![qi(1)]).is_err());
        assert!(FiniteRandomVariable::new("A'", vec![qi(1)]).is_ok());
    }

    #[test]
    fn distribution_validation() {
        let x = FiniteRandomVariable::pm1("X");
        let half = q(1, 2);
        let ok = BTreeMap::from([(Atom(vec![0]), half.clone()), (Atom(vec![1]), half.clone())]);
        assert!(JointDistribution::new(vec![x.clone()], ok).is_ok());
        let short = BTreeMap::from([(Atom(vec![0]), half.clone())]);
        assert!(JointDistribution::new(vec![x.clone()], short).is_err());
        let neg = BTreeMap::from([(Atom(vec![0]), q(3, 2)), (Atom(vec![1]), -half.clone())]);
        assert!(JointDistribution::new(vec![x.clone()], neg).is_err());
        let out = BTreeMap::from([(Atom(vec![2]), Q::one())]);
        assert!(JointDistribution::new(vec![x.clone()], out).is_err());
        assert!(JointDistribution::<Q>::new(vec![x.clone(), x], BTreeMap::new()).is_err());
    }

    #[test]
    fn six_atom_moments() {
        let d = six_atom();
        assert_eq!(d.expectation(&Monomial::product(&["X", "Y"]).unwrap()).unwrap(), q(-1, 3));
        assert_eq!(d.variance("Z").unwrap(), q(2, 3));
        let scaled = d.rescaled(&qi(2)).unwrap();
        assert_eq!(scaled.covariance("X", "Y").unwrap(), q(-4, 3));
        assert!(Monomial::new([("X", 0)]).is_err());
        assert!(matches!(d.expectation(&Monomial::new([("W", 1)]).unwrap()), Err(Error::ConstraintMismatch(_))));
    }

    #[test]
    fn lattice_order_and_marginals() {
        let vars = vec![FiniteRandomVariable::pm1("A"), FiniteRandomVariable::from_ints("B", &[0, 1, 2])];
        let atoms: Vec<_> = lattice(&vars).collect();
        assert_eq!(atoms.len(), 6);
        assert_eq!(atoms[1], Atom(vec![0, 1]));
        assert_eq!(atoms[3], Atom(vec![1, 0]));
        let d = six_atom();
        let m = d.marginal(&["Z", "X"]).unwrap();
        assert_eq!(m.variables()[0].name(), "Z");
        assert_eq!(m.mass(&Atom(vec![2, 0])), q(1, 6));
        assert_eq!(m.mass(&Atom(vec![0, 0])), Q::zero());
    }
}
