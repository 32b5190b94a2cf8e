use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::{lattice, Atom, FiniteRandomVariable, JointDistribution};
use crate::error::{Error, Result};
use crate::scalar::{fmt_q, Q};

pub type ValueFn = Arc<dyn Fn(&[Q]) -> Q + Send + Sync>;

/// How a derived variable is computed from its input variables' values.
#[derive(Clone)]
pub enum Rule {
    /// `constant + Σ coefficients[i]·inputs[i]`.
    Linear {
        coefficients: Vec<Q>,
        constant: Q,
    },
    /// Explicit value for every tuple of input values.
    Table(BTreeMap<Vec<Q>, Q>),
    Custom(ValueFn),
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Linear { coefficients, constant } => f
                .debug_struct("Linear")
                .field("coefficients", &coefficients.iter().map(fmt_q).collect::<Vec<_>>())
                .field("constant", &fmt_q(constant))
                .finish(),
            Rule::Table(t) => write!(f, "Table({} rows)", t.len()),
            Rule::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A finite-valued function of some of the variables, producing a new named variable.
#[derive(Debug, Clone)]
pub struct NamedFunction {
    pub name: String,
    pub inputs: Vec<String>,
    pub rule: Rule,
}

impl NamedFunction {
    pub fn linear(name: &str, terms: &[(&str, Q)], constant: Q) -> Self {
        NamedFunction {
            name: name.into(),
            inputs: terms.iter().map(|(n, _)| n.to_string()).collect(),
            rule: Rule::Linear { coefficients: terms.iter().map(|(_, c)| c.clone()).collect(), constant },
        }
    }

    pub fn table(name: &str, inputs: &[&str], table: BTreeMap<Vec<Q>, Q>) -> Self {
        NamedFunction {
            name: name.into(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            rule: Rule::Table(table),
        }
    }

    pub fn custom(name: &str, inputs: &[&str], f: impl Fn(&[Q]) -> Q + Send + Sync + 'static) -> Self {
        NamedFunction {
            name: name.into(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            rule: Rule::Custom(Arc::new(f)),
        }
    }

    fn malformed(&self, reason: impl Into<String>) -> Error {
        Error::MalformedFunction { name: self.name.clone(), reason: reason.into() }
    }

    fn eval(&self, args: &[Q]) -> Result<Q> {
        match &self.rule {
            Rule::Linear { coefficients, constant } => {
                Ok(coefficients.iter().zip(args).fold(constant.clone(), |acc, (c, x)| acc + c * x))
            }
            Rule::Table(t) => t.get(args).cloned().ok_or_else(|| {
                let shown: Vec<String> = args.iter().map(fmt_q).collect();
                self.malformed(format!("table has no row for ({})", shown.join(",")))
            }),
            Rule::Custom(f) => Ok(f(args)),
        }
    }
}

/// Joint distribution of `fns` applied to `dist`.
///
/// Each output variable's support is the function's range over the full
/// lattice of its inputs, so values of probability zero still appear in the
/// support (and in the output table with mass zero).
pub fn pushforward(dist: &JointDistribution, fns: &[NamedFunction]) -> Result<JointDistribution> {
    let mut positions = Vec::with_capacity(fns.len());
    let mut outputs = Vec::with_capacity(fns.len());
    for f in fns {
        if let Rule::Linear { coefficients, .. } = &f.rule {
            if coefficients.len() != f.inputs.len() {
                return Err(f.malformed("one coefficient per input is required"));
            }
        }
        let pos = f
            .inputs
            .iter()
            .map(|n| dist.variable_index(n).map_err(|_| f.malformed(format!("unknown input `{n}`"))))
            .collect::<Result<Vec<_>>>()?;
        let inputs: Vec<FiniteRandomVariable> = pos.iter().map(|&i| dist.variables()[i].clone()).collect();
        let mut range = BTreeSet::new();
        for atom in lattice(&inputs) {
            let args: Vec<Q> = atom.values(&inputs).cloned().collect();
            range.insert(f.eval(&args)?);
        }
        outputs.push(FiniteRandomVariable::new(f.name.clone(), range.into_iter().collect())?);
        positions.push(pos);
    }

    let mut mass: BTreeMap<Atom, Q> = BTreeMap::new();
    for (atom, m) in dist.iter() {
        let mut idx = Vec::with_capacity(fns.len());
        for ((f, pos), out) in fns.iter().zip(&positions).zip(&outputs) {
            let args: Vec<Q> = pos.iter().map(|&i| dist.value_of(atom, i).clone()).collect();
            let y = f.eval(&args)?;
            idx.push(out.index_of(&y).ok_or_else(|| f.malformed("value outside its lattice range"))?);
        }
        *mass.entry(Atom(idx)).or_default() += m;
    }
    JointDistribution::new(outputs, mass)
}
