use super::problem::{pow, MomentProblem};
use crate::error::{Error, Result};
use crate::probability::{lattice_size, Atom, FiniteRandomVariable};
use crate::scalar::Scalar;

/// Constraint-row values of each atom: row 0 is the constant 1, row `k` the
/// `k`-th constraint's monomial.
pub(crate) struct Columns<T: Scalar> {
    radices: Vec<usize>,
    /// per constraint: (variable position, powers of that variable's support)
    factors: Vec<Vec<(usize, Vec<T>)>>,
    n: usize,
}

impl<T: Scalar> Columns<T> {
    pub fn new(problem: &MomentProblem<T>) -> Result<Self> {
        let vars: &[FiniteRandomVariable] = problem.variables();
        let n = lattice_size(vars)
            .ok_or_else(|| Error::AtomCapExceeded { atoms: problem.atom_count().to_string(), cap: usize::MAX })?;
        let factors = problem
            .constraints()
            .iter()
            .map(|c| {
                let resolved = c.monomial.resolve(vars)?;
                Ok(resolved
                    .into_iter()
                    .map(|(i, k)| (i, vars[i].support().iter().map(|v| T::from(pow(v, k))).collect()))
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Columns { radices: vars.iter().map(|v| v.len()).collect(), factors, n })
    }

    pub fn atoms(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.factors.len() + 1
    }

    pub fn decode(&self, mut j: usize) -> Atom {
        let mut idx = vec![0; self.radices.len()];
        for (slot, r) in idx.iter_mut().zip(&self.radices).rev() {
            *slot = j % r;
            j /= r;
        }
        Atom(idx)
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        let atom = self.decode(j);
        let mut col = Vec::with_capacity(self.rows());
        col.push(T::one());
        for f in &self.factors {
            let v = f.iter().fold(
                T::one(),
                |acc, (i, powers)| {
                    if acc.is_zero() {
                        acc
                    } else {
                        acc * powers[atom.0[*i]].clone()
                    }
                },
            );
            col.push(v);
        }
        col
    }
}
