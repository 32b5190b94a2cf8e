//! Gaussian feasibility from correlation matrices.
//!
//! This is the one floating-point corner of the crate. Verdicts compare the
//! smallest eigenvalue against a tolerance, and values within tolerance of
//! zero are labelled as boundary cases.

mod completion;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::algebraic::Real;
use crate::error::{Error, Result};
use crate::inequality::{cmp_note, holds, named, InequalityId, InequalityReport};
use crate::probability::validate_name;
use crate::scalar::{qi, Q};

pub use completion::{complete_correlations, CompletionMethod, CompletionReport, SEARCH_ITERATIONS, SEARCH_STARTS};

pub const DEFAULT_TOL: f64 = 1e-10;

/// A symmetric unit-diagonal matrix in which some off-diagonal entries may be unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialCorrelationMatrix {
    n: usize,
    entries: Vec<Option<f64>>,
}

impl PartialCorrelationMatrix {
    /// Rows of known (`Some`) and missing (`None`) entries.
    pub fn from_rows(rows: Vec<Vec<Option<f64>>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            for (j, e) in row.into_iter().enumerate() {
                match e {
                    Some(v) if !v.is_finite() || v.abs() > 1.0 => {
                        return Err(Error::OutOfRange { what: format!("correlation ({i},{j})"), value: v.to_string() })
                    }
                    None if i == j => return Err(Error::Validation(format!("diagonal entry {i} is missing"))),
                    Some(v) if i == j && v != 1.0 => {
                        return Err(Error::Validation(format!("diagonal entry {i} is {v}, not 1")))
                    }
                    _ => {}
                }
                entries.push(e);
            }
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::Validation(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(PartialCorrelationMatrix { n, entries })
    }

    pub fn full(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows.into_iter().map(|r| r.into_iter().map(Some).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n * n).map(|k| Some(if k / n == k % n { 1.0 } else { 0.0 })).collect();
        PartialCorrelationMatrix { n, entries }
    }

    /// `n×n` with unit diagonal and every off-diagonal entry missing.
    pub fn unknown(n: usize) -> Self {
        let entries = (0..n * n).map(|k| if k / n == k % n { Some(1.0) } else { None }).collect();
        PartialCorrelationMatrix { n, entries }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<Option<f64>>> {
        self.entries.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    /// Missing positions `(i, j)` with `i < j`, row by row.
    pub fn missing(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j).is_none())
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }

    /// Fills the missing positions, in [`missing`](Self::missing) order.
    pub fn completed(&self, values: &[f64]) -> Result<Self> {
        let missing = self.missing();
        if values.len() != missing.len() {
            return Err(Error::DimensionMismatch { expected: missing.len(), got: values.len() });
        }
        let mut out = self.clone();
        for (&(i, j), &v) in missing.iter().zip(values) {
            out.entries[i * self.n + j] = Some(v);
            out.entries[j * self.n + i] = Some(v);
        }
        Ok(out)
    }

    /// Reorders rows and columns: entry `(i, j)` of the result is `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n || perm.iter().any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Validation("not a permutation".into()));
        }
        let entries = (0..self.n * self.n).map(|k| self.get(perm[k / self.n], perm[k % self.n])).collect();
        Ok(PartialCorrelationMatrix { n: self.n, entries })
    }

    fn matrix(&self) -> Result<DMatrix<f64>> {
        if !self.is_complete() {
            return Err(Error::Validation(format!("{} correlations are missing", self.missing().len())));
        }
        Ok(DMatrix::from_iterator(self.n, self.n, self.entries.iter().map(|e| e.expect("complete"))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GaussianVerdict {
    Feasible,
    Infeasible,
}

impl GaussianVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            GaussianVerdict::Feasible => "feasible",
            GaussianVerdict::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub verdict: GaussianVerdict,
    /// `|λ_min|` is within the tolerance plus the residual bound
    pub boundary: bool,
    pub min_eigenvalue: f64,
    /// ascending
    pub eigenvalues: Vec<f64>,
    /// largest `‖A v - λ v‖₂` over the computed unit eigenpairs; each computed
    /// eigenvalue is within this distance of a true one
    pub residual_bound: f64,
    pub tol: f64,
}

/// Sorted eigenvalues and the largest eigenpair residual.
pub(crate) fn spectrum(m: &DMatrix<f64>) -> (Vec<f64>, f64) {
    let eig = SymmetricEigen::new(m.clone());
    let mut residual: f64 = 0.0;
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        residual = residual.max((m * v - v * *lambda).norm() / v.norm());
    }
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    (values, residual)
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

/// A joint Gaussian with these correlations exists iff the matrix is positive
/// semidefinite; here iff `λ_min ≥ -tol`.
pub fn eigenvalue_feasible(corr: &PartialCorrelationMatrix, tol: f64) -> Result<EigenReport> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::OutOfRange { what: "tolerance".into(), value: tol.to_string() });
    }
    let (eigenvalues, residual_bound) = spectrum(&corr.matrix()?);
    let min_eigenvalue = eigenvalues.first().copied().unwrap_or(f64::INFINITY);
    let verdict = if min_eigenvalue >= -tol { GaussianVerdict::Feasible } else { GaussianVerdict::Infeasible };
    Ok(EigenReport {
        verdict,
        boundary: min_eigenvalue.abs() <= tol + residual_bound,
        min_eigenvalue,
        eigenvalues,
        residual_bound,
        tol,
    })
}

/// `ρ_xy² + ρ_xz² + ρ_yz² ≤ 2·ρ_xy·ρ_yz·ρ_xz + 1`, exact. For three
/// correlations in `[-1, 1]` this is the determinant condition, so it agrees
/// with [`eigenvalue_feasible`].
pub fn det_inequality_3var(rxy: &Q, rxz: &Q, ryz: &Q) -> Result<InequalityReport> {
    let inputs = named(
        &["rho(X,Y)", "rho(X,Z)", "rho(Y,Z)"],
        vec![rxy.clone().into(), rxz.clone().into(), ryz.clone().into()],
        &qi(1),
    )?;
    let lhs = Real::rational(rxy * rxy + rxz * rxz + ryz * ryz);
    let rhs = Real::rational(qi(2) * rxy * ryz * rxz + qi(1));
    let slack = rhs.clone() - lhs.clone();
    let notes = vec![format!("bound {}: {}", holds(&slack), cmp_note(&lhs, "<=", &rhs))];
    Ok(InequalityReport::new(InequalityId::CorrelationTriple, inputs, vec![("bound", slack)], notes))
}

/// Names, means, variances and (possibly partial) correlations of jointly
/// Gaussian candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    pub names: Vec<String>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub correlations: PartialCorrelationMatrix,
}

impl GaussianSpec {
    pub fn new(
        names: Vec<String>,
        means: Vec<f64>,
        variances: Vec<f64>,
        correlations: PartialCorrelationMatrix,
    ) -> Result<Self> {
        let n = names.len();
        for len in [means.len(), variances.len(), correlations.dimension()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &names {
            validate_name(name)?;
            if !seen.insert(name) {
                return Err(Error::InvalidVariable { name: name.clone(), reason: "duplicate name".into() });
            }
        }
        if let Some((name, v)) = names.iter().zip(&variances).find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::OutOfRange {
                what: format!("variance of {name} (must be positive)"),
                value: v.to_string(),
            });
        }
        if let Some((name, m)) = names.iter().zip(&means).find(|(_, m)| !m.is_finite()) {
            return Err(Error::OutOfRange { what: format!("mean of {name}"), value: m.to_string() });
        }
        Ok(GaussianSpec { names, means, variances, correlations })
    }
}

/// Statement that a factoring hidden variable exists for a Gaussian family,
/// with the completed correlation matrix it rests on.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenVariableNote {
    pub statement: String,
    pub completed: PartialCorrelationMatrix,
    pub min_eigenvalue: f64,
    pub completion_method: CompletionMethod,
}

/// A joint Gaussian exists for the (completed) matrix, so a hidden variable
/// with one global distribution that factorizes the second-order moments
/// exists too. No λ is constructed.
pub fn gaussian_hidden_variable_note(spec: &GaussianSpec, tol: f64) -> Result<HiddenVariableNote> {
    let report = complete_correlations(&spec.correlations, tol)?;
    let Some(completed) = report.completion else {
        return Err(Error::Validation(format!(
            "no joint Gaussian: best smallest eigenvalue {:.3e} is below -{tol:e}",
            report.min_eigenvalue
        )));
    };
    Ok(HiddenVariableNote {
        statement: format!(
            "a joint Gaussian distribution of {} exists with these means, variances and correlations; \
             hence a hidden variable with a single distribution across contexts satisfies second-order factorization",
            spec.names.join(", ")
        ),
        completed,
        min_eigenvalue: report.min_eigenvalue,
        completion_method: report.method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn equi(r: f64) -> PartialCorrelationMatrix {
        PartialCorrelationMatrix::full(vec![vec![1.0, r, r], vec![r, 1.0, r], vec![r, r, 1.0]]).unwrap()
    }

    #[test]
    fn eigen_examples() {
        let e = eigenvalue_feasible(&equi(-0.5), DEFAULT_TOL).unwrap();
        assert_eq!(e.verdict, GaussianVerdict::Feasible);
        assert!(e.boundary);
        for (got, want) in e.eigenvalues.iter().zip([0.0, 1.5, 1.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        let id = eigenvalue_feasible(&PartialCorrelationMatrix::identity(4), DEFAULT_TOL).unwrap();
        assert!((id.min_eigenvalue - 1.0).abs() < 1e-15);
        assert!(!id.boundary);
        let bad = PartialCorrelationMatrix::full(vec![vec![1.0, 0.9, 0.9], vec![0.9, 1.0, -0.9], vec![0.9, -0.9, 1.0]])
            .unwrap();
        assert_eq!(eigenvalue_feasible(&bad, DEFAULT_TOL).unwrap().verdict, GaussianVerdict::Infeasible);
    }

    #[test]
    fn matrix_validation() {
        assert!(PartialCorrelationMatrix::full(vec![vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
        assert!(PartialCorrelationMatrix::full(vec![vec![0.9, 0.5], vec![0.5, 1.0]]).is_err());
        assert!(PartialCorrelationMatrix::full(vec![vec![1.0, 1.5], vec![1.5, 1.0]]).is_err());
        assert!(PartialCorrelationMatrix::from_rows(vec![vec![Some(1.0), None], vec![Some(0.1), Some(1.0)]]).is_err());
        assert!(eigenvalue_feasible(&PartialCorrelationMatrix::unknown(2), DEFAULT_TOL).is_err());
    }

    #[test]
    fn det_examples() {
        let h = || q(-1, 2);
        let a = det_inequality_3var(&h(), &h(), &h()).unwrap();
        assert!(a.is_satisfied());
        assert_eq!(a.slack, Real::from_int(0));
        let b = det_inequality_3var(&q(9, 10), &q(-9, 10), &q(9, 10)).unwrap();
        assert!(!b.is_satisfied());
        // 1 - 1458/1000 - 243/100
        assert_eq!(b.slack, Real::rational(q(-2888, 1000)));
        assert_eq!(det_inequality_3var(&qi(0), &qi(0), &qi(0)).unwrap().slack, Real::from_int(1));
    }

    #[test]
    fn notes() {
        let names: Vec<String> = ["X", "Y", "Z"].map(String::from).to_vec();
        let spec = |c| GaussianSpec::new(names.clone(), vec![0.0; 3], vec![1.0; 3], c).unwrap();
        assert!(gaussian_hidden_variable_note(&spec(equi(-0.5)), DEFAULT_TOL).is_ok());
        assert!(gaussian_hidden_variable_note(&spec(PartialCorrelationMatrix::identity(3)), DEFAULT_TOL).is_ok());
        let bad = PartialCorrelationMatrix::full(vec![vec![1.0, 0.9, -0.9], vec![0.9, 1.0, 0.9], vec![-0.9, 0.9, 1.0]])
            .unwrap();
        assert!(gaussian_hidden_variable_note(&spec(bad), DEFAULT_TOL).is_err());
        assert!(GaussianSpec::new(names.clone(), vec![0.0; 3], vec![1.0, 0.0, 1.0], equi(0.0)).is_err());
    }
}
