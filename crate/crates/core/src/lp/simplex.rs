//! Phase-one revised simplex over an exact ordered field.
//!
//! Rows are the normalization row and one row per constraint, sign-flipped so
//! every right-hand side is non-negative. One artificial per row starts basic;
//! an artificial that leaves the basis is never priced again. Entering and
//! leaving choices follow Bland's rule, so the method terminates.

use super::columns::Columns;
use super::{witness_from, Certificate, FeasibilityResult, MomentProblem, Relation};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Columns are cached when the lattice is at most this large.
const CACHE_LIMIT: usize = 1 << 16;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Var {
    Atom(usize),
    /// slack of constraint row `r` (1-based row index), with its sign in the row
    Slack {
        row: usize,
        positive: bool,
    },
    Artificial(usize),
}

struct Tableau<T: Scalar> {
    m: usize,
    binv: Vec<Vec<T>>,
    xb: Vec<T>,
    basis: Vec<usize>,
    flip: Vec<bool>,
    vars: Vec<Var>,
    in_basis: Vec<bool>,
    cache: Option<Vec<Vec<T>>>,
}

pub(crate) fn solve<T: Scalar>(problem: &MomentProblem<T>) -> Result<FeasibilityResult<T>> {
    let columns = Columns::new(problem)?;
    let n = columns.atoms();
    let m = columns.rows();

    let mut rhs = vec![T::one()];
    rhs.extend(problem.constraints().iter().map(|c| c.target.clone()));
    let flip: Vec<bool> = rhs.iter().map(|b| b.is_negative_value()).collect();
    let xb: Vec<T> = rhs.iter().zip(&flip).map(|(b, f)| if *f { -b.clone() } else { b.clone() }).collect();

    // Variable order, which is also Bland's index order: atoms, slacks, artificials.
    let mut vars: Vec<Var> = (0..n).map(Var::Atom).collect();
    for (k, c) in problem.constraints().iter().enumerate() {
        match c.relation {
            Relation::Eq => {}
            // E(m) - s = b
            Relation::AtLeast => vars.push(Var::Slack { row: k + 1, positive: false }),
            // E(m) + s = b
            Relation::AtMost => vars.push(Var::Slack { row: k + 1, positive: true }),
        }
    }
    let first_artificial = vars.len();
    vars.extend((0..m).map(Var::Artificial));

    let mut in_basis = vec![false; vars.len()];
    let basis: Vec<usize> = (0..m).map(|i| first_artificial + i).collect();
    for &b in &basis {
        in_basis[b] = true;
    }
    let binv = (0..m).map(|i| (0..m).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect();

    let mut t = Tableau { m, binv, xb, basis, flip, vars, in_basis, cache: None };
    if n <= CACHE_LIMIT {
        t.cache = Some((0..n).map(|j| t.flipped(columns.column(j))).collect());
    }

    loop {
        let artificial_basic = |t: &Tableau<T>, i: usize| matches!(t.vars[t.basis[i]], Var::Artificial(_));
        if (0..m).all(|i| !artificial_basic(&t, i) || t.xb[i].is_zero()) {
            let masses = (0..m).filter_map(|i| match t.vars[t.basis[i]] {
                Var::Atom(j) => Some((j, t.xb[i].clone())),
                _ => None,
            });
            return Ok(FeasibilityResult::feasible(witness_from(problem, &columns, masses)?));
        }

        // π = c_B·B⁻¹ with unit cost on artificials
        let mut pi = vec![T::zero(); m];
        for i in (0..m).filter(|&i| artificial_basic(&t, i)) {
            for (p, b) in pi.iter_mut().zip(&t.binv[i]) {
                if !b.is_zero() {
                    *p = p.clone() + b.clone();
                }
            }
        }

        let entering =
            (0..first_artificial).find(|&j| !t.in_basis[j] && dot(&pi, &t.column(&columns, j)).is_positive_value());
        let Some(j) = entering else {
            // Optimal with positive infeasibility: y = -σ∘π separates.
            let multipliers = pi.iter().zip(&t.flip).map(|(p, f)| if *f { p.clone() } else { -p.clone() }).collect();
            return Ok(FeasibilityResult::infeasible(Certificate { multipliers }));
        };

        let col = t.column(&columns, j);
        let u: Vec<T> = t.binv.iter().map(|row| dot(row, &col)).collect();
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            if !u[i].is_positive_value() {
                continue;
            }
            let ratio = t.xb[i].clone() / u[i].clone();
            let better = match &leave {
                None => true,
                Some((l, best)) => ratio < *best || (ratio == *best && t.basis[i] < t.basis[*l]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (r, _) = leave.ok_or_else(|| Error::Internal("phase-one objective unbounded".into()))?;
        t.pivot(r, j, &u);
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(
        T::zero(),
        |acc, (x, y)| {
            if x.is_zero() || y.is_zero() {
                acc
            } else {
                acc + x.clone() * y.clone()
            }
        },
    )
}

impl<T: Scalar> Tableau<T> {
    fn flipped(&self, mut col: Vec<T>) -> Vec<T> {
        for (c, f) in col.iter_mut().zip(&self.flip) {
            if *f {
                *c = -c.clone();
            }
        }
        col
    }

    /// Column of variable `j` in the sign-flipped system.
    fn column(&self, columns: &Columns<T>, j: usize) -> Vec<T> {
        match self.vars[j] {
            Var::Atom(a) => match &self.cache {
                Some(cache) => cache[a].clone(),
                None => self.flipped(columns.column(a)),
            },
            Var::Slack { row, positive } => {
                let mut col = vec![T::zero(); self.m];
                col[row] = if positive != self.flip[row] { T::one() } else { -T::one() };
                col
            }
            Var::Artificial(i) => {
                let mut col = vec![T::zero(); self.m];
                col[i] = T::one();
                col
            }
        }
    }

    fn pivot(&mut self, r: usize, entering: usize, u: &[T]) {
        let pivot = u[r].clone();
        let row_r: Vec<T> = self.binv[r].iter().map(|v| v.clone() / pivot.clone()).collect();
        let x_r = self.xb[r].clone() / pivot;
        for i in 0..self.m {
            if i == r || u[i].is_zero() {
                continue;
            }
            let factor = u[i].clone();
            for (v, w) in self.binv[i].iter_mut().zip(&row_r) {
                if !w.is_zero() {
                    *v = v.clone() - factor.clone() * w.clone();
                }
            }
            self.xb[i] = self.xb[i].clone() - factor * x_r.clone();
        }
        self.binv[r] = row_r;
        self.xb[r] = x_r;
        self.in_basis[self.basis[r]] = false;
        self.basis[r] = entering;
        self.in_basis[entering] = true;
    }
}
