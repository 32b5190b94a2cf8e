use std::cmp::Ordering;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{min_eigenvalue, PartialCorrelationMatrix};
use crate::error::{Error, Result};

pub const SEARCH_STARTS: usize = 32;
pub const SEARCH_ITERATIONS: usize = 200;
const MAX_DIMENSION: usize = 8;
const MAX_MISSING: usize = 6;
const SEED: u64 = 0x6a75_6e65_7331;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompletionMethod {
    /// nothing was missing
    Given,
    /// one missing entry in a 3×3 matrix: midpoint of the exact feasible interval
    ClosedForm,
    /// multi-start pattern search maximizing the smallest eigenvalue
    Search,
}

impl CompletionMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CompletionMethod::Given => "given",
            CompletionMethod::ClosedForm => "closed-form",
            CompletionMethod::Search => "search",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionReport {
    /// present iff the best completion has `λ_min ≥ -tol`
    pub completion: Option<PartialCorrelationMatrix>,
    /// missing positions and the values chosen for them
    pub values: Vec<((usize, usize), f64)>,
    pub min_eigenvalue: f64,
    pub method: CompletionMethod,
    /// feasible range of the single missing entry, for the closed-form case
    pub interval: Option<(f64, f64)>,
}

/// Fills the missing correlations so as to maximize the smallest eigenvalue.
pub fn complete_correlations(corr: &PartialCorrelationMatrix, tol: f64) -> Result<CompletionReport> {
    let n = corr.dimension();
    let missing = corr.missing();
    if n > MAX_DIMENSION || missing.len() > MAX_MISSING {
        return Err(Error::OutOfRange {
            what: format!("completion size (at most {MAX_DIMENSION} variables and {MAX_MISSING} missing entries)"),
            value: format!("{n} variables, {} missing", missing.len()),
        });
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::OutOfRange { what: "tolerance".into(), value: tol.to_string() });
    }

    let (values, method, interval) = match missing.as_slice() {
        [] => (vec![], CompletionMethod::Given, None),
        [(i, j)] if n == 3 => {
            let k = 3 - i - j;
            let (r1, r2) = (corr.get(*i, k).expect("known"), corr.get(*j, k).expect("known"));
            let half = ((1.0 - r1 * r1) * (1.0 - r2 * r2)).max(0.0).sqrt();
            let mid = r1 * r2;
            (vec![mid], CompletionMethod::ClosedForm, Some(((mid - half).max(-1.0), (mid + half).min(1.0))))
        }
        _ => (search(corr, &missing)?, CompletionMethod::Search, None),
    };

    let filled = corr.completed(&values)?;
    let min = min_eigenvalue(&filled.matrix()?);
    Ok(CompletionReport {
        completion: (min >= -tol).then_some(filled),
        values: missing.into_iter().zip(values).collect(),
        min_eigenvalue: min,
        method,
        interval,
    })
}

struct Objective<'a> {
    base: DMatrix<f64>,
    missing: &'a [(usize, usize)],
}

impl Objective<'_> {
    fn eval(&self, x: &[f64]) -> f64 {
        let mut m = self.base.clone();
        for (&(i, j), &v) in self.missing.iter().zip(x) {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        min_eigenvalue(&m)
    }
}

/// Larger objective wins; ties go to the lexicographically smaller point.
fn better(a: (f64, &[f64]), b: (f64, &[f64])) -> bool {
    match a.0.total_cmp(&b.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.1.iter().zip(b.1).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()) == Some(Ordering::Less),
    }
}

fn search(corr: &PartialCorrelationMatrix, missing: &[(usize, usize)]) -> Result<Vec<f64>> {
    let zeros = vec![0.0; missing.len()];
    let objective = Objective { base: corr.completed(&zeros)?.matrix()?, missing };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in 0..SEARCH_STARTS {
        let x0 =
            if start == 0 { zeros.clone() } else { (0..missing.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect() };
        let (f, x) = refine(&objective, x0);
        if best.as_ref().is_none_or(|(bf, bx)| better((f, &x), (*bf, bx))) {
            best = Some((f, x));
        }
    }
    Ok(best.expect("at least one start").1)
}

/// Compass search: try ±step along each coordinate, halve the step when nothing improves.
fn refine(objective: &Objective<'_>, mut x: Vec<f64>) -> (f64, Vec<f64>) {
    let mut f = objective.eval(&x);
    let mut step = 0.5;
    for _ in 0..SEARCH_ITERATIONS {
        let mut moved = false;
        for k in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[k] = (y[k] + dir * step).clamp(-1.0, 1.0);
                if y[k] == x[k] {
                    continue;
                }
                let fy = objective.eval(&y);
                if fy > f {
                    x = y;
                    f = fy;
                    moved = true;
                }
            }
        }
        if !moved {
            step /= 2.0;
            if step < 1e-13 {
                break;
            }
        }
    }
    (f, x)
}
