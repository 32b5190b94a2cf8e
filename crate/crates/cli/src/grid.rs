//! Dense rational grids comparing a closed-form criterion with an independent decision route.

use hidvar_core::gaussian::{det_inequality_3var, eigenvalue_feasible, GaussianVerdict, PartialCorrelationMatrix};
use hidvar_core::hidden_variable::exchangeable_symmetric_construct;
use hidvar_core::inequality::{eval_chsh, eval_pairwise_triple, ChshMode};
use hidvar_core::lp::{decide, MomentConstraint, MomentProblem};
use hidvar_core::probability::{correlation, FiniteRandomVariable, JointDistribution, Monomial};
use hidvar_core::scalar::q_to_f64;
use hidvar_core::{fmt_q, q, qi, Q};
use serde_json::{json, Value};

use crate::error::CliResult;
use crate::problem::{grid_divisions, GridFamily, GridSpec};

/// At most this many disagreements are listed in a report.
const LISTED: usize = 20;

fn product(names: &[&str], target: Q) -> MomentConstraint {
    MomentConstraint::eq(Monomial::product(names).expect("valid names"), target)
}

/// Three `±1` variables with zero means and the given pairwise products.
pub fn zero_mean_triple(exy: &Q, eyz: &Q, exz: &Q) -> CliResult<MomentProblem> {
    let vars = ["X", "Y", "Z"].map(FiniteRandomVariable::pm1).to_vec();
    let mut cs: Vec<MomentConstraint> = ["X", "Y", "Z"].iter().map(|n| product(&[n], qi(0))).collect();
    cs.push(product(&["X", "Y"], exy.clone()));
    cs.push(product(&["Y", "Z"], eyz.clone()));
    cs.push(product(&["X", "Z"], exz.clone()));
    Ok(MomentProblem::new(vars, cs, "zero-mean triple")?)
}

/// `±1` variables `A, A', B, B'` with zero means and the four cross products given.
pub fn zero_mean_chsh(e: [&Q; 4]) -> CliResult<MomentProblem> {
    let names = ["A", "A'", "B", "B'"];
    let vars = names.map(FiniteRandomVariable::pm1).to_vec();
    let mut cs: Vec<MomentConstraint> = names.iter().map(|n| product(&[n], qi(0))).collect();
    for (pair, t) in [["A", "B"], ["A", "B'"], ["A'", "B"], ["A'", "B'"]].iter().zip(e) {
        cs.push(product(pair, t.clone()));
    }
    Ok(MomentProblem::new(vars, cs, "zero-mean quadruple")?)
}

fn point(values: &[&Q]) -> Value {
    Value::Array(values.iter().map(|v| Value::String(fmt_q(v))).collect())
}

#[derive(Default)]
struct Tally {
    cases: usize,
    agree: usize,
    boundary: usize,
    disagreements: Vec<Value>,
}

impl Tally {
    fn record(&mut self, agree: bool, at: impl FnOnce() -> Value) {
        self.cases += 1;
        if agree {
            self.agree += 1;
        } else if self.disagreements.len() < LISTED {
            self.disagreements.push(at());
        }
    }
}

/// Runs the grid; the status is 0 when every case agrees.
pub fn run(spec: &GridSpec) -> CliResult<(i32, Value, Vec<String>)> {
    let k = grid_divisions(&spec.step)?;
    let unit: Vec<Q> = (-k..=k).map(|i| q(i, k)).collect();
    let mut t = Tally::default();
    let (family, left, right) = match spec.family {
        GridFamily::PairwiseTriple => {
            for a in &unit {
                for b in &unit {
                    for c in &unit {
                        let ineq = eval_pairwise_triple(a.clone(), b.clone(), c.clone())?.is_satisfied();
                        let lp = decide(&zero_mean_triple(a, b, c)?)?.is_feasible();
                        t.record(ineq == lp, || point(&[a, b, c]));
                    }
                }
            }
            ("pairwise-triple", "pairwise-triple bound", "decide")
        }
        GridFamily::Chsh => {
            for a in &unit {
                for b in &unit {
                    for c in &unit {
                        for d in &unit {
                            let ineq = eval_chsh(a.clone(), b.clone(), c.clone(), d.clone(), &ChshMode::Normalized)?
                                .is_satisfied();
                            let lp = decide(&zero_mean_chsh([a, b, c, d])?)?.is_feasible();
                            t.record(ineq == lp, || point(&[a, b, c, d]));
                        }
                    }
                }
            }
            ("chsh", "four CHSH lines", "decide")
        }
        GridFamily::Exchangeable => {
            let vars = ["X", "Y"].map(FiniteRandomVariable::pm1).to_vec();
            for a in 0..=k {
                for b in 0..=(k - a) / 2 {
                    let (p11, p10) = (q(a, k), q(b, k));
                    let p00 = qi(1) - &p11 - qi(2) * &p10;
                    let rows = vec![
                        (vec![qi(-1), qi(-1)], p00.clone()),
                        (vec![qi(-1), qi(1)], p10.clone()),
                        (vec![qi(1), qi(-1)], p10.clone()),
                        (vec![qi(1), qi(1)], p11.clone()),
                    ];
                    let dist = JointDistribution::from_values(vars.clone(), rows)?;
                    let (verdict, model) = exchangeable_symmetric_construct(&p11, &p10, &p10, &p00)?;
                    match correlation(&dist, "X", "Y")?.exact() {
                        Some(rho) => {
                            let built = model.is_some_and(|m| m.recompose().is_ok_and(|r| r == dist));
                            t.record(built == (rho >= qi(0)), || point(&[&p11, &p10, &p00]));
                        }
                        None => t.record(!verdict.exists(), || point(&[&p11, &p10, &p00])),
                    }
                }
            }
            ("exchangeable", "symmetric construction", "sign of the correlation")
        }
        GridFamily::CorrelationTriple => {
            for a in &unit {
                for b in &unit {
                    for c in &unit {
                        let det = det_inequality_3var(a, b, c)?.is_satisfied();
                        let (x, y, z) = (q_to_f64(a), q_to_f64(b), q_to_f64(c));
                        let m =
                            PartialCorrelationMatrix::full(vec![vec![1.0, x, y], vec![x, 1.0, z], vec![y, z, 1.0]])?;
                        let eig = eigenvalue_feasible(&m, hidvar_core::gaussian::DEFAULT_TOL)?;
                        if eig.boundary {
                            t.boundary += 1;
                        }
                        let agree = eig.boundary || det == (eig.verdict == GaussianVerdict::Feasible);
                        t.record(agree, || point(&[a, b, c]));
                    }
                }
            }
            ("correlation-triple", "determinant bound", "smallest eigenvalue")
        }
    };
    let status = if t.agree == t.cases { 0 } else { 1 };
    let result = json!({
        "family": family,
        "step": fmt_q(&q(1, k)),
        "compared": [left, right],
        "cases": t.cases,
        "agreements": t.agree,
        "boundary": t.boundary,
        "disagreements": t.disagreements,
    });
    let summary = vec![format!("{family} grid at step 1/{k}: {}/{} agree ({left} vs {right})", t.agree, t.cases)];
    Ok((status, result, summary))
}
