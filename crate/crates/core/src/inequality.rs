//! Closed-form inequalities on moments, evaluated exactly.
//!
//! Inputs are [`Real`], so both rational moments and the quadratic
//! irrationals that quantum correlations produce compare exactly. Slack is
//! the distance to the binding bound; zero slack counts as satisfied.

use std::fmt;

use num::{One, Zero};

use crate::algebraic::Real;
use crate::error::{Error, Result};
use crate::scalar::{fmt_q, qi, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InequalityId {
    /// `-1 ≤ E(XY)+E(YZ)+E(XZ) ≤ 1 + 2·min(E(XY),E(YZ),E(XZ))` for zero-mean `±1` triples
    PairwiseTriple,
    /// `E(XY)+E(YZ)+E(XZ) - 2(x₀+y₀+z₀) ≥ -1` with means `x₀, y₀, z₀`
    GeneralizedLower,
    /// `1 + E(YZ) ≥ |E(XY) - E(XZ)|`
    BellOriginal,
    /// the four sign patterns of the two-setting, two-party bound
    Chsh,
    /// the spin-1 absolute-value form with the extra product term
    Spin1Strengthened,
    /// `ρ(X,Y)² + ρ(X,Z)² + ρ(Y,Z)² ≤ 2ρ(X,Y)ρ(Y,Z)ρ(X,Z) + 1` for three correlations
    CorrelationTriple,
}

impl InequalityId {
    pub const ALL: [InequalityId; 6] = [
        InequalityId::PairwiseTriple,
        InequalityId::GeneralizedLower,
        InequalityId::BellOriginal,
        InequalityId::Chsh,
        InequalityId::Spin1Strengthened,
        InequalityId::CorrelationTriple,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityId::PairwiseTriple => "pairwise-triple",
            InequalityId::GeneralizedLower => "generalized-lower",
            InequalityId::BellOriginal => "bell-original",
            InequalityId::Chsh => "chsh",
            InequalityId::Spin1Strengthened => "spin1-strengthened",
            InequalityId::CorrelationTriple => "correlation-triple",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == text)
            .ok_or_else(|| Error::Validation(format!("unknown inequality `{text}`")))
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityVerdict {
    Satisfied,
    Violated,
}

impl InequalityVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityVerdict::Satisfied => "satisfied",
            InequalityVerdict::Violated => "violated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityReport {
    pub id: InequalityId,
    pub inputs: Vec<(String, Real)>,
    pub verdict: InequalityVerdict,
    /// minimum over `bounds`; negative iff violated
    pub slack: Real,
    /// slack of each evaluated bound, by name
    pub bounds: Vec<(String, Real)>,
    pub notes: Vec<String>,
}

impl InequalityReport {
    pub(crate) fn new(
        id: InequalityId,
        inputs: Vec<(String, Real)>,
        bounds: Vec<(&str, Real)>,
        notes: Vec<String>,
    ) -> Self {
        let slack = bounds.iter().map(|(_, v)| v.clone()).min().expect("at least one bound");
        let verdict = if slack < Real::zero() { InequalityVerdict::Violated } else { InequalityVerdict::Satisfied };
        let bounds = bounds.into_iter().map(|(n, v)| (n.to_string(), v)).collect();
        InequalityReport { id, inputs, verdict, slack, bounds, notes }
    }

    pub fn is_satisfied(&self) -> bool {
        self.verdict == InequalityVerdict::Satisfied
    }
}

fn check_range(name: &str, value: &Real, bound: &Q) -> Result<()> {
    let b = Real::rational(bound.clone());
    if value.abs() > b {
        return Err(Error::OutOfRange {
            what: format!("{name} (|value| ≤ {})", fmt_q(bound)),
            value: value.to_string(),
        });
    }
    Ok(())
}

pub(crate) fn named(names: &[&str], values: Vec<Real>, bound: &Q) -> Result<Vec<(String, Real)>> {
    for (n, v) in names.iter().zip(&values) {
        check_range(n, v, bound)?;
    }
    Ok(names.iter().map(|n| n.to_string()).zip(values).collect())
}

fn unit_inputs(names: &[&str], values: Vec<Real>) -> Result<Vec<(String, Real)>> {
    named(names, values, &qi(1))
}

pub(crate) fn cmp_note(lhs: &Real, op: &str, rhs: &Real) -> String {
    format!("{lhs} {op} {rhs}")
}

pub(crate) fn holds(slack: &Real) -> &'static str {
    if *slack < Real::zero() {
        "fails"
    } else {
        "holds"
    }
}

/// Both bounds on the pairwise products of three zero-mean `±1` variables.
/// For such triples this is equivalent to the existence of a joint distribution.
pub fn eval_pairwise_triple(
    exy: impl Into<Real>,
    eyz: impl Into<Real>,
    exz: impl Into<Real>,
) -> Result<InequalityReport> {
    let inputs = unit_inputs(&["E(XY)", "E(YZ)", "E(XZ)"], vec![exy.into(), eyz.into(), exz.into()])?;
    let sum = inputs.iter().fold(Real::zero(), |acc, (_, v)| acc + v.clone());
    let min = inputs.iter().map(|(_, v)| v.clone()).min().expect("three inputs");
    let lower = sum.clone() + Real::one();
    let upper_bound = Real::one() + Real::from_int(2) * min;
    let upper = upper_bound.clone() - sum.clone();
    let notes = vec![
        format!("lower bound {}: {}", holds(&lower), cmp_note(&Real::from_int(-1), "<=", &sum)),
        format!("upper bound {}: {}", holds(&upper), cmp_note(&sum, "<=", &upper_bound)),
    ];
    Ok(InequalityReport::new(InequalityId::PairwiseTriple, inputs, vec![("lower", lower), ("upper", upper)], notes))
}

/// `E(XY)+E(YZ)+E(XZ) - 2(x₀+y₀+z₀) ≥ -1`, evaluated as stated.
///
/// The bound is only valid when `x₀+y₀+z₀ ≤ 0`: `X = Y = Z` with
/// `P(X = 1) = 9/10` has left side `-9/5`. The report notes this whenever the mean sum is positive,
/// since a violation then proves nothing.
pub fn eval_generalized_lower(
    exy: impl Into<Real>,
    eyz: impl Into<Real>,
    exz: impl Into<Real>,
    x0: impl Into<Real>,
    y0: impl Into<Real>,
    z0: impl Into<Real>,
) -> Result<InequalityReport> {
    let inputs = unit_inputs(
        &["E(XY)", "E(YZ)", "E(XZ)", "E(X)", "E(Y)", "E(Z)"],
        vec![exy.into(), eyz.into(), exz.into(), x0.into(), y0.into(), z0.into()],
    )?;
    for (n, v) in &inputs[3..] {
        if v.abs() == Real::one() {
            return Err(Error::OutOfRange { what: format!("{n} (|mean| < 1)"), value: v.to_string() });
        }
    }
    let products = inputs[..3].iter().fold(Real::zero(), |acc, (_, v)| acc + v.clone());
    let means = inputs[3..].iter().fold(Real::zero(), |acc, (_, v)| acc + v.clone());
    let lhs = products - Real::from_int(2) * means.clone();
    let slack = lhs.clone() + Real::one();
    let mut notes = vec![format!("bound {}: {}", holds(&slack), cmp_note(&lhs, ">=", &Real::from_int(-1)))];
    if means > Real::zero() {
        notes.push("mean sum is positive, where this bound is not valid for ±1 variables; a violation does not rule out a joint distribution".into());
    }
    Ok(InequalityReport::new(InequalityId::GeneralizedLower, inputs, vec![("lower", slack)], notes))
}

/// `1 + E(YZ) ≥ |E(XY) - E(XZ)|`. Neither necessary nor sufficient for a joint
/// distribution of three `±1` variables.
pub fn eval_bell_original(
    exy: impl Into<Real>,
    eyz: impl Into<Real>,
    exz: impl Into<Real>,
) -> Result<InequalityReport> {
    let inputs = unit_inputs(&["E(XY)", "E(YZ)", "E(XZ)"], vec![exy.into(), eyz.into(), exz.into()])?;
    let lhs = Real::one() + inputs[1].1.clone();
    let rhs = (inputs[0].1.clone() - inputs[2].1.clone()).abs();
    let slack = lhs.clone() - rhs.clone();
    let notes = vec![format!("bound {}: {}", holds(&slack), cmp_note(&lhs, ">=", &rhs))];
    Ok(InequalityReport::new(InequalityId::BellOriginal, inputs, vec![("bound", slack)], notes))
}

const PATTERNS: [&str; 4] = ["minus E(AB)", "minus E(AB')", "minus E(A'B)", "minus E(A'B')"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChshMode {
    /// Moments of observables scaled into `[-1, 1]`; all four sign patterns, bound 2.
    Normalized,
    /// Moments of spin-`j` observables valued in `{-j, …, j}`, so each input
    /// lies in `[-j², j²]`; the absolute-value form with bound `2j²`.
    Raw { j: Q },
}

/// Two-party, two-setting bound. In normalized mode this is equivalent to the
/// existence of a joint distribution of four `±1` variables.
pub fn eval_chsh(
    eab: impl Into<Real>,
    eabp: impl Into<Real>,
    eapb: impl Into<Real>,
    eapbp: impl Into<Real>,
    mode: &ChshMode,
) -> Result<InequalityReport> {
    let names = ["E(AB)", "E(AB')", "E(A'B)", "E(A'B')"];
    let values = vec![eab.into(), eabp.into(), eapb.into(), eapbp.into()];
    match mode {
        ChshMode::Normalized => {
            let inputs = unit_inputs(&names, values)?;
            let two = Real::from_int(2);
            let mut bounds = Vec::new();
            let mut notes = Vec::new();
            for minus in 0..4 {
                let s = inputs.iter().enumerate().fold(Real::zero(), |acc, (i, (_, v))| {
                    if i == minus {
                        acc - v.clone()
                    } else {
                        acc + v.clone()
                    }
                });
                let line = two.clone() - s.abs();
                notes.push(format!("pattern with -{} {}: |{s}| <= 2", names[minus], holds(&line)));
                bounds.push((PATTERNS[minus], line));
            }
            Ok(InequalityReport::new(InequalityId::Chsh, inputs, bounds, notes))
        }
        ChshMode::Raw { j } => {
            let twice = j * qi(2);
            if !twice.is_integer() || *j <= Q::zero() {
                return Err(Error::OutOfRange { what: "spin j (positive half-integer)".into(), value: fmt_q(j) });
            }
            let bound = j * j;
            let inputs = named(&names, values, &bound)?;
            let e: Vec<&Real> = inputs.iter().map(|(_, v)| v).collect();
            let lhs = (e[0].clone() - e[1].clone()).abs() + (e[2].clone() + e[3].clone()).abs();
            let rhs = Real::rational(&bound * qi(2));
            let slack = rhs.clone() - lhs.clone();
            let notes = vec![format!("bound {}: {}", holds(&slack), cmp_note(&lhs, "<=", &rhs))];
            Ok(InequalityReport::new(InequalityId::Chsh, inputs, vec![("bound", slack)], notes))
        }
    }
}

/// `|E(AB)-E(AB')| + |E(A'B)+E(A'B')| + 2(|E(AB)|-1)(|E(AB')|-1) ≤ 2`, evaluated as stated.
///
/// This is not a valid bound for spin-1 observables: `A = 0`,
/// `A' = B = B' = 1` gives moments `(0, 0, 1, 1)` and left side 4.
pub fn eval_spin1_strengthened(
    eab: impl Into<Real>,
    eabp: impl Into<Real>,
    eapb: impl Into<Real>,
    eapbp: impl Into<Real>,
) -> Result<InequalityReport> {
    let inputs = unit_inputs(
        &["E(AB)", "E(AB')", "E(A'B)", "E(A'B')"],
        vec![eab.into(), eabp.into(), eapb.into(), eapbp.into()],
    )?;
    let e: Vec<Real> = inputs.iter().map(|(_, v)| v.clone()).collect();
    let base = (e[0].clone() - e[1].clone()).abs() + (e[2].clone() + e[3].clone()).abs();
    let extra = Real::from_int(2) * (e[0].abs() - Real::one()) * (e[1].abs() - Real::one());
    let lhs = base + extra;
    let two = Real::from_int(2);
    let slack = two.clone() - lhs.clone();
    let mut notes = vec![format!("bound {}: {}", holds(&slack), cmp_note(&lhs, "<=", &two))];
    if slack < Real::zero() {
        notes.push("this bound admits realizable violations, e.g. A = 0, A' = B = B' = 1; a violation does not rule out a joint distribution".into());
    }
    Ok(InequalityReport::new(InequalityId::Spin1Strengthened, inputs, vec![("bound", slack)], notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn r(n: i64, d: i64) -> Real {
        Real::rational(q(n, d))
    }

    #[test]
    fn pairwise_triple_examples() {
        let a = eval_pairwise_triple(q(-1, 2), q(-1, 2), q(-1, 2)).unwrap();
        assert!(!a.is_satisfied());
        assert_eq!(a.slack, r(-1, 2));
        let b = eval_pairwise_triple(q(1, 2), q(-1, 2), q(-1, 2)).unwrap();
        assert!(b.is_satisfied());
        assert_eq!(b.notes[0], "lower bound holds: -1/1 <= -1/2");
        assert_eq!(b.notes[1], "upper bound holds: -1/2 <= 0/1");
        assert_eq!(eval_pairwise_triple(qi(0), qi(0), qi(0)).unwrap().slack, Real::one());
        assert!(matches!(eval_pairwise_triple(q(3, 2), qi(0), qi(0)), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn generalized_lower_examples() {
        let z = || qi(0);
        let a = eval_generalized_lower(q(-1, 2), q(-1, 2), q(-1, 2), z(), z(), z()).unwrap();
        assert!(!a.is_satisfied());
        let b = eval_generalized_lower(q(1, 4), q(1, 4), q(1, 4), q(1, 4), q(1, 4), q(1, 4)).unwrap();
        assert!(b.is_satisfied());
        assert_eq!(b.slack, r(1, 4));
        assert_eq!(b.notes.len(), 2);
        assert!(eval_generalized_lower(z(), z(), z(), qi(1), z(), z()).is_err());
    }

    #[test]
    fn bell_original_examples() {
        let a = eval_bell_original(q(-1, 2), q(-1, 2), q(-1, 2)).unwrap();
        assert!(a.is_satisfied());
        assert_eq!(a.notes[0], "bound holds: 1/2 >= 0/1");
        let b = eval_bell_original(q(1, 2), q(-1, 2), q(-1, 2)).unwrap();
        assert!(!b.is_satisfied());
        assert_eq!(b.slack, r(-1, 2));

        let neg_cos = |d: i64| -Real::cos_degrees(&qi(d)).unwrap();
        let c = eval_bell_original(neg_cos(30), neg_cos(30), neg_cos(60)).unwrap();
        assert!(!c.is_satisfied());
        // 1 - √3/2 - (√3/2 - 1/2) = 3/2 - √3
        assert_eq!(c.slack, r(3, 2) - Real::sqrt(&qi(3)).unwrap());
    }

    #[test]
    fn chsh_examples() {
        let h = || q(1, 2);
        let a = eval_chsh(h(), h(), h(), -h(), &ChshMode::Normalized).unwrap();
        assert!(a.is_satisfied());
        assert_eq!(a.slack, Real::zero());
        let s = Real::sqrt(&q(1, 2)).unwrap();
        let b = eval_chsh(s.clone(), s.clone(), s.clone(), -s, &ChshMode::Normalized).unwrap();
        assert!(!b.is_satisfied());
        assert_eq!(b.slack, Real::from_int(2) - Real::from_int(2) * Real::sqrt(&qi(2)).unwrap());
        let z = eval_chsh(qi(0), qi(0), qi(0), qi(0), &ChshMode::Normalized).unwrap();
        assert_eq!(z.slack, Real::from_int(2));

        let raw = ChshMode::Raw { j: qi(2) };
        let c = eval_chsh(qi(4), qi(-4), qi(4), qi(4), &raw).unwrap();
        assert_eq!(c.slack, Real::from_int(-8));
        assert!(eval_chsh(qi(5), qi(0), qi(0), qi(0), &raw).is_err());
        assert!(eval_chsh(qi(0), qi(0), qi(0), qi(0), &ChshMode::Raw { j: q(1, 3) }).is_err());
    }

    #[test]
    fn spin1_examples() {
        let one = || qi(1);
        assert_eq!(eval_spin1_strengthened(one(), one(), one(), one()).unwrap().slack, Real::zero());
        assert_eq!(eval_spin1_strengthened(qi(0), qi(0), qi(0), qi(0)).unwrap().slack, Real::zero());
        let h = || q(1, 2);
        assert_eq!(eval_spin1_strengthened(h(), h(), h(), h()).unwrap().slack, r(1, 2));
        let bad = eval_spin1_strengthened(qi(0), qi(0), one(), one()).unwrap();
        assert_eq!(bad.slack, Real::from_int(-2));
        assert_eq!(bad.notes.len(), 2);
    }
}
