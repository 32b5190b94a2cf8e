//! The four-party GHZ moment system over eight `±1` variables.
//!
//! Variables are `A_0, B_0, C_0, D_0, A_pi, A_halfpi, C_halfpi, D_halfpi`,
//! one per (party, phase) pair used. A quadruple of phases `(φ₁, φ₂, φ₃, φ₄)`
//! constrains `E(A_φ₁ B_φ₂ C_φ₃ D_φ₄) = -cos(φ₁ + φ₂ - φ₃ - φ₄)`. Phases are
//! whole multiples of π/2, so every target is -1, 0 or 1.

use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::lp::{decide, FeasibilityResult, MomentConstraint, MomentProblem, Verdict};
use crate::probability::lemmas::{check_lemma, LemmaCase, LemmaOutcome};
use crate::probability::{pushforward, Atom, Event, FiniteRandomVariable, JointDistribution, Monomial, NamedFunction};
use crate::scalar::{fmt_q, qi, Q};

pub const VARIABLES: [&str; 8] = ["A_0", "B_0", "C_0", "D_0", "A_pi", "A_halfpi", "C_halfpi", "D_halfpi"];

/// Available phases per party, in multiples of π/2.
const PHASES: [(&str, &[u8]); 4] = [("A", &[0, 2, 1]), ("B", &[0]), ("C", &[0, 1]), ("D", &[0, 1])];

fn variable_name(party: usize, k: u8) -> Option<&'static str> {
    let (p, allowed) = PHASES[party];
    if !allowed.contains(&k) {
        return None;
    }
    VARIABLES.iter().copied().find(|v| {
        v.starts_with(p)
            && match k {
                0 => v.ends_with("_0"),
                1 => v.ends_with("_halfpi"),
                _ => v.ends_with("_pi"),
            }
    })
}

/// One selected quadruple of phases, each a multiple of π/2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadruple {
    pub phases: [u8; 4],
    /// replaces `-cos` of the signed phase sum when set
    pub target_override: Option<Q>,
}

impl Quadruple {
    pub fn new(phases: [u8; 4]) -> Self {
        Quadruple { phases, target_override: None }
    }

    pub fn with_target(mut self, target: Q) -> Self {
        self.target_override = Some(target);
        self
    }

    /// `-cos(φ₁ + φ₂ - φ₃ - φ₄)`.
    pub fn natural_target(&self) -> Q {
        let [a, b, c, d] = self.phases.map(i64::from);
        match (a + b - c - d).rem_euclid(4) {
            0 => qi(-1),
            2 => qi(1),
            _ => qi(0),
        }
    }

    pub fn target(&self) -> Q {
        self.target_override.clone().unwrap_or_else(|| self.natural_target())
    }

    pub fn variables(&self) -> Result<[&'static str; 4]> {
        let mut out = [""; 4];
        for (party, (&k, slot)) in self.phases.iter().zip(out.iter_mut()).enumerate() {
            *slot = variable_name(party, k).ok_or_else(|| {
                Error::Validation(format!("phase {}·π/2 is not available for party {}", k, PHASES[party].0))
            })?;
        }
        Ok(out)
    }

    pub fn monomial(&self) -> Result<Monomial> {
        Monomial::product(&self.variables()?)
    }
}

impl fmt::Display for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let phase = |k: u8| match k {
            0 => "0",
            1 => "pi/2",
            2 => "pi",
            _ => "3pi/2",
        };
        let p: Vec<&str> = self.phases.iter().map(|&k| phase(k)).collect();
        write!(f, "({}) -> {}", p.join(","), fmt_q(&self.target()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhzConfig {
    pub quadruples: Vec<Quadruple>,
}

impl GhzConfig {
    /// The six quadruples with phase sum 0 or π realizable from the eight variables.
    pub fn default_config() -> Self {
        GhzConfig {
            quadruples: [[0, 0, 0, 0], [2, 0, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1], [0, 0, 1, 1], [2, 0, 1, 1]]
                .into_iter()
                .map(Quadruple::new)
                .collect(),
        }
    }

    /// The default quadruples whose positions (0-based) are in `keep`.
    pub fn subset(keep: &[usize]) -> Self {
        let all = Self::default_config().quadruples;
        GhzConfig { quadruples: keep.iter().map(|&i| all[i].clone()).collect() }
    }

    /// Smallest default subset the replayed argument uses: every quadruple except `(0,0,π/2,π/2)`.
    pub fn proof_config() -> Self {
        Self::subset(&[0, 1, 2, 3, 5])
    }
}

impl Default for GhzConfig {
    fn default() -> Self {
        Self::default_config()
    }
}

pub fn ghz_variables() -> Vec<FiniteRandomVariable> {
    VARIABLES.iter().map(|n| FiniteRandomVariable::pm1(*n)).collect()
}

pub fn build_ghz_problem(config: &GhzConfig) -> Result<MomentProblem> {
    let constraints = config
        .quadruples
        .iter()
        .map(|q| Ok(MomentConstraint::eq(q.monomial()?, q.target())))
        .collect::<Result<Vec<_>>>()?;
    MomentProblem::new(ghz_variables(), constraints, "GHZ")
}

pub fn prove_ghz_infeasible(config: &GhzConfig) -> Result<FeasibilityResult> {
    decide(&build_ghz_problem(config)?)
}

/// Verdict of `config` with each quadruple removed in turn.
pub fn single_drop_table(config: &GhzConfig) -> Result<Vec<(usize, Verdict)>> {
    (0..config.quadruples.len())
        .map(|drop| {
            let mut rest = config.clone();
            rest.quadruples.remove(drop);
            Ok((drop, prove_ghz_infeasible(&rest)?.verdict))
        })
        .collect()
}

/// Every inclusion-minimal infeasible subset of the quadruples, as sorted
/// 0-based positions, in order of size then lexicographically.
pub fn minimal_infeasible_subsets(config: &GhzConfig) -> Result<Vec<Vec<usize>>> {
    let n = config.quadruples.len();
    if n > 16 {
        return Err(Error::Unsupported(format!("subset search over {n} quadruples")));
    }
    let mut masks: Vec<u32> = (1..1u32 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut minimal: Vec<u32> = Vec::new();
    for m in masks {
        if minimal.iter().any(|s| s & m == *s) {
            continue;
        }
        let keep: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
        let sub = GhzConfig { quadruples: keep.iter().map(|&i| config.quadruples[i].clone()).collect() };
        if !prove_ghz_infeasible(&sub)?.is_feasible() {
            minimal.push(m);
        }
    }
    let mut out: Vec<Vec<usize>> = minimal.into_iter().map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepStatus {
    Holds,
    Fails,
    /// A constraint the step relies on is not met, or the conditioning event is null.
    Vacuous {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayStep {
    pub number: usize,
    pub statement: String,
    /// 0-based positions in the default configuration
    pub requires: Vec<usize>,
    /// the computed probability; `None` when the conditioning event is null
    pub value: Option<Q>,
    pub status: StepStatus,
    /// the probability-one rule that justifies the step, checked on this distribution
    pub lemma: Option<(u8, LemmaOutcome)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    /// whether each default quadruple's moment holds exactly
    pub constraints: Vec<(Quadruple, bool)>,
    /// the sign cell `(s₁, s₂, s₃, s₄)` of `(A_0, B_0, C_0, D_0)` the argument follows
    pub signs: [i64; 4],
    pub steps: Vec<ReplayStep>,
    /// first step that does not hold
    pub first_break: Option<usize>,
    /// the two conclusions about `A_pi` on the cell; both holding is impossible
    pub conflict: (Option<Q>, Option<Q>),
}

/// Derived product variables, added to the replayed distribution.
const PRODUCTS: [(&str, [&str; 2]); 4] = [
    ("P_A0C0", ["A_0", "C_0"]),
    ("P_AhCh", ["A_halfpi", "C_halfpi"]),
    ("P_C0D0", ["C_0", "D_0"]),
    ("P_ChDh", ["C_halfpi", "D_halfpi"]),
];

struct Replay {
    dist: JointDistribution,
}

impl Replay {
    fn new(dist: &JointDistribution) -> Result<Self> {
        if dist.variables().len() != 8 {
            return Err(Error::Validation("GHZ replay needs exactly the eight GHZ variables".into()));
        }
        for v in dist.variables() {
            if !VARIABLES.contains(&v.name()) || v.support() != [qi(-1), qi(1)] {
                return Err(Error::Validation(format!("`{}` is not one of the eight ±1 GHZ variables", v.name())));
            }
        }
        let mut fns: Vec<NamedFunction> =
            VARIABLES.iter().map(|n| NamedFunction::linear(n, &[(n, qi(1))], qi(0))).collect();
        for (name, [x, y]) in PRODUCTS {
            fns.push(NamedFunction::custom(name, &[x, y], |a| &a[0] * &a[1]));
        }
        Ok(Replay { dist: pushforward(dist, &fns)? })
    }

    fn value(&self, atom: &Atom, name: &str) -> i64 {
        let i = self.dist.variable_index(name).expect("known variable");
        if self.dist.value_of(atom, i).is_one() {
            1
        } else {
            -1
        }
    }

    fn event(&self, pred: impl Fn(&dyn Fn(&str) -> i64) -> bool) -> Event {
        self.dist.event_where(|a| pred(&|n: &str| self.value(a, n)))
    }

    fn conditional(&self, a: &Event, b: &Event) -> Option<Q> {
        self.dist.conditional(a, b)
    }
}

/// Replays the probability-one argument on `dist` step by step.
///
/// Each step is an exact conditional probability. A step whose supporting
/// quadruples do not hold on `dist` is reported vacuous with its computed
/// value, so the report shows where the argument breaks for the constraints
/// that do hold.
pub fn replay_proof_chain(dist: &JointDistribution) -> Result<ReplayReport> {
    let r = Replay::new(dist)?;
    let default = GhzConfig::default_config().quadruples;
    let constraints: Vec<(Quadruple, bool)> = default
        .iter()
        .map(|q| Ok((q.clone(), r.dist.expectation(&q.monomial()?)? == q.target())))
        .collect::<Result<_>>()?;

    // first positive-probability sign cell of (A_0, B_0, C_0, D_0)
    let mut signs = [-1i64; 4];
    'search: for code in 0..16u32 {
        let s: [i64; 4] = [3, 2, 1, 0].map(|b| if code >> b & 1 == 1 { 1 } else { -1 });
        let cell = r.event(|v| ["A_0", "B_0", "C_0", "D_0"].iter().zip(&s).all(|(n, x)| v(n) == *x));
        if !r.dist.probability(&cell).is_zero() {
            signs = s;
            break 'search;
        }
    }
    let [_, s2, s3, s4] = signs;

    let cell = r.event(|v| v("B_0") == s2 && v("C_0") == s3 && v("D_0") == s4);
    let pair = r.event(|v| v("B_0") == s2 && v("C_0") * v("D_0") == s3 * s4);
    let b_d = r.event(|v| v("B_0") == s2 && v("D_0") == s4);
    let half = r.event(|v| v("B_0") == s2 && v("C_halfpi") * v("D_halfpi") == s3 * s4);
    let b_only = r.event(|v| v("B_0") == s2);
    let c_only = r.event(|v| v("C_0") == s3);

    let mut steps = Vec::new();
    let mut push =
        |statement: String, requires: Vec<usize>, value: Option<Q>, positivity: bool, lemma: Option<LemmaCase>| {
            let unmet: Vec<String> =
                requires.iter().filter(|&&i| !constraints[i].1).map(|&i| format!("{}", constraints[i].0)).collect();
            let status = if !unmet.is_empty() {
                StepStatus::Vacuous { reason: format!("needs {}", unmet.join("; ")) }
            } else {
                match &value {
                    None => StepStatus::Vacuous { reason: "conditioning event has probability zero".into() },
                    Some(v) if positivity && !v.is_zero() => StepStatus::Holds,
                    Some(v) if !positivity && v.is_one() => StepStatus::Holds,
                    Some(_) => StepStatus::Fails,
                }
            };
            let lemma =
                lemma.map(|case| (case.number(), check_lemma(&r.dist, &case).expect("events from this lattice")));
            steps.push(ReplayStep { number: steps.len() + 1, statement, requires, value, status, lemma });
        };

    let sure = r.event(|_| true);
    let product_neg = r.event(|v| v("A_0") * v("B_0") * v("C_0") * v("D_0") == -1);
    push(
        "every positive sign cell of (A_0,B_0,C_0,D_0) has product -1".into(),
        vec![0],
        r.conditional(&product_neg, &sure),
        false,
        None,
    );

    let a_pi_plus = r.event(|v| v("A_pi") == s2 * s3 * s4);
    let step2 = r.conditional(&a_pi_plus, &cell);
    push(format!("P(A_pi = {} | B_0={s2}, C_0={s3}, D_0={s4}) = 1", s2 * s3 * s4), vec![1], step2.clone(), false, None);

    let ac = r.event(|v| v("A_0") * v("C_0") == -s2 * s4);
    push(format!("P(A_0 C_0 = {} | B_0={s2}, D_0={s4}) = 1", -s2 * s4), vec![0], r.conditional(&ac, &b_d), false, None);

    push(
        format!("P(A_0 C_0 = {} | B_0={s2}, C_0={s3}, D_0={s4}) = 1", -s2 * s4),
        vec![0],
        r.conditional(&ac, &cell),
        false,
        Some(LemmaCase::Refinement { a: ac.clone(), b: b_d.clone(), c: c_only }),
    );

    let ac_half = r.event(|v| v("A_halfpi") * v("C_halfpi") == -s2 * s4);
    push(
        format!("P(A_halfpi C_halfpi = {} | B_0={s2}, C_0={s3}, D_0={s4}) = 1", -s2 * s4),
        vec![2],
        r.conditional(&ac_half, &cell),
        false,
        None,
    );

    let ac_eq = r.event(|v| v("A_0") * v("C_0") == v("A_halfpi") * v("C_halfpi"));
    push(
        format!("P(A_0 C_0 = A_halfpi C_halfpi | B_0={s2}, C_0 D_0={}) = 1", s3 * s4),
        vec![0, 2],
        r.conditional(&ac_eq, &pair),
        false,
        Some(LemmaCase::CommonValue { a: cell.clone(), x: "P_A0C0".into(), y: "P_AhCh".into(), c: qi(-s2 * s4) }),
    );

    let ad_eq = r.event(|v| v("A_0") * v("D_0") == v("A_halfpi") * v("D_halfpi"));
    push(
        format!("P(A_0 D_0 = A_halfpi D_halfpi | B_0={s2}, C_0 D_0={}) = 1", s3 * s4),
        vec![0, 3],
        r.conditional(&ad_eq, &pair),
        false,
        None,
    );

    // for ±1 values the ratio C/D equals the product C·D
    let ratio =
        r.event(|v| Q::new(v("C_0").into(), v("D_0").into()) == Q::new(v("C_halfpi").into(), v("D_halfpi").into()));
    push(
        format!("P(C_0 / D_0 = C_halfpi / D_halfpi | B_0={s2}, C_0 D_0={}) = 1", s3 * s4),
        vec![0, 2, 3],
        r.conditional(&ratio, &pair),
        false,
        None,
    );

    let cd_eq = r.event(|v| v("C_0") * v("D_0") == v("C_halfpi") * v("D_halfpi"));
    push(
        format!("P(C_0 D_0 = C_halfpi D_halfpi | B_0={s2}, C_0 D_0={}) = 1", s3 * s4),
        vec![0, 2, 3],
        r.conditional(&cd_eq, &pair),
        false,
        None,
    );

    let cd_half = r.event(|v| v("C_halfpi") * v("D_halfpi") == s3 * s4);
    push(
        format!("P(C_halfpi D_halfpi = {} | B_0={s2}, C_0 D_0={}) = 1", s3 * s4, s3 * s4),
        vec![0, 2, 3],
        r.conditional(&cd_half, &pair),
        false,
        Some(LemmaCase::EqualityTransfer { a: b_only.clone(), x: "P_C0D0".into(), y: "P_ChDh".into(), c: qi(s3 * s4) }),
    );

    push(
        format!("P(B_0={s2}, C_halfpi D_halfpi={}) > 0", s3 * s4),
        vec![0, 2, 3],
        Some(r.dist.probability(&half)),
        true,
        None,
    );

    let a_pi_minus = r.event(|v| v("A_pi") == -s2 * s3 * s4);
    push(
        format!("P(A_pi = {} | B_0={s2}, C_halfpi D_halfpi={}) = 1", -s2 * s3 * s4, s3 * s4),
        vec![5],
        r.conditional(&a_pi_minus, &half),
        false,
        None,
    );

    let step13 = r.conditional(&a_pi_minus, &pair);
    push(
        format!("P(A_pi = {} | B_0={s2}, C_0 D_0={}) = 1", -s2 * s3 * s4, s3 * s4),
        vec![0, 2, 3, 5],
        step13.clone(),
        false,
        Some(LemmaCase::Substitution {
            a: b_only,
            x: "A_pi".into(),
            y: "P_ChDh".into(),
            z: "P_C0D0".into(),
            c: qi(-s2 * s3 * s4),
            d: qi(s3 * s4),
        }),
    );

    let first_break = steps.iter().find(|s| s.status != StepStatus::Holds).map(|s| s.number);
    Ok(ReplayReport { constraints, signs, steps, first_break, conflict: (step2, step13) })
}
