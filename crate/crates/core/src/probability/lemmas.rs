//! Probability-one inference rules, checked on concrete distributions.
//!
//! Each [`LemmaCase`] is one rule instantiated with events or variables. On a
//! given distribution the check reports whether the hypotheses hold and, if
//! they do, whether the conclusion holds. A conclusion failure would mean a
//! bug in the arithmetic; the rules themselves are theorems.

use num::{One, Zero};

use super::{Event, JointDistribution};
use crate::error::{Error, Result};
use crate::scalar::{fmt_q, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LemmaCase {
    /// Rule 1: `P(A|B) = 1`, `P(BC) > 0` give `P(A|BC) = 1`.
    Refinement { a: Event, b: Event, c: Event },
    /// Rule 2: `P(A) > 0`, `P(X=c|A) = 1`, `P(Y=c|A) = 1` give `P(X=Y|A) = 1`.
    CommonValue { a: Event, x: String, y: String, c: Q },
    /// Rule 3: `P(A, X=c) > 0`, `P(X=Y | A, X=c) = 1` give `P(Y=c | A, X=c) = 1`.
    EqualityTransfer { a: Event, x: String, y: String, c: Q },
    /// Rule 4: `P(B), P(C) > 0`, `P(A|B) = 1`, `P(B|C) = 1` give `P(A|C) = 1`.
    Transitivity { a: Event, b: Event, c: Event },
    /// Rule 5: `P(A, Y=d), P(A, Z=d) > 0`, `P(X=c | A, Y=d) = 1`, `P(Z=Y | A, Z=d) = 1`
    /// give `P(X=c | A, Z=d) = 1`.
    Substitution { a: Event, x: String, y: String, z: String, c: Q, d: Q },
}

impl LemmaCase {
    pub fn number(&self) -> u8 {
        match self {
            LemmaCase::Refinement { .. } => 1,
            LemmaCase::CommonValue { .. } => 2,
            LemmaCase::EqualityTransfer { .. } => 3,
            LemmaCase::Transitivity { .. } => 4,
            LemmaCase::Substitution { .. } => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LemmaOutcome {
    Holds,
    /// A hypothesis fails on this distribution.
    Vacuous {
        hypothesis: String,
    },
    /// The conclusion fails; `atoms` are the positive-mass atoms of the
    /// conditioning event outside the conclusion event.
    Violated {
        atoms: Event,
    },
}

impl LemmaOutcome {
    pub fn is_violated(&self) -> bool {
        matches!(self, LemmaOutcome::Violated { .. })
    }
}

struct Ctx<'a> {
    dist: &'a JointDistribution,
}

impl Ctx<'_> {
    fn check_event(&self, e: &Event, label: &str) -> Result<()> {
        let vars = self.dist.variables();
        for atom in e {
            let ok = atom.0.len() == vars.len() && atom.0.iter().zip(vars).all(|(i, v)| *i < v.len());
            if !ok {
                return Err(Error::Validation(format!("event {label} contains atom {atom} outside the lattice")));
            }
        }
        Ok(())
    }

    fn equals(&self, x: &str, c: &Q) -> Result<Event> {
        let i = self.dist.variable_index(x)?;
        Ok(self.dist.event_where(|a| self.dist.value_of(a, i) == c))
    }

    fn same(&self, x: &str, y: &str) -> Result<Event> {
        let i = self.dist.variable_index(x)?;
        let j = self.dist.variable_index(y)?;
        Ok(self.dist.event_where(|a| self.dist.value_of(a, i) == self.dist.value_of(a, j)))
    }

    fn p(&self, e: &Event) -> Q {
        self.dist.probability(e)
    }

    fn cond_is_one(&self, a: &Event, b: &Event) -> bool {
        self.dist.conditional(a, b).is_some_and(|p| p.is_one())
    }

    /// Conclusion `P(a|b) = 1`, with the failing atoms otherwise.
    fn conclude(&self, a: &Event, b: &Event) -> LemmaOutcome {
        if self.cond_is_one(a, b) {
            return LemmaOutcome::Holds;
        }
        let atoms: Event = b.iter().filter(|x| !a.contains(*x) && !self.dist.mass(x).is_zero()).cloned().collect();
        LemmaOutcome::Violated { atoms }
    }
}

fn and(a: &Event, b: &Event) -> Event {
    a.intersection(b).cloned().collect()
}

fn vacuous(h: impl Into<String>) -> LemmaOutcome {
    LemmaOutcome::Vacuous { hypothesis: h.into() }
}

/// Evaluates one rule instance on `dist`.
pub fn check_lemma(dist: &JointDistribution, case: &LemmaCase) -> Result<LemmaOutcome> {
    let cx = Ctx { dist };
    Ok(match case {
        LemmaCase::Refinement { a, b, c } => {
            cx.check_event(a, "A")?;
            cx.check_event(b, "B")?;
            cx.check_event(c, "C")?;
            let bc = and(b, c);
            if cx.p(&bc).is_zero() {
                vacuous("P(BC) > 0")
            } else if !cx.cond_is_one(a, b) {
                vacuous("P(A|B) = 1")
            } else {
                cx.conclude(a, &bc)
            }
        }
        LemmaCase::CommonValue { a, x, y, c } => {
            cx.check_event(a, "A")?;
            let (xc, yc, xy) = (cx.equals(x, c)?, cx.equals(y, c)?, cx.same(x, y)?);
            if cx.p(a).is_zero() {
                vacuous("P(A) > 0")
            } else if !cx.cond_is_one(&xc, a) {
                vacuous(format!("P({x}={}|A) = 1", fmt_q(c)))
            } else if !cx.cond_is_one(&yc, a) {
                vacuous(format!("P({y}={}|A) = 1", fmt_q(c)))
            } else {
                cx.conclude(&xy, a)
            }
        }
        LemmaCase::EqualityTransfer { a, x, y, c } => {
            cx.check_event(a, "A")?;
            let cond = and(a, &cx.equals(x, c)?);
            if cx.p(&cond).is_zero() {
                vacuous(format!("P(A, {x}={}) > 0", fmt_q(c)))
            } else if !cx.cond_is_one(&cx.same(x, y)?, &cond) {
                vacuous(format!("P({x}={y} | A, {x}={}) = 1", fmt_q(c)))
            } else {
                cx.conclude(&cx.equals(y, c)?, &cond)
            }
        }
        LemmaCase::Transitivity { a, b, c } => {
            cx.check_event(a, "A")?;
            cx.check_event(b, "B")?;
            cx.check_event(c, "C")?;
            if cx.p(b).is_zero() {
                vacuous("P(B) > 0")
            } else if cx.p(c).is_zero() {
                vacuous("P(C) > 0")
            } else if !cx.cond_is_one(a, b) {
                vacuous("P(A|B) = 1")
            } else if !cx.cond_is_one(b, c) {
                vacuous("P(B|C) = 1")
            } else {
                cx.conclude(a, c)
            }
        }
        LemmaCase::Substitution { a, x, y, z, c, d } => {
            cx.check_event(a, "A")?;
            let ayd = and(a, &cx.equals(y, d)?);
            let azd = and(a, &cx.equals(z, d)?);
            let xc = cx.equals(x, c)?;
            if cx.p(&ayd).is_zero() {
                vacuous(format!("P(A, {y}={}) > 0", fmt_q(d)))
            } else if cx.p(&azd).is_zero() {
                vacuous(format!("P(A, {z}={}) > 0", fmt_q(d)))
            } else if !cx.cond_is_one(&xc, &ayd) {
                vacuous(format!("P({x}={} | A, {y}={}) = 1", fmt_q(c), fmt_q(d)))
            } else if !cx.cond_is_one(&cx.same(z, y)?, &azd) {
                vacuous(format!("P({z}={y} | A, {z}={}) = 1", fmt_q(d)))
            } else {
                cx.conclude(&xc, &azd)
            }
        }
    })
}

/// The whole lattice as an event.
pub fn sure_event(dist: &JointDistribution) -> Event {
    dist.event_where(|_| true)
}

/// Atoms with positive mass, as an event.
pub fn support_event(dist: &JointDistribution) -> Event {
    dist.iter().map(|(a, _)| a.clone()).collect()
}
