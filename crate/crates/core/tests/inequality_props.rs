mod common;

use hidvar_core::inequality::{
    eval_bell_original, eval_chsh, eval_generalized_lower, eval_pairwise_triple, eval_spin1_strengthened, ChshMode,
    InequalityId, InequalityReport, InequalityVerdict,
};
use hidvar_core::lp::{decide, MomentConstraint, MomentProblem};
use hidvar_core::probability::{FiniteRandomVariable, Monomial};
use hidvar_core::{q, qi, Real, Q};
use num::{Signed, Zero};
use proptest::prelude::*;

use common::*;

fn unit() -> impl Strategy<Value = Q> {
    (-12i64..=12).prop_map(|k| q(k, 12))
}

fn bound<'a>(r: &'a InequalityReport, name: &str) -> &'a Real {
    &r.bounds.iter().find(|(n, _)| n == name).expect("named bound").1
}

fn verdict_matches_slack(r: &InequalityReport) -> bool {
    let min = r.bounds.iter().map(|(_, v)| v.clone()).min().unwrap();
    r.slack == min && (r.verdict == InequalityVerdict::Violated) == (r.slack < Real::zero())
}

/// `A, A', B, B'` on `{-1, 0, 1}` with the four cross products given.
fn spin1_problem(e: [Q; 4]) -> MomentProblem {
    let vars = ["A", "A'", "B", "B'"].map(|n| FiniteRandomVariable::from_ints(n, &[-1, 0, 1])).to_vec();
    let [a, b, c, d] = e;
    let cs = [(["A", "B"], a), (["A", "B'"], b), (["A'", "B"], c), (["A'", "B'"], d)]
        .into_iter()
        .map(|(pair, t)| MomentConstraint::eq(Monomial::product(&pair).unwrap(), t))
        .collect();
    MomentProblem::new(vars, cs, "spin-1").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn verdict_is_sign_of_slack(a in unit(), b in unit(), c in unit(), d in unit(), m in (-11i64..=11).prop_map(|k| q(k, 12))) {
        let reports = [
            eval_pairwise_triple(a.clone(), b.clone(), c.clone()).unwrap(),
            eval_generalized_lower(a.clone(), b.clone(), c.clone(), m.clone(), qi(0), -m.clone()).unwrap(),
            eval_bell_original(a.clone(), b.clone(), c.clone()).unwrap(),
            eval_chsh(a.clone(), b.clone(), c.clone(), d.clone(), &ChshMode::Normalized).unwrap(),
            eval_chsh(a.clone(), b.clone(), c.clone(), d.clone(), &ChshMode::Raw { j: qi(1) }).unwrap(),
            eval_spin1_strengthened(a, b, c, d).unwrap(),
        ];
        for r in &reports {
            prop_assert!(verdict_matches_slack(r), "{}", r.id.as_str());
        }
    }

    #[test]
    fn pairwise_triple_is_permutation_symmetric(a in unit(), b in unit(), c in unit()) {
        let base = eval_pairwise_triple(a.clone(), b.clone(), c.clone()).unwrap();
        let perms = [[&a, &c, &b], [&b, &a, &c], [&b, &c, &a], [&c, &a, &b], [&c, &b, &a]];
        for [x, y, z] in perms {
            let r = eval_pairwise_triple(x.clone(), y.clone(), z.clone()).unwrap();
            prop_assert_eq!(&r.verdict, &base.verdict);
            prop_assert_eq!(&r.slack, &base.slack);
        }
    }

    #[test]
    fn bell_original_swaps_outer_pairs(a in unit(), b in unit(), c in unit()) {
        let x = eval_bell_original(a.clone(), b.clone(), c.clone()).unwrap();
        let y = eval_bell_original(c, b, a).unwrap();
        prop_assert_eq!(x.slack, y.slack);
    }

    #[test]
    fn chsh_is_symmetric_under_relabelling(a in unit(), b in unit(), c in unit(), d in unit()) {
        let norm = |w: &Q, x: &Q, y: &Q, z: &Q| {
            eval_chsh(w.clone(), x.clone(), y.clone(), z.clone(), &ChshMode::Normalized).unwrap()
        };
        let base = norm(&a, &b, &c, &d);
        // A <-> A', then B <-> B'
        for r in [norm(&c, &d, &a, &b), norm(&b, &a, &d, &c)] {
            prop_assert_eq!(&r.verdict, &base.verdict);
            prop_assert_eq!(&r.slack, &base.slack);
        }
    }

    #[test]
    fn generalized_lower_at_zero_means_is_the_lower_bound(a in unit(), b in unit(), c in unit()) {
        let g = eval_generalized_lower(a.clone(), b.clone(), c.clone(), qi(0), qi(0), qi(0)).unwrap();
        let t = eval_pairwise_triple(a, b, c).unwrap();
        let lower = bound(&t, "lower");
        prop_assert_eq!(&g.slack, lower);
        prop_assert_eq!(g.is_satisfied(), *lower >= Real::zero());
    }

    #[test]
    fn normalized_chsh_matches_sign_flip_count(a in unit(), b in unit(), c in unit(), d in unit()) {
        let r = eval_chsh(a.clone(), b.clone(), c.clone(), d.clone(), &ChshMode::Normalized).unwrap();
        let e = [a, b, c, d];
        let ok = (0..4).all(|k| {
            let s: Q = e.iter().enumerate().map(|(i, v)| if i == k { -v } else { v.clone() }).sum();
            s.abs() <= qi(2)
        });
        prop_assert_eq!(r.is_satisfied(), ok);
    }

    #[test]
    fn raw_spin1_bound_is_necessary(e in proptest::array::uniform4((-2i64..=2).prop_map(|k| q(k, 2)))) {
        let r = eval_chsh(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone(), &ChshMode::Raw { j: qi(1) }).unwrap();
        if decide(&spin1_problem(e)).unwrap().is_feasible() {
            prop_assert!(r.is_satisfied());
        }
    }
}

#[test]
fn inputs_outside_the_unit_interval_are_rejected() {
    assert!(eval_pairwise_triple(q(3, 2), qi(0), qi(0)).is_err());
    assert!(eval_generalized_lower(qi(0), qi(0), qi(0), qi(1), qi(0), qi(0)).is_err());
    assert!(eval_chsh(qi(0), qi(0), qi(0), qi(0), &ChshMode::Raw { j: q(1, 3) }).is_err());
    assert!(eval_chsh(qi(2), qi(0), qi(0), qi(0), &ChshMode::Raw { j: qi(1) }).is_err());
    assert!(eval_chsh(qi(4), qi(0), qi(0), qi(0), &ChshMode::Raw { j: qi(2) }).is_ok());
}

#[test]
fn ids_round_trip() {
    for id in InequalityId::ALL {
        assert_eq!(InequalityId::parse(id.as_str()).unwrap(), id);
    }
    assert!(InequalityId::parse("nonsense").is_err());
}

#[test]
fn spin1_strengthened_violation_is_realizable() {
    // A = 0 and A' = B = B' = 1 with certainty
    let r = eval_spin1_strengthened(qi(0), qi(0), qi(1), qi(1)).unwrap();
    assert!(!r.is_satisfied());
    assert!(decide(&spin1_problem([qi(0), qi(0), qi(1), qi(1)])).unwrap().is_feasible());
}

#[test]
fn pairwise_triple_agrees_with_decide_on_eighths() {
    let g: Vec<Q> = (-8..=8).step_by(3).map(|k| q(k, 8)).collect();
    for a in &g {
        for b in &g {
            for c in &g {
                let ineq = eval_pairwise_triple(a.clone(), b.clone(), c.clone()).unwrap().is_satisfied();
                assert_eq!(ineq, decide(&zero_mean_triple(a.clone(), b.clone(), c.clone())).unwrap().is_feasible());
            }
        }
    }
}
