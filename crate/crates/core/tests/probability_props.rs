mod common;

use std::collections::BTreeMap;

use hidvar_core::probability::lemmas::{check_lemma, LemmaCase, LemmaOutcome};
use hidvar_core::probability::{
    correlation, lattice, pushforward, Event, FiniteRandomVariable, JointDistribution, Monomial, NamedFunction,
};
use hidvar_core::{q, qi, Q};
use proptest::prelude::*;
use rand::Rng;

use common::*;

fn random_monomial(rng: &mut impl Rng, d: &JointDistribution) -> Vec<(String, u32)> {
    let mut exps = Vec::new();
    for v in d.variables() {
        if rng.gen_bool(0.5) {
            exps.push((v.name().to_string(), rng.gen_range(1..=2)));
        }
    }
    if exps.is_empty() {
        exps.push((d.variables()[0].name().to_string(), 1));
    }
    exps
}

fn monomial(exps: &[(String, u32)]) -> Monomial {
    Monomial::new(exps.iter().cloned()).unwrap()
}

fn borrowed(exps: &[(String, u32)]) -> Vec<(&str, u32)> {
    exps.iter().map(|(n, k)| (n.as_str(), *k)).collect()
}

/// Averages a `±1` distribution with its global sign flip, which zeroes every odd moment.
fn symmetrized(d: &JointDistribution) -> JointDistribution {
    let mut acc: BTreeMap<Vec<Q>, Q> = BTreeMap::new();
    for (vals, m) in rows(d) {
        let flipped: Vec<Q> = vals.iter().map(|v| -v).collect();
        *acc.entry(vals).or_insert_with(|| qi(0)) += &m / qi(2);
        *acc.entry(flipped).or_insert_with(|| qi(0)) += m / qi(2);
    }
    JointDistribution::from_values(d.variables().to_vec(), acc.into_iter().collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn masses_are_a_probability_vector(seed in any::<u64>()) {
        let d = random_distribution(&mut rng(seed), 3, 3);
        prop_assert!(d.iter().all(|(_, m)| *m > qi(0)));
        prop_assert_eq!(d.iter().map(|(_, m)| m.clone()).sum::<Q>(), qi(1));
        let everything: Event = lattice(d.variables()).collect();
        prop_assert_eq!(d.probability(&everything), qi(1));
    }

    #[test]
    fn expectation_matches_direct_sum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_distribution(&mut r, 3, 3);
        let exps = random_monomial(&mut r, &d);
        prop_assert_eq!(d.expectation(&monomial(&exps)).unwrap(), direct_moment(&d, &borrowed(&exps)));
    }

    #[test]
    fn expectation_is_linear(seed in any::<u64>(), a in -5i64..=5, b in -5i64..=5, c in 1i64..=4) {
        let mut r = rng(seed);
        let d = random_distribution(&mut r, 3, 3);
        let (e1, e2) = (random_monomial(&mut r, &d), random_monomial(&mut r, &d));
        let (wa, wb) = (q(a, c), q(b, c));
        // E(wa·m1 + wb·m2) by value tuples, with no reference to the engine
        let pos = |n: &str| d.variables().iter().position(|v| v.name() == n).unwrap();
        let eval = |vals: &[Q], exps: &[(String, u32)]| {
            exps.iter().fold(qi(1), |acc, (n, k)| acc * num::pow(vals[pos(n)].clone(), *k as usize))
        };
        let combined: Q = rows(&d).iter().map(|(v, m)| m * (&wa * eval(v, &e1) + &wb * eval(v, &e2))).sum();
        let split = &wa * d.expectation(&monomial(&e1)).unwrap() + &wb * d.expectation(&monomial(&e2)).unwrap();
        prop_assert_eq!(combined, split);
    }

    #[test]
    fn pushforward_conserves_mass_and_marginals(seed in any::<u64>()) {
        let mut r = rng(seed);
        let vars: Vec<FiniteRandomVariable> = ["X", "Y", "Z"]
            .iter()
            .map(|n| FiniteRandomVariable::from_ints(*n, &[-1, 0, 2][..r.gen_range(2..=3)]))
            .collect();
        let d = random_on(&mut r, vars);
        let fns = [
            NamedFunction::linear("S", &[("X", qi(1)), ("Y", qi(1))], qi(0)),
            NamedFunction::custom("M", &["Y", "Z"], |a| a[0].clone().max(a[1].clone())),
            NamedFunction::linear("T", &[("Z", q(1, 2))], qi(1)),
        ];
        let all = pushforward(&d, &fns).unwrap();
        prop_assert_eq!(all.iter().map(|(_, m)| m.clone()).sum::<Q>(), qi(1));
        for keep in [[0usize, 1], [0, 2], [1, 2]] {
            let names: Vec<&str> = keep.iter().map(|&i| fns[i].name.as_str()).collect();
            let sub: Vec<NamedFunction> = keep.iter().map(|&i| fns[i].clone()).collect();
            prop_assert_eq!(all.marginal(&names).unwrap(), pushforward(&d, &sub).unwrap());
        }
    }

    #[test]
    fn zero_mean_pm1_correlation_is_product_moment(seed in any::<u64>()) {
        let vars = ["X", "Y", "Z"].map(FiniteRandomVariable::pm1).to_vec();
        let d = symmetrized(&random_on(&mut rng(seed), vars));
        for (x, y) in [("X", "Y"), ("Y", "Z"), ("X", "Z")] {
            prop_assert_eq!(direct_moment(&d, &[(x, 1)]), qi(0));
            let rho = correlation(&d, x, y).unwrap().exact();
            prop_assert_eq!(rho, Some(direct_moment(&d, &[(x, 1), (y, 1)])));
        }
    }

    #[test]
    fn correlation_is_symmetric_and_bounded(seed in any::<u64>()) {
        let d = random_distribution(&mut rng(seed), 3, 3);
        let names: Vec<&str> = d.variables().iter().map(|v| v.name()).collect();
        for x in &names {
            for y in &names {
                let (a, b) = (correlation(&d, x, y).unwrap(), correlation(&d, y, x).unwrap());
                prop_assert_eq!(a.exact(), b.exact());
                if let Some(v) = a.value() {
                    prop_assert!(v.cmp_rational(&qi(1)).is_le() && v.cmp_rational(&qi(-1)).is_ge());
                }
            }
        }
    }

    #[test]
    fn rules_never_fail_when_hypotheses_hold(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_distribution(&mut r, 3, 3);
        let case = random_lemma(&mut r, &d);
        prop_assert!(!check_lemma(&d, &case).unwrap().is_violated(), "rule {}", case.number());
    }
}

/// All distributions on two `±1` variables with masses in quarters.
fn quarter_distributions() -> Vec<JointDistribution> {
    let vars = ["X", "Y"].map(FiniteRandomVariable::pm1).to_vec();
    let cells = lattice_values(&vars);
    let mut out = Vec::new();
    for a in 0..=4i64 {
        for b in 0..=4 - a {
            for c in 0..=4 - a - b {
                let w = [a, b, c, 4 - a - b - c];
                let rows = cells.iter().cloned().zip(w.iter().map(|&k| q(k, 4))).collect();
                out.push(JointDistribution::from_values(vars.clone(), rows).unwrap());
            }
        }
    }
    out
}

fn all_events(d: &JointDistribution) -> Vec<Event> {
    let atoms: Vec<_> = lattice(d.variables()).collect();
    (0..1u32 << atoms.len())
        .map(|mask| atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()).collect())
        .collect()
}

#[test]
fn event_rules_exhaustive_on_small_space() {
    let mut applied = [0usize; 2];
    for d in quarter_distributions() {
        let events = all_events(&d);
        for a in &events {
            for b in &events {
                for c in &events {
                    for (k, case) in [
                        LemmaCase::Refinement { a: a.clone(), b: b.clone(), c: c.clone() },
                        LemmaCase::Transitivity { a: a.clone(), b: b.clone(), c: c.clone() },
                    ]
                    .into_iter()
                    .enumerate()
                    {
                        match check_lemma(&d, &case).unwrap() {
                            LemmaOutcome::Violated { atoms } => panic!("rule {} fails: {atoms:?}", case.number()),
                            LemmaOutcome::Holds => applied[k] += 1,
                            LemmaOutcome::Vacuous { .. } => {}
                        }
                    }
                }
            }
        }
    }
    assert!(applied.iter().all(|&n| n > 0));
}

#[test]
fn value_rules_exhaustive_on_small_space() {
    let mut applied = 0;
    for d in quarter_distributions() {
        for a in all_events(&d) {
            for c in [qi(-1), qi(1)] {
                for (x, y) in [("X", "Y"), ("Y", "X"), ("X", "X")] {
                    let cases = [
                        LemmaCase::CommonValue { a: a.clone(), x: x.into(), y: y.into(), c: c.clone() },
                        LemmaCase::EqualityTransfer { a: a.clone(), x: x.into(), y: y.into(), c: c.clone() },
                    ];
                    for case in cases {
                        let out = check_lemma(&d, &case).unwrap();
                        assert!(!out.is_violated(), "rule {} fails on {a:?}", case.number());
                        applied += usize::from(out == LemmaOutcome::Holds);
                    }
                    for dv in [qi(-1), qi(1)] {
                        let case = LemmaCase::Substitution {
                            a: a.clone(),
                            x: x.into(),
                            y: y.into(),
                            z: "Y".into(),
                            c: c.clone(),
                            d: dv,
                        };
                        assert!(!check_lemma(&d, &case).unwrap().is_violated());
                    }
                }
            }
        }
    }
    assert!(applied > 0);
}
