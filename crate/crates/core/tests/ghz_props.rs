mod common;

use hidvar_core::ghz::{
    build_ghz_problem, ghz_variables, minimal_infeasible_subsets, prove_ghz_infeasible, replay_proof_chain,
    single_drop_table, GhzConfig, StepStatus,
};
use hidvar_core::lp::{decide, verify_certificate, Verdict};
use hidvar_core::probability::JointDistribution;
use hidvar_core::{q, qi};
use proptest::prelude::*;
use rand::Rng;

use common::*;

const NAMES: [&str; 8] = ["A_0", "B_0", "C_0", "D_0", "A_pi", "A_halfpi", "C_halfpi", "D_halfpi"];

/// Variables of each default quadruple and its target, written out by hand.
fn table() -> [([&'static str; 4], i64); 6] {
    [
        (["A_0", "B_0", "C_0", "D_0"], -1),
        (["A_pi", "B_0", "C_0", "D_0"], 1),
        (["A_halfpi", "B_0", "C_halfpi", "D_0"], -1),
        (["A_halfpi", "B_0", "C_0", "D_halfpi"], -1),
        (["A_0", "B_0", "C_halfpi", "D_halfpi"], 1),
        (["A_pi", "B_0", "C_halfpi", "D_halfpi"], -1),
    ]
}

/// Sign vectors on which every constraint in `keep` holds pointwise.
fn satisfying_points(keep: &[usize]) -> Vec<[i64; 8]> {
    (0..256u32)
        .map(|code| std::array::from_fn(|i| if code >> i & 1 == 1 { 1 } else { -1 }))
        .filter(|p: &[i64; 8]| {
            keep.iter().all(|&k| {
                let (vars, t) = table()[k];
                vars.iter().map(|v| p[NAMES.iter().position(|n| n == v).unwrap()]).product::<i64>() == t
            })
        })
        .collect()
}

fn mixture(rng: &mut impl Rng, points: &[[i64; 8]]) -> JointDistribution {
    let chosen: Vec<&[i64; 8]> = points.iter().filter(|_| rng.gen_bool(0.3)).collect();
    let chosen = if chosen.is_empty() { vec![&points[0]] } else { chosen };
    let weights: Vec<i64> = chosen.iter().map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = weights.iter().sum();
    let rows = chosen.iter().zip(&weights).map(|(p, &w)| (p.iter().map(|&v| qi(v)).collect(), q(w, total))).collect();
    JointDistribution::from_values(ghz_variables(), rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn replay_never_fails_where_its_constraints_hold(seed in any::<u64>(), mask in 0u32..64) {
        let keep: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 1).collect();
        let points = satisfying_points(&keep);
        prop_assume!(!points.is_empty());
        let d = mixture(&mut rng(seed), &points);
        let report = replay_proof_chain(&d).unwrap();
        for &k in &keep {
            prop_assert!(report.constraints[k].1, "constraint {k} should hold");
        }
        for step in &report.steps {
            prop_assert!(step.status != StepStatus::Fails, "step {} fails with {:?}", step.number, step.value);
            if let Some((n, out)) = &step.lemma {
                prop_assert!(!out.is_violated(), "rule {n} violated at step {}", step.number);
            }
            if step.requires.iter().all(|&k| report.constraints[k].1) && step.value.is_some() {
                prop_assert_eq!(&step.status, &StepStatus::Holds);
            }
        }
        let (early, late) = &report.conflict;
        prop_assert!(!(early == &Some(qi(1)) && late == &Some(qi(1))));
    }
}

#[test]
fn targets_match_hand_table() {
    let p = build_ghz_problem(&GhzConfig::default()).unwrap();
    for (c, (vars, t)) in p.constraints().iter().zip(table()) {
        let names: Vec<&str> = c.monomial.exponents().keys().map(|s| s.as_str()).collect();
        let mut want = vars.to_vec();
        want.sort();
        assert_eq!(names, want);
        assert_eq!(c.target, qi(t));
    }
}

#[test]
fn quadruples_take_one_variable_per_party() {
    for quad in GhzConfig::default().quadruples {
        let vars = quad.variables().unwrap();
        for (party, v) in ["A", "B", "C", "D"].iter().zip(vars) {
            assert!(v.starts_with(party), "{v}");
        }
        assert!([qi(-1), qi(0), qi(1)].contains(&quad.target()));
    }
}

#[test]
fn default_and_proof_configs_are_refuted() {
    for cfg in [GhzConfig::default(), GhzConfig::proof_config()] {
        let p = build_ghz_problem(&cfg).unwrap();
        let r = prove_ghz_infeasible(&cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Infeasible);
        assert!(verify_certificate(&p, r.certificate.as_ref().unwrap()).unwrap());
    }
}

#[test]
fn subset_verdicts_match_sign_parity() {
    // a ±1 system with ±1 targets is feasible iff some sign vector meets every constraint
    for mask in 0u32..64 {
        let keep: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 1).collect();
        let lp = decide(&build_ghz_problem(&GhzConfig::subset(&keep)).unwrap()).unwrap().is_feasible();
        assert_eq!(lp, !satisfying_points(&keep).is_empty(), "subset {keep:?}");
    }
}

#[test]
fn minimal_subsets_and_single_drops() {
    let cfg = GhzConfig::default();
    assert_eq!(minimal_infeasible_subsets(&cfg).unwrap(), vec![vec![0, 2, 3, 4], vec![1, 2, 3, 5]]);
    // dropping a constraint shared by both minimal subsets is the only single drop that restores feasibility
    for (k, v) in single_drop_table(&cfg).unwrap() {
        let shared = k == 2 || k == 3;
        assert_eq!(v == Verdict::Feasible, shared, "drop {k}");
    }
}

#[test]
fn replay_rejects_foreign_distributions() {
    let d = random_distribution(&mut rng(3), 3, 2);
    assert!(replay_proof_chain(&d).is_err());
}
