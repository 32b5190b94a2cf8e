//! Generators and independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use hidvar_core::lp::{MomentConstraint, MomentProblem};
use hidvar_core::probability::lemmas::LemmaCase;
use hidvar_core::probability::{lattice, Event, FiniteRandomVariable, JointDistribution, Monomial};
use hidvar_core::{q, qi, Q};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Quarter-step grid on `[-1, 1]`.
pub fn quarter_grid() -> Vec<Q> {
    (-4..=4).map(|k| q(k, 4)).collect()
}

pub fn half_grid() -> Vec<Q> {
    (-2..=2).map(|k| q(k, 2)).collect()
}

/// Three `±1` variables with zero means and the given pairwise products.
pub fn zero_mean_triple(exy: Q, eyz: Q, exz: Q) -> MomentProblem {
    let vars = ["X", "Y", "Z"].map(FiniteRandomVariable::pm1).to_vec();
    let mut cs: Vec<MomentConstraint> =
        ["X", "Y", "Z"].iter().map(|n| MomentConstraint::eq(Monomial::product(&[n]).unwrap(), qi(0))).collect();
    for (pair, e) in [(["X", "Y"], exy), (["Y", "Z"], eyz), (["X", "Z"], exz)] {
        cs.push(MomentConstraint::eq(Monomial::product(&pair).unwrap(), e));
    }
    MomentProblem::new(vars, cs, "zero-mean triple").unwrap()
}

/// Four `±1` variables `A, A', B, B'` with the four cross products given.
pub fn chsh_problem(eab: Q, eabp: Q, eapb: Q, eapbp: Q) -> MomentProblem {
    let vars = ["A", "A'", "B", "B'"].map(FiniteRandomVariable::pm1).to_vec();
    let cs = [(["A", "B"], eab), (["A", "B'"], eabp), (["A'", "B"], eapb), (["A'", "B'"], eapbp)]
        .into_iter()
        .map(|(pair, e)| MomentConstraint::eq(Monomial::product(&pair).unwrap(), e))
        .collect();
    MomentProblem::new(vars, cs, "chsh").unwrap()
}

/// Random small rational weights on a random subset of the lattice.
pub fn random_distribution(rng: &mut impl Rng, max_vars: usize, max_values: usize) -> JointDistribution {
    let n = rng.gen_range(1..=max_vars);
    let names = ["X", "Y", "Z", "W"];
    let vars: Vec<FiniteRandomVariable> = (0..n)
        .map(|i| {
            let k = rng.gen_range(1..=max_values);
            let mut pool: Vec<i64> = (-3..=3).collect();
            pool.shuffle(rng);
            let mut vals: Vec<i64> = pool[..k].to_vec();
            vals.sort();
            FiniteRandomVariable::from_ints(names[i], &vals)
        })
        .collect();
    random_on(rng, vars)
}

pub fn random_on(rng: &mut impl Rng, vars: Vec<FiniteRandomVariable>) -> JointDistribution {
    let atoms = lattice_values(&vars);
    loop {
        let weights: Vec<i64> =
            atoms.iter().map(|_| if rng.gen_bool(0.35) { 0 } else { rng.gen_range(1..=6) }).collect();
        let total: i64 = weights.iter().sum();
        if total == 0 {
            continue;
        }
        let rows = atoms.iter().zip(&weights).map(|(a, &w)| (a.clone(), q(w, total))).collect();
        return JointDistribution::from_values(vars, rows).unwrap();
    }
}

/// Every value tuple of the lattice, first variable slowest.
pub fn lattice_values(vars: &[FiniteRandomVariable]) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = vec![vec![]];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                v.support().iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Value tuples with positive mass.
pub fn rows(dist: &JointDistribution) -> Vec<(Vec<Q>, Q)> {
    dist.iter().map(|(a, m)| (a.values(dist.variables()).cloned().collect(), m.clone())).collect()
}

/// `E(Π x_i^k_i)` summed directly over value tuples.
pub fn direct_moment(dist: &JointDistribution, exps: &[(&str, u32)]) -> Q {
    let pos: Vec<(usize, u32)> =
        exps.iter().map(|(n, k)| (dist.variables().iter().position(|v| v.name() == *n).unwrap(), *k)).collect();
    rows(dist)
        .into_iter()
        .map(|(vals, m)| pos.iter().fold(m, |acc, (i, k)| acc * num::pow(vals[*i].clone(), *k as usize)))
        .sum()
}

/// Random equality problems on at most 3 variables with at most 3 values.
/// Roughly half take their targets from a random distribution, so they are
/// feasible; the rest perturb one target.
pub fn random_problem(rng: &mut impl Rng) -> MomentProblem {
    let dist = random_distribution(rng, 3, 3);
    let vars = dist.variables().to_vec();
    let names: Vec<&str> = vars.iter().map(|v| v.name()).collect();
    let mut monomials: Vec<Monomial> = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let mut exps: BTreeMap<&str, u32> = BTreeMap::new();
        for n in &names {
            if rng.gen_bool(0.5) {
                exps.insert(n, rng.gen_range(1..=2));
            }
        }
        if exps.is_empty() {
            exps.insert(names[rng.gen_range(0..names.len())], 1);
        }
        let m = Monomial::new(exps).unwrap();
        if !monomials.contains(&m) {
            monomials.push(m);
        }
    }
    let mut cs: Vec<MomentConstraint> = monomials
        .into_iter()
        .map(|m| {
            let t = dist.expectation(&m).unwrap();
            MomentConstraint::eq(m, t)
        })
        .collect();
    if rng.gen_bool(0.5) {
        let k = rng.gen_range(0..cs.len());
        cs[k].target += q(rng.gen_range(-6..=6), rng.gen_range(1..=4));
    }
    MomentProblem::new(vars, cs, "random").unwrap()
}

pub fn random_event(rng: &mut impl Rng, d: &JointDistribution, p: f64) -> Event {
    lattice(d.variables()).filter(|_| rng.gen_bool(p)).collect()
}

pub fn union(a: &Event, b: &Event) -> Event {
    a.union(b).cloned().collect()
}

/// A random rule instance whose hypotheses are arranged to hold often.
pub fn random_lemma(rng: &mut impl Rng, d: &JointDistribution) -> LemmaCase {
    let names: Vec<String> = d.variables().iter().map(|v| v.name().to_string()).collect();
    let pick = |rng: &mut dyn rand::RngCore| names[rng.gen_range(0..names.len())].clone();
    let value = |rng: &mut dyn rand::RngCore, n: &str| {
        let v = d.variable(n).unwrap();
        v.support()[rng.gen_range(0..v.len())].clone()
    };
    let idx = |n: &str| d.variable_index(n).unwrap();
    match rng.gen_range(1..=5) {
        1 => {
            let b = random_event(rng, d, 0.4);
            let a = union(&b, &random_event(rng, d, 0.3));
            LemmaCase::Refinement { a, b, c: random_event(rng, d, 0.6) }
        }
        2 => {
            let (x, y) = (pick(rng), pick(rng));
            let c = value(rng, &x);
            let (i, j) = (idx(&x), idx(&y));
            let r = random_event(rng, d, 0.7);
            let a = d.event_where(|at| r.contains(at) && *d.value_of(at, i) == c && *d.value_of(at, j) == c);
            let a = if rng.gen_bool(0.2) { random_event(rng, d, 0.5) } else { a };
            LemmaCase::CommonValue { a, x, y, c }
        }
        3 => {
            let (x, y) = (pick(rng), pick(rng));
            let c = value(rng, &x);
            let (i, j) = (idx(&x), idx(&y));
            let r = random_event(rng, d, 0.7);
            let a = d.event_where(|at| r.contains(at) && d.value_of(at, i) == d.value_of(at, j));
            LemmaCase::EqualityTransfer { a, x, y, c }
        }
        4 => {
            let c = random_event(rng, d, 0.4);
            let b = union(&c, &random_event(rng, d, 0.3));
            let a = union(&b, &random_event(rng, d, 0.3));
            LemmaCase::Transitivity { a, b, c }
        }
        _ => {
            let (x, y, z) = (pick(rng), pick(rng), pick(rng));
            let c = value(rng, &x);
            let dv = value(rng, &y);
            let (ix, iy, iz) = (idx(&x), idx(&y), idx(&z));
            let r = random_event(rng, d, 0.8);
            let a = d.event_where(|at| {
                r.contains(at)
                    && (*d.value_of(at, iy) != dv || *d.value_of(at, ix) == c)
                    && (*d.value_of(at, iz) != dv || d.value_of(at, iz) == d.value_of(at, iy))
            });
            LemmaCase::Substitution { a, x, y, z, c, d: dv }
        }
    }
}
