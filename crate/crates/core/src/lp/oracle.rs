//! Independent feasibility check by facet enumeration.
//!
//! Each atom maps to the point `(m₁(a), …, m_K(a))` of its constraint
//! monomials; the problem is feasible iff the target vector lies in the convex
//! hull of those points. The hull's facets are enumerated with the
//! double-description method. A facet violated by the target is itself a
//! Farkas certificate; otherwise a witness is assembled by shooting a ray from
//! a hull point through the target onto a facet and recursing on that facet.
//!
//! Nothing here shares code with the simplex kernel beyond the column generator.

use std::collections::BTreeMap;

use num::{BigInt, Integer, One, Signed, Zero};

use super::columns::Columns;
use super::{audit, check_cap, witness_from, Certificate, FeasibilityResult, MomentProblem, Relation};
use crate::error::{Error, Result};
use crate::scalar::Q;

/// Largest lattice the oracle accepts.
pub const ORACLE_ATOM_CAP: usize = 4096;

pub fn brute_force_oracle(problem: &MomentProblem) -> Result<FeasibilityResult> {
    check_cap(problem, ORACLE_ATOM_CAP)?;
    if problem.constraints().iter().any(|c| c.relation != Relation::Eq) {
        return Err(Error::Unsupported("the oracle handles equality constraints only".into()));
    }
    let columns = Columns::new(problem)?;
    let mut first_atom: BTreeMap<Vec<Q>, usize> = BTreeMap::new();
    for j in 0..columns.atoms() {
        first_atom.entry(columns.column(j)[1..].to_vec()).or_insert(j);
    }
    let (points, atoms): (Vec<Vec<Q>>, Vec<usize>) = first_atom.into_iter().unzip();
    let target: Vec<Q> = problem.constraints().iter().map(|c| c.target.clone()).collect();
    let k = target.len();

    let all: Vec<usize> = (0..points.len()).collect();
    let hull = affine_hull(&points, &all);
    let p0 = &points[0];
    for w in &hull.normals {
        let s = dot(w, &sub(&target, p0));
        if !s.is_zero() {
            // f(x) = -sgn(s)·w·(x - p0): zero on every point, negative at the target
            let sgn = if s.is_positive() { Q::one() } else { -Q::one() };
            let mut y = vec![Q::zero(); k + 1];
            y[0] = &sgn * dot(w, p0);
            for (yk, wk) in y[1..].iter_mut().zip(w) {
                *yk = -(&sgn * wk);
            }
            return finish(problem, FeasibilityResult::infeasible(Certificate { multipliers: y }));
        }
    }

    let facets = facets(&points, &all, &hull.coords);
    let lifted_target = lift(&target, &hull.coords);
    if let Some(f) = facets.iter().find(|f| dot(&f.normal, &lifted_target).is_negative()) {
        let mut y = vec![Q::zero(); k + 1];
        y[0] = f.normal[0].clone();
        for (i, &c) in hull.coords.iter().enumerate() {
            y[c + 1] = f.normal[i + 1].clone();
        }
        return finish(problem, FeasibilityResult::infeasible(Certificate { multipliers: y }));
    }

    let weights = represent(&points, all, target)?;
    let witness = witness_from(problem, &columns, weights.into_iter().map(|(i, w)| (atoms[i], w)))?;
    finish(problem, FeasibilityResult::feasible(witness))
}

fn finish(problem: &MomentProblem, result: FeasibilityResult) -> Result<FeasibilityResult> {
    audit(problem, &result)?;
    Ok(result)
}

struct Hull {
    /// coordinates that parametrize the affine hull
    coords: Vec<usize>,
    /// basis of directions orthogonal to the hull
    normals: Vec<Vec<Q>>,
}

struct Facet {
    /// `[c, n…]`: `c + n·x >= 0` on the hull, over `coords`
    normal: Vec<Q>,
    /// members of the subset lying on the facet
    tight: Vec<usize>,
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn lift(p: &[Q], coords: &[usize]) -> Vec<Q> {
    let mut v = Vec::with_capacity(coords.len() + 1);
    v.push(Q::one());
    v.extend(coords.iter().map(|&c| p[c].clone()));
    v
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(rows: &mut Vec<Vec<Q>>, width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, w) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * w;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

fn affine_hull(points: &[Vec<Q>], subset: &[usize]) -> Hull {
    let width = points[subset[0]].len();
    let p0 = &points[subset[0]];
    let mut rows: Vec<Vec<Q>> = subset[1..].iter().map(|&i| sub(&points[i], p0)).collect();
    let coords = rref(&mut rows, width);
    let normals = (0..width)
        .filter(|c| !coords.contains(c))
        .map(|free| {
            let mut w = vec![Q::zero(); width];
            w[free] = Q::one();
            for (row, &pc) in rows.iter().zip(&coords) {
                w[pc] = -row[free].clone();
            }
            w
        })
        .collect();
    Hull { coords, normals }
}

/// Scales a nonzero vector to coprime integers.
fn primitive(v: Vec<Q>) -> Vec<Q> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

#[derive(Clone)]
struct Ray {
    v: Vec<Q>,
    zero: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn bits_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bits_count(a: &[u64]) -> usize {
    a.iter().map(|x| x.count_ones() as usize).sum()
}

fn bits_superset(sup: &[u64], of: &[u64]) -> bool {
    sup.iter().zip(of).all(|(s, o)| s & o == *o)
}

/// Facets of `conv(points[subset])` within its affine hull, parametrized by `coords`.
fn facets(points: &[Vec<Q>], subset: &[usize], coords: &[usize]) -> Vec<Facet> {
    let d = coords.len() + 1;
    if d == 1 {
        return Vec::new();
    }
    let rows: Vec<Vec<Q>> = subset.iter().map(|&i| lift(&points[i], coords)).collect();
    let words = rows.len().div_ceil(64);

    // d independent rows seed a simplicial cone whose rays are the columns of its inverse.
    let mut basis_rows: Vec<usize> = Vec::new();
    let mut echelon: Vec<Vec<Q>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut trial = echelon.clone();
        trial.push(row.clone());
        if rref(&mut trial, d).len() > echelon.len() {
            echelon = trial;
            basis_rows.push(i);
            if basis_rows.len() == d {
                break;
            }
        }
    }
    let inverse = invert(basis_rows.iter().map(|&i| rows[i].clone()).collect());
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| {
            let v = primitive((0..d).map(|r| inverse[r][j].clone()).collect());
            let mut zero = vec![0u64; words];
            for (k, &bi) in basis_rows.iter().enumerate() {
                if k != j {
                    bit_set(&mut zero, bi);
                }
            }
            Ray { v, zero }
        })
        .collect();

    for (i, row) in rows.iter().enumerate() {
        if basis_rows.contains(&i) {
            continue;
        }
        let values: Vec<Q> = rays.iter().map(|r| dot(&r.v, row)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    bit_set(&mut r.zero, i);
                }
            }
            continue;
        }
        let mut next: Vec<Ray> = Vec::new();
        for (k, r) in rays.iter().enumerate() {
            if values[k].is_zero() {
                let mut r = r.clone();
                bit_set(&mut r.zero, i);
                next.push(r);
            } else if values[k].is_positive() {
                next.push(r.clone());
            }
        }
        for &p in &pos {
            for &n in &neg {
                let common = bits_and(&rays[p].zero, &rays[n].zero);
                if bits_count(&common) + 2 < d {
                    continue;
                }
                let adjacent =
                    rays.iter().enumerate().all(|(k, r)| k == p || k == n || !bits_superset(&r.zero, &common));
                if !adjacent {
                    continue;
                }
                let (sp, sn) = (&values[p], -&values[n]);
                let v = rays[n].v.iter().zip(&rays[p].v).map(|(a, b)| sp * a + &sn * b).collect();
                let mut zero = common;
                bit_set(&mut zero, i);
                next.push(Ray { v: primitive(v), zero });
            }
        }
        rays = next;
    }

    rays.into_iter()
        .map(|r| {
            let tight = subset
                .iter()
                .enumerate()
                .filter(|(k, _)| r.zero[k / 64] & (1 << (k % 64)) != 0)
                .map(|(_, &i)| i)
                .collect();
            Facet { normal: r.v, tight }
        })
        .collect()
}

fn invert(mut m: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    let d = m.len();
    for (i, row) in m.iter_mut().enumerate() {
        row.extend((0..d).map(|j| if i == j { Q::one() } else { Q::zero() }));
    }
    rref(&mut m, d);
    m.into_iter().map(|row| row[d..].to_vec()).collect()
}

/// Convex weights on `subset` reproducing `target`, which must lie in its hull.
fn represent(points: &[Vec<Q>], subset: Vec<usize>, target: Vec<Q>) -> Result<Vec<(usize, Q)>> {
    let hull = affine_hull(points, &subset);
    let p = &points[subset[0]];
    if hull.coords.is_empty() || *p == target {
        return Ok(vec![(subset[0], Q::one())]);
    }
    let dir = sub(&target, p);
    let mut lifted_dir = vec![Q::zero()];
    lifted_dir.extend(hull.coords.iter().map(|&c| dir[c].clone()));
    let lifted_p = lift(p, &hull.coords);

    let mut best: Option<(Q, Facet)> = None;
    for f in facets(points, &subset, &hull.coords) {
        let rate = dot(&f.normal, &lifted_dir);
        if !rate.is_negative() {
            continue;
        }
        let t = dot(&f.normal, &lifted_p) / -rate;
        if best.as_ref().is_none_or(|(b, _)| t < *b) {
            best = Some((t, f));
        }
    }
    let (t, facet) = best.ok_or_else(|| Error::Internal("ray from a hull point left no facet".into()))?;
    if t < Q::one() {
        return Err(Error::Internal("target lies outside the hull during reconstruction".into()));
    }
    let hit: Vec<Q> = p.iter().zip(&dir).map(|(a, b)| a + &t * b).collect();
    let inner = represent(points, facet.tight, hit)?;
    // target = (1 - 1/t)·p + (1/t)·hit
    let s = t.recip();
    let mut weights: BTreeMap<usize, Q> = BTreeMap::new();
    *weights.entry(subset[0]).or_default() += Q::one() - &s;
    for (i, w) in inner {
        *weights.entry(i).or_default() += &s * w;
    }
    Ok(weights.into_iter().filter(|(_, w)| !w.is_zero()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::tests::pm1_triple;
    use crate::lp::{decide, verify_certificate, MomentConstraint, Verdict};
    use crate::probability::{FiniteRandomVariable, Monomial};
    use crate::scalar::{q, qi};

    #[test]
    fn agrees_on_triples() {
        for (a, b, c) in [(q(-1, 2), q(-1, 2), q(-1, 2)), (q(1, 2), q(-1, 2), q(-1, 2)), (qi(1), qi(1), qi(-1))] {
            let p = pm1_triple(a, b, c);
            let o = brute_force_oracle(&p).unwrap();
            assert_eq!(o.verdict, decide(&p).unwrap().verdict);
            if let Some(cert) = &o.certificate {
                assert!(verify_certificate(&p, cert).unwrap());
            }
        }
    }

    #[test]
    fn trivial_cases() {
        let x = FiniteRandomVariable::pm1("X");
        let empty = MomentProblem::<Q>::new(vec![x.clone()], vec![], "").unwrap();
        assert!(brute_force_oracle(&empty).unwrap().is_feasible());
        let out =
            MomentProblem::new(vec![x], vec![MomentConstraint::eq(Monomial::product(&["X"]).unwrap(), qi(2))], "")
                .unwrap();
        assert_eq!(brute_force_oracle(&out).unwrap().verdict, Verdict::Infeasible);
    }

    #[test]
    fn off_hull_target() {
        // X and X² on {-1, 1}: X² is always 1
        let x = FiniteRandomVariable::pm1("X");
        let p = MomentProblem::new(
            vec![x],
            vec![
                MomentConstraint::eq(Monomial::product(&["X"]).unwrap(), qi(0)),
                MomentConstraint::eq(Monomial::new([("X", 2)]).unwrap(), q(1, 2)),
            ],
            "",
        )
        .unwrap();
        let o = brute_force_oracle(&p).unwrap();
        assert_eq!(o.verdict, Verdict::Infeasible);
    }

    #[test]
    fn rejects_inequalities() {
        let x = FiniteRandomVariable::pm1("X");
        let p = MomentProblem::new(
            vec![x],
            vec![MomentConstraint::at_least(Monomial::product(&["X"]).unwrap(), qi(0))],
            "",
        )
        .unwrap();
        assert!(matches!(brute_force_oracle(&p), Err(Error::Unsupported(_))));
    }
}
