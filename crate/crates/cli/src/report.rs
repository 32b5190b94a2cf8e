//! Deterministic JSON rendering of engine values.
//!
//! Rationals are `"p/q"` strings. Irrational algebraic values are objects with
//! the exact radical form, the minimal polynomial (coefficients from degree 0)
//! and an enclosing interval of width at most 1e-12. Floats are fixed-point
//! strings with 12 decimals. Keys are sorted.

use hidvar_core::inequality::InequalityReport;
use hidvar_core::lp::{Certificate, FeasibilityResult};
use hidvar_core::probability::JointDistribution;
use hidvar_core::{fmt_q, q, Real, Scalar, Q};
use serde_json::{json, Map, Value};

pub const ENGINE: &str = concat!("hidvar ", env!("CARGO_PKG_VERSION"));

pub fn rational(v: &Q) -> Value {
    Value::String(fmt_q(v))
}

pub fn real(v: &Real) -> Value {
    match v.to_rational() {
        Some(r) => rational(&r),
        None => {
            let enc = v.enclose(&q(1, 1_000_000_000_000));
            json!({
                "exact": v.to_string(),
                "poly": v.minimal_polynomial().iter().map(rational).collect::<Vec<_>>(),
                "interval": [rational(&enc.lo), rational(&enc.hi)],
            })
        }
    }
}

pub fn scalar<T: Scalar + Into<Real>>(v: &T) -> Value {
    real(&v.clone().into())
}

pub fn float(v: f64) -> Value {
    let r = (v * 1e12).round() / 1e12;
    let r = if r == 0.0 { 0.0 } else { r };
    Value::String(format!("{r:.12}"))
}

pub fn distribution<T: Scalar + Into<Real>>(d: &JointDistribution<T>) -> Value {
    let vars = d.variables();
    json!({
        "variables": vars.iter().map(|v| json!({
            "name": v.name(),
            "support": v.support().iter().map(rational).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "atoms": d.iter().map(|(a, p)| json!({
            "values": a.values(vars).map(rational).collect::<Vec<_>>(),
            "p": scalar(p),
        })).collect::<Vec<_>>(),
    })
}

pub fn certificate<T: Scalar + Into<Real>>(c: &Certificate<T>, verified: bool) -> Value {
    json!({
        "multipliers": c.multipliers.iter().map(scalar).collect::<Vec<_>>(),
        "verified": verified,
    })
}

/// Verdict, atom count and witness or certificate.
pub fn feasibility<T: Scalar + Into<Real>>(r: &FeasibilityResult<T>, atoms: String, verified: bool) -> Value {
    let mut m = Map::new();
    m.insert("verdict".into(), r.verdict.as_str().into());
    m.insert("atoms".into(), atoms.into());
    if let Some(w) = &r.witness {
        m.insert("witness".into(), distribution(w));
    }
    if let Some(c) = &r.certificate {
        m.insert("certificate".into(), certificate(c, verified));
    }
    Value::Object(m)
}

pub fn inequality(r: &InequalityReport) -> Value {
    let named =
        |list: &[(String, Real)]| -> Value { Value::Object(list.iter().map(|(n, v)| (n.clone(), real(v))).collect()) };
    json!({
        "id": r.id.as_str(),
        "verdict": r.verdict.as_str(),
        "slack": real(&r.slack),
        "inputs": named(&r.inputs),
        "bounds": named(&r.bounds),
        "notes": r.notes,
    })
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_fixed_and_signless_at_zero() {
        assert_eq!(float(-0.0), "0.000000000000");
        assert_eq!(float(-1e-14), "0.000000000000");
        assert_eq!(float(1.5), "1.500000000000");
        assert_eq!(float(-0.25), "-0.250000000000");
    }

    #[test]
    fn rationals_render_as_ratios() {
        assert_eq!(rational(&q(2, 4)), "1/2");
        assert_eq!(real(&Real::from_int(3)), "3/1");
    }

    #[test]
    fn irrational_values_carry_polynomial_and_enclosure() {
        let v = Real::cos_degrees(&q(30, 1)).unwrap();
        let r = real(&v);
        assert_eq!(r["poly"], json!(["-3/4", "0/1", "1/1"]));
        let lo = hidvar_core::parse_q(r["interval"][0].as_str().unwrap()).unwrap();
        let hi = hidvar_core::parse_q(r["interval"][1].as_str().unwrap()).unwrap();
        assert!(lo <= hi && &hi - &lo <= q(1, 1_000_000_000_000));
        assert!(&lo * &lo <= q(3, 4) && q(3, 4) <= &hi * &hi);
    }

    #[test]
    fn render_ends_with_newline_and_sorts_keys() {
        let text = render(&json!({"b": 1, "a": 2}));
        assert!(text.ends_with('\n'));
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
    }
}
