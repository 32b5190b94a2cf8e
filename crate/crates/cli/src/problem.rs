//! Problem file schema (version 1) and conversion into engine types.
//!
//! Exact values are strings: `"p/q"`, an integer, or a finite decimal. A moment
//! target may also be `{"cos_degrees": "30", "scale": "-1"}`, meaning
//! `scale · cos(30°)`.

use std::collections::BTreeMap;
use std::path::Path;

use hidvar_core::gaussian::{GaussianSpec, PartialCorrelationMatrix};
use hidvar_core::ghz::{GhzConfig, Quadruple};
use hidvar_core::lp::{MomentConstraint, MomentProblem, Relation};
use hidvar_core::probability::{FiniteRandomVariable, JointDistribution, Monomial, NamedFunction};
use hidvar_core::scalar::q_to_f64;
use hidvar_core::{parse_q, Real, Scalar, Q};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: u32,
    pub label: String,
    /// the published result this case reproduces, named by role
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
    #[serde(default, skip_serializing_if = "Options::is_empty")]
    pub options: Options,
    /// corpus expectation; ignored outside the corpus runner
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
    pub problem: ProblemBody,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<bool>,
}

impl Options {
    pub fn is_empty(&self) -> bool {
        *self == Options::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub command: String,
    pub status: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub which: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemBody {
    FiniteMoment(FiniteMomentSpec),
    Distribution(DistributionSpec),
    Ghz(GhzSpec),
    Gaussian(GaussianFileSpec),
    Pushforward(PushforwardSpec),
    Grid(GridSpec),
}

impl ProblemBody {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemBody::FiniteMoment(_) => "finite-moment",
            ProblemBody::Distribution(_) => "distribution",
            ProblemBody::Ghz(_) => "ghz",
            ProblemBody::Gaussian(_) => "gaussian",
            ProblemBody::Pushforward(_) => "pushforward",
            ProblemBody::Grid(_) => "grid",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub support: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueSpec {
    Exact(String),
    Cos(CosSpec),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosSpec {
    pub cos_degrees: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationSpec {
    #[default]
    Eq,
    AtLeast,
    AtMost,
}

fn is_eq(r: &RelationSpec) -> bool {
    *r == RelationSpec::Eq
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    /// variable name -> exponent
    pub moment: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "is_eq")]
    pub relation: RelationSpec,
    pub target: ValueSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteMomentSpec {
    pub variables: Vec<VariableSpec>,
    pub constraints: Vec<ConstraintSpec>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub higher_order: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contexts: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub values: Vec<String>,
    pub p: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub variables: Vec<VariableSpec>,
    pub atoms: Vec<AtomSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contexts: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadrupleSpec {
    /// phases of A, B, C, D as multiples of π/2: `"0"`, `"pi/2"`, `"pi"`, `"3pi/2"`
    pub phases: [String; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GhzSpec {
    /// defaults to the six standard quadruples
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadruples: Option<Vec<QuadrupleSpec>>,
    /// 0-based positions to keep
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keep: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianFileSpec {
    pub names: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub means: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variances: Option<Vec<String>>,
    /// dense symmetric rows; `null` marks an unknown entry
    pub correlations: Vec<Vec<Option<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub name: String,
    /// input variable -> coefficient
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    /// product of the listed inputs
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PushforwardSpec {
    pub variables: Vec<VariableSpec>,
    pub atoms: Vec<AtomSpec>,
    pub functions: Vec<FunctionSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridFamily {
    /// zero-mean ±1 triples: pairwise-triple bound against decide
    PairwiseTriple,
    /// zero-mean ±1 quadruples: four-line CHSH bound against decide
    Chsh,
    /// exchangeable ±1 pairs: symmetric construction against the sign of ρ
    Exchangeable,
    /// complete 3×3 correlation matrices: determinant bound against eigenvalues
    CorrelationTriple,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub family: GridFamily,
    /// grid spacing, the reciprocal of a positive integer
    pub step: String,
}

/// Reads and schema-checks a problem file.
pub fn load(path: &Path) -> CliResult<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    parse(&text, path)
}

pub fn parse(text: &str, path: &Path) -> CliResult<ProblemFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let mut field = e.path().to_string();
        let inner = e.into_inner();
        let mut message = inner.to_string();
        if field == "problem" {
            if let Some((inside, why)) = body_error(text) {
                field = format!("problem.{inside}");
                message = why;
            }
        }
        CliError::Parse { path: path.into(), line: inner.line(), column: inner.column(), field, message }
    })?;
    if file.schema != SCHEMA_VERSION {
        return Err(CliError::Invalid(format!(
            "{}: schema version {} is not supported (expected {SCHEMA_VERSION})",
            path.display(),
            file.schema
        )));
    }
    Ok(file)
}

/// The tagged body is buffered before its variant is chosen, which loses the
/// field path; re-deserialize the chosen variant alone to recover it.
fn body_error(text: &str) -> Option<(String, String)> {
    fn check<T: serde::de::DeserializeOwned>(body: serde_json::Value) -> Option<(String, String)> {
        serde_path_to_error::deserialize::<_, T>(body).err().map(|e| (e.path().to_string(), e.into_inner().to_string()))
    }
    let mut root: serde_json::Value = serde_json::from_str(text).ok()?;
    let mut body = root.get_mut("problem")?.take();
    let kind = body.as_object_mut()?.remove("kind")?;
    match kind.as_str()? {
        "finite-moment" => check::<FiniteMomentSpec>(body),
        "distribution" => check::<DistributionSpec>(body),
        "ghz" => check::<GhzSpec>(body),
        "gaussian" => check::<GaussianFileSpec>(body),
        "pushforward" => check::<PushforwardSpec>(body),
        "grid" => check::<GridSpec>(body),
        _ => None,
    }
}

fn exact(text: &str, field: &str) -> CliResult<Q> {
    parse_q(text).map_err(|e| CliError::Invalid(format!("{field}: {e}")))
}

pub fn value(spec: &ValueSpec, field: &str) -> CliResult<Real> {
    match spec {
        ValueSpec::Exact(s) => Ok(Real::rational(exact(s, field)?)),
        ValueSpec::Cos(c) => {
            let cos = Real::cos_degrees(&exact(&c.cos_degrees, field)?)
                .map_err(|e| CliError::Invalid(format!("{field}: {e}")))?;
            let scale =
                c.scale.as_deref().map(|s| exact(s, field)).transpose()?.unwrap_or_else(|| Q::from_integer(1.into()));
            Ok(Real::rational(scale) * cos)
        }
    }
}

pub fn variables(specs: &[VariableSpec]) -> CliResult<Vec<FiniteRandomVariable>> {
    specs
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let support = v
                .support
                .iter()
                .enumerate()
                .map(|(k, s)| exact(s, &format!("variables[{i}].support[{k}]")))
                .collect::<CliResult<Vec<_>>>()?;
            Ok(FiniteRandomVariable::new(v.name.clone(), support)?)
        })
        .collect()
}

fn relation(r: RelationSpec) -> Relation {
    match r {
        RelationSpec::Eq => Relation::Eq,
        RelationSpec::AtLeast => Relation::AtLeast,
        RelationSpec::AtMost => Relation::AtMost,
    }
}

/// A finite-moment problem over exact algebraic targets, plus its rational
/// form when every target is rational.
pub struct BuiltProblem {
    pub real: MomentProblem<Real>,
    pub rational: Option<MomentProblem>,
}

pub fn moment_problem(spec: &FiniteMomentSpec, label: &str) -> CliResult<BuiltProblem> {
    let vars = variables(&spec.variables)?;
    let mut real = Vec::new();
    let mut rational = Some(Vec::new());
    for (i, c) in spec.constraints.iter().enumerate() {
        let monomial = Monomial::new(c.moment.iter().map(|(n, k)| (n.clone(), *k)))?;
        let target = value(&c.target, &format!("constraints[{i}].target"))?;
        if let (Some(list), Some(t)) = (rational.as_mut(), target.to_rational()) {
            list.push(MomentConstraint { monomial: monomial.clone(), relation: relation(c.relation), target: t });
        } else {
            rational = None;
        }
        real.push(MomentConstraint { monomial, relation: relation(c.relation), target });
    }
    Ok(BuiltProblem {
        real: make(spec.higher_order, vars.clone(), real, label)?,
        rational: rational.map(|cs| make(spec.higher_order, vars, cs, label)).transpose()?,
    })
}

fn make<T: Scalar>(
    higher_order: bool,
    vars: Vec<FiniteRandomVariable>,
    cs: Vec<MomentConstraint<T>>,
    label: &str,
) -> hidvar_core::Result<MomentProblem<T>> {
    if higher_order {
        MomentProblem::higher_order(vars, cs, label)
    } else {
        MomentProblem::new(vars, cs, label)
    }
}

pub fn distribution(vars: &[VariableSpec], atoms: &[AtomSpec]) -> CliResult<JointDistribution> {
    let vars = variables(vars)?;
    let rows = atoms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let values = a
                .values
                .iter()
                .enumerate()
                .map(|(k, s)| exact(s, &format!("atoms[{i}].values[{k}]")))
                .collect::<CliResult<Vec<_>>>()?;
            Ok((values, exact(&a.p, &format!("atoms[{i}].p"))?))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(JointDistribution::from_values(vars, rows)?)
}

fn phase(text: &str, field: &str) -> CliResult<u8> {
    match text.trim() {
        "0" => Ok(0),
        "pi/2" => Ok(1),
        "pi" => Ok(2),
        "3pi/2" => Ok(3),
        other => Err(CliError::Invalid(format!("{field}: phase `{other}` is not one of 0, pi/2, pi, 3pi/2"))),
    }
}

pub fn ghz_config(spec: &GhzSpec) -> CliResult<GhzConfig> {
    let mut cfg = match &spec.quadruples {
        None => GhzConfig::default_config(),
        Some(list) => {
            let quadruples = list
                .iter()
                .enumerate()
                .map(|(i, qs)| {
                    let mut phases = [0u8; 4];
                    for (k, p) in qs.phases.iter().enumerate() {
                        phases[k] = phase(p, &format!("quadruples[{i}].phases[{k}]"))?;
                    }
                    let mut quad = Quadruple::new(phases);
                    if let Some(t) = &qs.target {
                        quad = quad.with_target(exact(t, &format!("quadruples[{i}].target"))?);
                    }
                    quad.variables()?;
                    Ok(quad)
                })
                .collect::<CliResult<Vec<_>>>()?;
            GhzConfig { quadruples }
        }
    };
    if let Some(keep) = &spec.keep {
        if let Some(bad) = keep.iter().find(|&&k| k >= cfg.quadruples.len()) {
            return Err(CliError::Invalid(format!("keep: position {bad} is out of range")));
        }
        cfg = GhzConfig { quadruples: keep.iter().map(|&k| cfg.quadruples[k].clone()).collect() };
    }
    Ok(cfg)
}

/// Correlation rows as exact rationals (`None` for unknown entries).
pub fn exact_correlations(spec: &GaussianFileSpec) -> CliResult<Vec<Vec<Option<Q>>>> {
    spec.correlations
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, e)| e.as_deref().map(|s| exact(s, &format!("correlations[{i}][{j}]"))).transpose())
                .collect()
        })
        .collect()
}

pub fn correlation_matrix(spec: &GaussianFileSpec) -> CliResult<PartialCorrelationMatrix> {
    let rows = exact_correlations(spec)?
        .into_iter()
        .map(|row| row.into_iter().map(|e| e.map(|v| q_to_f64(&v))).collect())
        .collect();
    Ok(PartialCorrelationMatrix::from_rows(rows)?)
}

pub fn gaussian_spec(spec: &GaussianFileSpec) -> CliResult<GaussianSpec> {
    let n = spec.names.len();
    let floats = |list: &Option<Vec<String>>, default: f64, field: &str| -> CliResult<Vec<f64>> {
        match list {
            None => Ok(vec![default; n]),
            Some(v) => v.iter().enumerate().map(|(i, s)| Ok(q_to_f64(&exact(s, &format!("{field}[{i}]"))?))).collect(),
        }
    };
    Ok(GaussianSpec::new(
        spec.names.clone(),
        floats(&spec.means, 0.0, "means")?,
        floats(&spec.variances, 1.0, "variances")?,
        correlation_matrix(spec)?,
    )?)
}

pub fn functions(specs: &[FunctionSpec]) -> CliResult<Vec<NamedFunction>> {
    specs
        .iter()
        .enumerate()
        .map(|(i, f)| match (&f.linear, &f.product) {
            (Some(terms), None) => {
                let terms = terms
                    .iter()
                    .map(|(n, c)| Ok((n.as_str(), exact(c, &format!("functions[{i}].linear.{n}"))?)))
                    .collect::<CliResult<Vec<_>>>()?;
                let constant = match &f.constant {
                    Some(c) => exact(c, &format!("functions[{i}].constant"))?,
                    None => Q::from_integer(0.into()),
                };
                Ok(NamedFunction::linear(&f.name, &terms, constant))
            }
            (None, Some(inputs)) if f.constant.is_none() => {
                let names: Vec<&str> = inputs.iter().map(String::as_str).collect();
                Ok(NamedFunction::custom(&f.name, &names, |a| a.iter().product()))
            }
            _ => Err(CliError::Invalid(format!(
                "functions[{i}]: give exactly one of `linear` (with optional `constant`) or `product`"
            ))),
        })
        .collect()
}

/// The reciprocal of a positive integer, as that integer.
pub fn grid_divisions(step: &str) -> CliResult<i64> {
    let s = exact(step, "step")?;
    let bad = || CliError::Invalid(format!("step: `{step}` must be 1/k for an integer 1 <= k <= 40"));
    if s <= Q::from_integer(0.into()) {
        return Err(bad());
    }
    let inv = s.recip();
    if !inv.is_integer() || inv > Q::from_integer(40.into()) {
        return Err(bad());
    }
    Ok(inv.to_integer().try_into().expect("at most 40"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hidvar_core::q;

    fn file(body: &str) -> CliResult<ProblemFile> {
        parse(&format!(r#"{{"schema": 1, "label": "t", "problem": {body}}}"#), Path::new("t.json"))
    }

    #[test]
    fn step_must_be_a_unit_fraction() {
        assert_eq!(grid_divisions("1/4").unwrap(), 4);
        assert_eq!(grid_divisions("0.5").unwrap(), 2);
        assert_eq!(grid_divisions("1").unwrap(), 1);
        for bad in ["0", "-1/2", "2/3", "1/41", "x"] {
            assert!(grid_divisions(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn cos_target_is_scaled_exactly() {
        let v = value(&ValueSpec::Cos(CosSpec { cos_degrees: "60".into(), scale: Some("-1".into()) }), "t").unwrap();
        assert_eq!(v.to_rational(), Some(q(-1, 2)));
        let r = value(&ValueSpec::Cos(CosSpec { cos_degrees: "30".into(), scale: None }), "t").unwrap();
        assert_eq!(r.clone() * r, Real::rational(q(3, 4)));
    }

    #[test]
    fn rational_targets_build_a_rational_problem() {
        let f = file(
            r#"{"kind": "finite-moment", "variables": [{"name": "X", "support": ["-1", "1"]}],
                "constraints": [{"moment": {"X": 1}, "target": "1/3"}]}"#,
        )
        .unwrap();
        let ProblemBody::FiniteMoment(spec) = &f.problem else { panic!() };
        let built = moment_problem(spec, "t").unwrap();
        assert!(built.rational.is_some());
        assert_eq!(built.real.constraints().len(), 1);
    }

    #[test]
    fn irrational_targets_only_build_the_algebraic_problem() {
        let f = file(
            r#"{"kind": "finite-moment", "variables": [{"name": "X", "support": ["-1", "1"]}],
                "constraints": [{"moment": {"X": 1}, "target": {"cos_degrees": "45"}}]}"#,
        )
        .unwrap();
        let ProblemBody::FiniteMoment(spec) = &f.problem else { panic!() };
        assert!(moment_problem(spec, "t").unwrap().rational.is_none());
    }

    #[test]
    fn unknown_kind_is_rejected() {
        assert!(matches!(file(r#"{"kind": "mystery"}"#), Err(CliError::Parse { .. })));
    }

    #[test]
    fn serialization_round_trips() {
        let f = file(r#"{"kind": "ghz", "keep": [0, 2, 3, 4]}"#).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(parse(&text, Path::new("t.json")).unwrap(), f);
    }

    #[test]
    fn distribution_rows_must_match_supports() {
        let vars = vec![VariableSpec { name: "X".into(), support: vec!["0".into(), "1".into()] }];
        let ok = vec![AtomSpec { values: vec!["1".into()], p: "1".into() }];
        assert!(distribution(&vars, &ok).is_ok());
        let off = vec![AtomSpec { values: vec!["2".into()], p: "1".into() }];
        assert!(distribution(&vars, &off).is_err());
    }
}
