use std::collections::BTreeMap;

use hidvar_core::gaussian::{
    complete_correlations, det_inequality_3var, eigenvalue_feasible, gaussian_hidden_variable_note, EigenReport,
    GaussianVerdict, PartialCorrelationMatrix, DEFAULT_TOL,
};
use hidvar_core::ghz::{
    build_ghz_problem, minimal_infeasible_subsets, replay_proof_chain, single_drop_table, ReplayReport, StepStatus,
};
use hidvar_core::hidden_variable::{
    construct_deterministic, verify_factorization, verify_noncontextuality, Context, FactorizationOrder,
    HiddenVariableModel,
};
use hidvar_core::inequality::{
    eval_bell_original, eval_chsh, eval_generalized_lower, eval_pairwise_triple, eval_spin1_strengthened, ChshMode,
    InequalityId, InequalityReport,
};
use hidvar_core::lp::{
    brute_force_oracle, decide_with, verify_certificate, DecideOptions, FeasibilityResult, MomentProblem, Verdict,
    DEFAULT_ATOM_CAP,
};
use hidvar_core::probability::lemmas::LemmaOutcome;
use hidvar_core::probability::{
    correlation, default_width, pushforward, Correlation, FiniteRandomVariable, JointDistribution, Monomial,
};
use hidvar_core::scalar::exact_sqrt;
use hidvar_core::{fmt_q, qi, Real, Scalar, Q};
use num::Signed;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::problem::{self, FiniteMomentSpec, GaussianFileSpec, ProblemBody, ProblemFile};
use crate::report::{self, ENGINE};

pub const STATUS_OK: i32 = 0;
pub const STATUS_NEGATIVE: i32 = 1;
pub const STATUS_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Decide,
    HiddenVariable,
    Inequalities,
    /// the natural command for the file's kind
    Run,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Decide => "decide",
            Command::HiddenVariable => "hidden-variable",
            Command::Inequalities => "inequalities",
            Command::Run => "run",
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        match text {
            "decide" => Ok(Command::Decide),
            "hidden-variable" => Ok(Command::HiddenVariable),
            "inequalities" => Ok(Command::Inequalities),
            "run" => Ok(Command::Run),
            other => Err(CliError::Invalid(format!("unknown command `{other}`"))),
        }
    }
}

/// Command-line overrides; unset fields fall back to the file's options.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub atom_cap: Option<usize>,
    pub tol: Option<f64>,
    pub oracle: bool,
    /// `all` or a comma-separated list of inequality ids
    pub which: Option<String>,
}

struct Effective {
    atom_cap: usize,
    tol: f64,
    oracle: bool,
    which: String,
}

pub struct Outcome {
    pub status: i32,
    pub report: Value,
    pub summary: Vec<String>,
}

struct Part {
    module: &'static str,
    status: i32,
    result: Value,
    summary: Vec<String>,
}

fn status_of(v: Verdict) -> i32 {
    match v {
        Verdict::Feasible => STATUS_OK,
        Verdict::Infeasible => STATUS_NEGATIVE,
    }
}

fn wrong_kind(cmd: Command, kind: &str) -> CliError {
    CliError::Invalid(format!("`{}` does not accept {kind} problems", cmd.as_str()))
}

/// Runs `cmd` on a parsed problem file and assembles the report.
pub fn execute(cmd: Command, file: &ProblemFile, settings: &Settings) -> CliResult<Outcome> {
    let tol = settings.tol.or(file.options.tol).unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Invalid(format!("tolerance {tol} must be finite and non-negative")));
    }
    let eff = Effective {
        atom_cap: settings.atom_cap.or(file.options.atom_cap).unwrap_or(DEFAULT_ATOM_CAP),
        tol,
        oracle: settings.oracle || file.options.oracle.unwrap_or(false),
        which: settings.which.clone().unwrap_or_else(|| "all".into()),
    };
    let label = file.label.as_str();
    let part = match (cmd, &file.problem) {
        (Command::Decide | Command::Run, ProblemBody::FiniteMoment(s)) => decide_finite(s, label, &eff)?,
        (Command::Decide | Command::Run, ProblemBody::Ghz(s)) => decide_ghz(s, &eff)?,
        (Command::Decide | Command::Run, ProblemBody::Gaussian(s)) => decide_gaussian(s, &eff)?,
        (Command::Decide | Command::Run, ProblemBody::Grid(s)) => {
            let (status, result, summary) = crate::grid::run(s)?;
            Part { module: "inequality_suite", status, result, summary }
        }
        (Command::Run, ProblemBody::Pushforward(s)) => {
            let dist = problem::distribution(&s.variables, &s.atoms)?;
            let out = pushforward(&dist, &problem::functions(&s.functions)?)?;
            let summary = out
                .iter()
                .map(|(a, p)| {
                    let vals: Vec<String> = a.values(out.variables()).map(fmt_q).collect();
                    format!("P({}) = {}", vals.join(", "), fmt_q(p))
                })
                .collect();
            Part {
                module: "probability_core",
                status: STATUS_OK,
                result: json!({ "output": report::distribution(&out) }),
                summary,
            }
        }
        (Command::HiddenVariable | Command::Run, ProblemBody::Distribution(s)) => {
            let dist = problem::distribution(&s.variables, &s.atoms)?;
            model_part(&dist, s.contexts.as_deref(), Map::new())?
        }
        (Command::HiddenVariable, ProblemBody::FiniteMoment(s)) => hidden_finite(s, label, &eff)?,
        (Command::HiddenVariable, ProblemBody::Ghz(s)) => hidden_ghz(s, &eff)?,
        (Command::HiddenVariable, ProblemBody::Gaussian(s)) => hidden_gaussian(s, &eff)?,
        (Command::Inequalities, body) => inequalities(body, label, &eff)?,
        (cmd, body) => return Err(wrong_kind(cmd, body.kind())),
    };
    let report = json!({
        "schema": problem::SCHEMA_VERSION,
        "engine": ENGINE,
        "command": cmd.as_str(),
        "module": part.module,
        "input": serde_json::to_value(file).expect("problem files serialize"),
        "status": part.status,
        "result": part.result,
    });
    Ok(Outcome { status: part.status, report, summary: part.summary })
}

fn feasibility_summary<T: Scalar>(label: &str, r: &FeasibilityResult<T>, verified: bool) -> Vec<String> {
    let detail = match (&r.witness, &r.certificate) {
        (Some(w), _) => format!("witness on {} atoms", w.support_len()),
        (_, Some(_)) if verified => "certificate verified".to_string(),
        _ => "certificate failed verification".to_string(),
    };
    vec![format!("{label}: {} ({detail})", r.verdict.as_str())]
}

fn solve<T: Scalar + Into<Real>>(
    p: &MomentProblem<T>,
    eff: &Effective,
) -> CliResult<(FeasibilityResult<T>, Value, bool)> {
    let r = decide_with(p, &DecideOptions { atom_cap: eff.atom_cap })?;
    let verified = match &r.certificate {
        Some(c) => verify_certificate(p, c)?,
        None => false,
    };
    let value = report::feasibility(&r, p.atom_count().to_string(), verified);
    Ok((r, value, verified))
}

fn with_oracle(p: &MomentProblem, r: &FeasibilityResult, value: &mut Value) -> CliResult<()> {
    let o = brute_force_oracle(p)?;
    if o.verdict != r.verdict {
        return Err(CliError::Invalid(format!(
            "decide says {} but the brute-force oracle says {}",
            r.verdict.as_str(),
            o.verdict.as_str()
        )));
    }
    value["oracle"] = json!({ "verdict": o.verdict.as_str(), "agrees": true });
    Ok(())
}

fn decide_finite(spec: &FiniteMomentSpec, label: &str, eff: &Effective) -> CliResult<Part> {
    let built = problem::moment_problem(spec, label)?;
    let (status, result, summary) = match &built.rational {
        Some(p) => {
            let (r, mut value, verified) = solve(p, eff)?;
            if eff.oracle {
                with_oracle(p, &r, &mut value)?;
            }
            (status_of(r.verdict), value, feasibility_summary(label, &r, verified))
        }
        None => {
            if eff.oracle {
                return Err(CliError::Invalid("the brute-force oracle needs rational targets".into()));
            }
            let (r, value, verified) = solve(&built.real, eff)?;
            (status_of(r.verdict), value, feasibility_summary(label, &r, verified))
        }
    };
    Ok(Part { module: "feasibility_lp", status, result, summary })
}

fn decide_ghz(spec: &problem::GhzSpec, eff: &Effective) -> CliResult<Part> {
    let cfg = problem::ghz_config(spec)?;
    let p = build_ghz_problem(&cfg)?;
    let (r, mut value, verified) = solve(&p, eff)?;
    if eff.oracle {
        return Err(CliError::Invalid(
            "the brute-force oracle is not run on GHZ systems; the certificate is verified instead".into(),
        ));
    }
    value["constraints"] = cfg.quadruples.iter().map(|q| Value::String(q.to_string())).collect();
    let mut summary = feasibility_summary("GHZ", &r, verified);
    if cfg.quadruples.len() <= 16 {
        let minimal = minimal_infeasible_subsets(&cfg)?;
        summary.push(format!("minimal infeasible subsets (0-based): {minimal:?}"));
        value["minimal_infeasible_subsets"] = json!(minimal);
        value["single_drops"] =
            single_drop_table(&cfg)?.into_iter().map(|(k, v)| json!({ "dropped": k, "verdict": v.as_str() })).collect();
    }
    if let Some(w) = &r.witness {
        value["replay"] = replay_json(&replay_proof_chain(w)?);
    }
    Ok(Part { module: "ghz", status: status_of(r.verdict), result: value, summary })
}

fn replay_json(r: &ReplayReport) -> Value {
    let opt = |v: &Option<Q>| v.as_ref().map_or(Value::Null, report::rational);
    json!({
        "signs": r.signs,
        "constraints": r.constraints.iter().map(|(q, holds)| json!({ "quadruple": q.to_string(), "holds": holds })).collect::<Vec<_>>(),
        "steps": r.steps.iter().map(|s| {
            let (status, reason) = match &s.status {
                StepStatus::Holds => ("holds", None),
                StepStatus::Fails => ("fails", None),
                StepStatus::Vacuous { reason } => ("vacuous", Some(reason.clone())),
            };
            let lemma = s.lemma.as_ref().map(|(n, out)| {
                let outcome = match out {
                    LemmaOutcome::Holds => "holds",
                    LemmaOutcome::Vacuous { .. } => "vacuous",
                    LemmaOutcome::Violated { .. } => "violated",
                };
                json!({ "rule": n, "outcome": outcome })
            });
            json!({
                "number": s.number,
                "statement": s.statement,
                "requires": s.requires,
                "value": opt(&s.value),
                "status": status,
                "reason": reason,
                "rule": lemma,
            })
        }).collect::<Vec<_>>(),
        "first_break": r.first_break,
        "conflict": [opt(&r.conflict.0), opt(&r.conflict.1)],
    })
}

fn eigen_json(e: &EigenReport) -> Value {
    json!({
        "verdict": e.verdict.as_str(),
        "boundary": e.boundary,
        "min_eigenvalue": report::float(e.min_eigenvalue),
        "eigenvalues": e.eigenvalues.iter().map(|v| report::float(*v)).collect::<Vec<_>>(),
        "residual_bound": report::float(e.residual_bound),
        "tol": format!("{:e}", e.tol),
    })
}

fn rows_json(m: &PartialCorrelationMatrix) -> Value {
    m.rows().iter().map(|r| r.iter().map(|e| e.map_or(Value::Null, report::float)).collect::<Vec<_>>()).collect()
}

fn decide_gaussian(spec: &GaussianFileSpec, eff: &Effective) -> CliResult<Part> {
    let corr = problem::correlation_matrix(spec)?;
    let mut result = Map::new();
    let verdict = if corr.is_complete() {
        let e = eigenvalue_feasible(&corr, eff.tol)?;
        result.insert("eigen".into(), eigen_json(&e));
        if corr.dimension() == 3 {
            let exact = problem::exact_correlations(spec)?;
            let at = |i: usize, j: usize| exact[i][j].clone().expect("complete");
            let det = det_inequality_3var(&at(0, 1), &at(0, 2), &at(1, 2))?;
            result.insert("determinant".into(), report::inequality(&det));
        }
        e.verdict
    } else {
        let c = complete_correlations(&corr, eff.tol)?;
        result.insert(
            "completion".into(),
            json!({
                "method": c.method.as_str(),
                "values": c.values.iter().map(|((i, j), v)| json!({ "entry": [i, j], "value": report::float(*v) })).collect::<Vec<_>>(),
                "interval": c.interval.map(|(lo, hi)| json!([report::float(lo), report::float(hi)])),
                "min_eigenvalue": report::float(c.min_eigenvalue),
                "completed": c.completion.as_ref().map(rows_json),
            }),
        );
        match &c.completion {
            Some(done) => {
                let e = eigenvalue_feasible(done, eff.tol)?;
                result.insert("eigen".into(), eigen_json(&e));
                e.verdict
            }
            None => GaussianVerdict::Infeasible,
        }
    };
    result.insert("verdict".into(), verdict.as_str().into());
    let status = if verdict == GaussianVerdict::Feasible { STATUS_OK } else { STATUS_NEGATIVE };
    let boundary = result.get("eigen").and_then(|e| e["boundary"].as_bool()).unwrap_or(false);
    let summary = vec![format!(
        "joint Gaussian for {}: {}{}",
        spec.names.join(", "),
        verdict.as_str(),
        if boundary { " (boundary)" } else { "" }
    )];
    Ok(Part { module: "gaussian", status, result: Value::Object(result), summary })
}

fn contexts_for(vars: &[FiniteRandomVariable], declared: Option<&[Vec<String>]>) -> Vec<Context> {
    match declared {
        Some(list) => list.iter().map(|vs| Context { label: vs.join(","), variables: vs.clone() }).collect(),
        None => vars.iter().map(|v| Context { label: v.name().into(), variables: vec![v.name().into()] }).collect(),
    }
}

fn model_json(m: &HiddenVariableModel) -> Value {
    json!({
        "variables": m.variables().iter().map(|v| v.name()).collect::<Vec<_>>(),
        "points": m.points().iter().map(|p| json!({
            "label": p.label,
            "p": report::rational(&p.probability),
            "conditional": p.conditional.iter().map(|(a, w)| json!({
                "values": a.values(m.variables()).map(report::rational).collect::<Vec<_>>(),
                "p": report::rational(w),
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "deterministic": m.is_deterministic(),
    })
}

/// Builds the deterministic model for `dist` and runs every verification.
fn model_part(
    dist: &JointDistribution,
    contexts: Option<&[Vec<String>]>,
    mut extra: Map<String, Value>,
) -> CliResult<Part> {
    let m = construct_deterministic(dist)?;
    let mut all = true;
    let mut fact = Map::new();
    for (name, order) in [
        ("first", FactorizationOrder::First),
        ("second", FactorizationOrder::Second),
        ("full", FactorizationOrder::Full),
    ] {
        let r = verify_factorization(&m, order)?;
        all &= r.holds;
        fact.insert(
            name.into(),
            json!({ "holds": r.holds, "worst_discrepancy": report::rational(&r.worst_discrepancy), "worst_point": r.worst_point }),
        );
    }
    let contexts = contexts_for(dist.variables(), contexts);
    let noncontextual = verify_noncontextuality(&m, &contexts)?;
    let recomposed = m.recompose()? == *dist;
    all &= noncontextual && recomposed;
    extra.insert("model".into(), model_json(&m));
    extra.insert("factorization".into(), Value::Object(fact));
    extra.insert(
        "noncontextuality".into(),
        json!({ "contexts": contexts.iter().map(|c| c.label.clone()).collect::<Vec<_>>(), "holds": noncontextual }),
    );
    extra.insert("recomposition_exact".into(), recomposed.into());
    let summary = vec![format!(
        "deterministic hidden variable with {} points; factorization, noncontextuality and recomposition {}",
        m.points().len(),
        if all { "all hold" } else { "NOT all hold" }
    )];
    Ok(Part {
        module: "hidden_variable",
        status: if all { STATUS_OK } else { STATUS_NEGATIVE },
        result: Value::Object(extra),
        summary,
    })
}

fn infeasible_part<T: Scalar>(
    module: &'static str,
    label: &str,
    r: &FeasibilityResult<T>,
    value: Value,
    verified: bool,
) -> Part {
    Part {
        module,
        status: STATUS_NEGATIVE,
        result: json!({ "decide": value }),
        summary: feasibility_summary(label, r, verified),
    }
}

fn hidden_finite(spec: &FiniteMomentSpec, label: &str, eff: &Effective) -> CliResult<Part> {
    let built = problem::moment_problem(spec, label)?;
    let p = built
        .rational
        .ok_or_else(|| CliError::Invalid("a hidden-variable model needs rational moment targets".into()))?;
    let (r, value, verified) = solve(&p, eff)?;
    match &r.witness {
        None => Ok(infeasible_part("hidden_variable", label, &r, value, verified)),
        Some(w) => {
            let mut extra = Map::new();
            extra.insert("decide".into(), value);
            model_part(w, spec.contexts.as_deref(), extra)
        }
    }
}

fn hidden_ghz(spec: &problem::GhzSpec, eff: &Effective) -> CliResult<Part> {
    let cfg = problem::ghz_config(spec)?;
    let p = build_ghz_problem(&cfg)?;
    let (r, value, verified) = solve(&p, eff)?;
    match &r.witness {
        None => Ok(infeasible_part("hidden_variable", "GHZ", &r, value, verified)),
        Some(w) => {
            let mut extra = Map::new();
            extra.insert("decide".into(), value);
            extra.insert("replay".into(), replay_json(&replay_proof_chain(w)?));
            model_part(w, None, extra)
        }
    }
}

fn hidden_gaussian(spec: &GaussianFileSpec, eff: &Effective) -> CliResult<Part> {
    let g = problem::gaussian_spec(spec)?;
    let c = complete_correlations(&g.correlations, eff.tol)?;
    if c.completion.is_none() {
        return Ok(Part {
            module: "gaussian",
            status: STATUS_NEGATIVE,
            result: json!({ "verdict": "infeasible", "min_eigenvalue": report::float(c.min_eigenvalue) }),
            summary: vec![format!("no joint Gaussian: best smallest eigenvalue {:.3e}", c.min_eigenvalue)],
        });
    }
    let note = gaussian_hidden_variable_note(&g, eff.tol)?;
    Ok(Part {
        module: "gaussian",
        status: STATUS_OK,
        result: json!({
            "verdict": "feasible",
            "statement": note.statement,
            "completed": rows_json(&note.completed),
            "min_eigenvalue": report::float(note.min_eigenvalue),
            "completion_method": note.completion_method.as_str(),
        }),
        summary: vec![note.statement],
    })
}

/// Exact moments available to the inequality evaluators.
enum Moments {
    Table { vars: Vec<FiniteRandomVariable>, table: BTreeMap<Monomial, Real>, problem: problem::BuiltProblem },
    Dist(JointDistribution),
}

impl Moments {
    fn vars(&self) -> &[FiniteRandomVariable] {
        match self {
            Moments::Table { vars, .. } => vars,
            Moments::Dist(d) => d.variables(),
        }
    }

    /// `E(Π v^k)`; exponents of `±1` variables reduce mod 2.
    fn get(&self, exps: &[(&str, u32)]) -> Option<Real> {
        let mut reduced: BTreeMap<String, u32> = BTreeMap::new();
        for (n, k) in exps {
            let var = self.vars().iter().find(|v| v.name() == *n)?;
            let k = if var.support() == [qi(-1), qi(1)] { k % 2 } else { *k };
            if k > 0 {
                *reduced.entry(n.to_string()).or_insert(0) += k;
            }
        }
        if reduced.is_empty() {
            return Some(Real::from_int(1));
        }
        let m = Monomial::new(reduced).ok()?;
        match self {
            Moments::Table { table, .. } => table.get(&m).cloned(),
            Moments::Dist(d) => d.expectation(&m).ok().map(Real::rational),
        }
    }
}

fn moment_name(exps: &[(&str, u32)]) -> String {
    let parts: Vec<String> =
        exps.iter().map(|(n, k)| if *k == 1 { n.to_string() } else { format!("{n}^{k}") }).collect();
    format!("E({})", parts.join("·"))
}

fn need(m: &Moments, exps: &[(&str, u32)]) -> Result<Real, String> {
    m.get(exps).ok_or_else(|| format!("missing moment {}", moment_name(exps)))
}

fn applicable(id: InequalityId, m: &Moments) -> Result<InequalityReport, String> {
    let names: Vec<&str> = m.vars().iter().map(|v| v.name()).collect();
    let want = match id {
        InequalityId::Chsh | InequalityId::Spin1Strengthened => 4,
        _ => 3,
    };
    if names.len() != want {
        return Err(format!("needs exactly {want} variables, the problem has {}", names.len()));
    }
    let pair = |i: usize, j: usize| need(m, &[(names[i], 1), (names[j], 1)]);
    let run = |r: hidvar_core::Result<InequalityReport>| r.map_err(|e| e.to_string());
    match id {
        InequalityId::PairwiseTriple => run(eval_pairwise_triple(pair(0, 1)?, pair(1, 2)?, pair(0, 2)?)),
        InequalityId::BellOriginal => run(eval_bell_original(pair(0, 1)?, pair(1, 2)?, pair(0, 2)?)),
        InequalityId::GeneralizedLower => {
            let mean = |i: usize| need(m, &[(names[i], 1)]);
            run(eval_generalized_lower(pair(0, 1)?, pair(1, 2)?, pair(0, 2)?, mean(0)?, mean(1)?, mean(2)?))
        }
        InequalityId::Chsh => {
            let pm1 = m.vars().iter().all(|v| v.support() == [qi(-1), qi(1)]);
            let mode = if pm1 {
                ChshMode::Normalized
            } else {
                let j = m.vars().iter().flat_map(|v| v.support()).map(|x| x.abs()).max().expect("non-empty supports");
                ChshMode::Raw { j }
            };
            run(eval_chsh(pair(0, 2)?, pair(0, 3)?, pair(1, 2)?, pair(1, 3)?, &mode))
        }
        InequalityId::Spin1Strengthened => {
            run(eval_spin1_strengthened(pair(0, 2)?, pair(0, 3)?, pair(1, 2)?, pair(1, 3)?))
        }
        InequalityId::CorrelationTriple => {
            let rho = |i: usize, j: usize| -> Result<Q, String> {
                let exact = |r: Real| r.to_rational().ok_or_else(|| "irrational moments".to_string());
                let mi = exact(need(m, &[(names[i], 1)])?)?;
                let mj = exact(need(m, &[(names[j], 1)])?)?;
                let vi = exact(need(m, &[(names[i], 2)])?)? - &mi * &mi;
                let vj = exact(need(m, &[(names[j], 2)])?)? - &mj * &mj;
                let cov = exact(pair(i, j)?)? - &mi * &mj;
                if vi <= qi(0) || vj <= qi(0) {
                    return Err("a variance is zero".into());
                }
                let sd = exact_sqrt(&(vi * vj)).ok_or_else(|| "correlation is irrational".to_string())?;
                Ok(cov / sd)
            };
            run(det_inequality_3var(&rho(0, 1)?, &rho(0, 2)?, &rho(1, 2)?))
        }
    }
}

fn requested(which: &str) -> CliResult<(Vec<InequalityId>, bool)> {
    if which.trim() == "all" {
        return Ok((InequalityId::ALL.to_vec(), false));
    }
    let ids = which.split(',').map(|s| InequalityId::parse(s.trim())).collect::<hidvar_core::Result<Vec<_>>>()?;
    Ok((ids, true))
}

fn inequalities(body: &ProblemBody, label: &str, eff: &Effective) -> CliResult<Part> {
    let (ids, explicit) = requested(&eff.which)?;
    if let ProblemBody::Gaussian(spec) = body {
        return gaussian_inequalities(spec, &ids, explicit);
    }
    let moments = match body {
        ProblemBody::FiniteMoment(spec) => {
            let problem = problem::moment_problem(spec, label)?;
            let vars = problem.real.variables().to_vec();
            let table = problem
                .real
                .constraints()
                .iter()
                .filter(|c| c.relation == hidvar_core::lp::Relation::Eq)
                .map(|c| (c.monomial.clone(), c.target.clone()))
                .collect();
            Moments::Table { vars, table, problem }
        }
        ProblemBody::Distribution(spec) => Moments::Dist(problem::distribution(&spec.variables, &spec.atoms)?),
        other => return Err(wrong_kind(Command::Inequalities, other.kind())),
    };

    // the independent route: does a joint distribution exist at all?
    let feasible: Option<bool> = match &moments {
        Moments::Dist(_) => Some(true),
        Moments::Table { problem, .. } => {
            let options = DecideOptions { atom_cap: eff.atom_cap };
            let r = match &problem.rational {
                Some(p) => decide_with(p, &options).map(|r| r.is_feasible()),
                None => decide_with(&problem.real, &options).map(|r| r.is_feasible()),
            };
            match r {
                Ok(v) => Some(v),
                Err(hidvar_core::Error::AtomCapExceeded { .. }) => None,
                Err(e) => return Err(e.into()),
            }
        }
    };

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut summary = Vec::new();
    let mut any_violated = false;
    for id in ids {
        match applicable(id, &moments) {
            Ok(r) => {
                any_violated |= !r.is_satisfied();
                let mut row = report::inequality(&r);
                if let Some(f) = feasible {
                    row["agrees_with_decide"] = (r.is_satisfied() == f).into();
                }
                summary.push(format!("{}: {} (slack {})", id.as_str(), r.verdict.as_str(), r.slack));
                rows.push(row);
            }
            Err(reason) if explicit => {
                return Err(CliError::Invalid(format!("inequality `{}`: {reason}", id.as_str())));
            }
            Err(reason) => skipped.push(json!({ "id": id.as_str(), "reason": reason })),
        }
    }
    let decide_verdict = match feasible {
        Some(true) => "feasible",
        Some(false) => "infeasible",
        None => "skipped (atom cap)",
    };
    summary.push(format!("joint distribution: {decide_verdict}"));
    let mut result = json!({ "rows": rows, "skipped": skipped, "decide": decide_verdict });
    if let Moments::Dist(d) = &moments {
        result["statistics"] = statistics(d)?;
    }
    Ok(Part {
        module: "inequality_suite",
        status: if any_violated { STATUS_NEGATIVE } else { STATUS_OK },
        result,
        summary,
    })
}

/// Means, variances, covariances and correlations of a given distribution.
fn statistics(d: &JointDistribution) -> CliResult<Value> {
    let names: Vec<&str> = d.variables().iter().map(|v| v.name()).collect();
    let mut means = Map::new();
    let mut variances = Map::new();
    for n in &names {
        means.insert(n.to_string(), report::rational(&d.expectation(&Monomial::new([(*n, 1)])?)?));
        variances.insert(n.to_string(), report::rational(&d.variance(n)?));
    }
    let mut pairs = Vec::new();
    for (i, x) in names.iter().enumerate() {
        for y in &names[i + 1..] {
            let rho = match correlation(d, x, y)? {
                Correlation::Defined(v) => v.to_real().map_or_else(
                    || {
                        let iv = v.enclose(&default_width());
                        json!({ "interval": [report::rational(&iv.lo), report::rational(&iv.hi)] })
                    },
                    |r| report::real(&r),
                ),
                Correlation::Undefined { reason } => json!({ "undefined": reason }),
            };
            pairs.push(json!({
                "pair": [x, y],
                "product_moment": report::rational(&d.expectation(&Monomial::product(&[x, y])?)?),
                "covariance": report::rational(&d.covariance(x, y)?),
                "correlation": rho,
            }));
        }
    }
    Ok(json!({ "means": means, "variances": variances, "pairs": pairs }))
}

fn gaussian_inequalities(spec: &GaussianFileSpec, ids: &[InequalityId], explicit: bool) -> CliResult<Part> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut summary = Vec::new();
    let mut any_violated = false;
    let exact = problem::exact_correlations(spec)?;
    for &id in ids {
        let reason = if id != InequalityId::CorrelationTriple {
            Some("applies to finite-valued problems".to_string())
        } else if exact.len() != 3 || exact.iter().flatten().any(Option::is_none) {
            Some("needs a complete 3×3 correlation matrix".to_string())
        } else {
            None
        };
        match reason {
            Some(r) if explicit => return Err(CliError::Invalid(format!("inequality `{}`: {r}", id.as_str()))),
            Some(r) => skipped.push(json!({ "id": id.as_str(), "reason": r })),
            None => {
                let at = |i: usize, j: usize| exact[i][j].clone().expect("complete");
                let r = det_inequality_3var(&at(0, 1), &at(0, 2), &at(1, 2))?;
                let e = eigenvalue_feasible(&problem::correlation_matrix(spec)?, DEFAULT_TOL)?;
                any_violated |= !r.is_satisfied();
                let mut row = report::inequality(&r);
                if !e.boundary {
                    row["agrees_with_eigenvalues"] =
                        (r.is_satisfied() == (e.verdict == GaussianVerdict::Feasible)).into();
                }
                summary.push(format!("{}: {} (slack {})", id.as_str(), r.verdict.as_str(), r.slack));
                rows.push(row);
            }
        }
    }
    let result = json!({ "rows": rows, "skipped": skipped });
    Ok(Part {
        module: "inequality_suite",
        status: if any_violated { STATUS_NEGATIVE } else { STATUS_OK },
        result,
        summary,
    })
}
