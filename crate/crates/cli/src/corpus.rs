//! Golden corpus: `cases/*.json` problem files, each with an `expect` block,
//! and `golden/<stem>.json` reports they must reproduce byte for byte.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::commands::{self, Command, Settings, STATUS_ERROR};
use crate::error::{CliError, CliResult};
use crate::problem;
use crate::report::{self, ENGINE};

pub const DIR_ENV: &str = "HIDVAR_CORPUS_DIR";

/// `--dir`, then `HIDVAR_CORPUS_DIR`, then the corpus shipped with the crate.
pub fn default_dir() -> PathBuf {
    std::env::var_os(DIR_ENV).map(PathBuf::from).unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseState {
    Pass,
    /// golden rewritten by `--bless`
    Blessed,
    StatusMismatch,
    ReportDrift,
    MissingGolden,
}

impl CaseState {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseState::Pass => "pass",
            CaseState::Blessed => "blessed",
            CaseState::StatusMismatch => "status-mismatch",
            CaseState::ReportDrift => "report-drift",
            CaseState::MissingGolden => "missing-golden",
        }
    }

    pub fn ok(&self) -> bool {
        matches!(self, CaseState::Pass | CaseState::Blessed)
    }
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub name: String,
    pub anchor: Option<String>,
    pub expected_status: i32,
    pub status: i32,
    pub state: CaseState,
}

/// The report for one case; engine errors become a status-2 report.
pub fn evaluate(file: &problem::ProblemFile, cmd: Command, which: Option<String>) -> (i32, String) {
    let settings = Settings { which, ..Settings::default() };
    match commands::execute(cmd, file, &settings) {
        Ok(out) => (out.status, report::render(&out.report)),
        Err(e) => {
            let v = json!({
                "schema": problem::SCHEMA_VERSION,
                "engine": ENGINE,
                "command": cmd.as_str(),
                "input": serde_json::to_value(file).expect("problem files serialize"),
                "status": STATUS_ERROR,
                "error": e.to_string(),
            });
            (STATUS_ERROR, report::render(&v))
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn case_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let cases = dir.join("cases");
    let entries = std::fs::read_dir(&cases).map_err(|source| CliError::Io { path: cases.clone(), source })?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|source| CliError::Io { path: cases.clone(), source })?.path();
        if path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Runs every case; with `bless`, goldens are rewritten instead of compared.
pub fn run(dir: &Path, bless: bool) -> CliResult<Vec<CaseResult>> {
    let golden_dir = dir.join("golden");
    if bless {
        std::fs::create_dir_all(&golden_dir).map_err(|source| CliError::Io { path: golden_dir.clone(), source })?;
    }
    let mut results = Vec::new();
    for path in case_files(dir)? {
        let file = problem::load(&path)?;
        let name = path.file_stem().expect("json file").to_string_lossy().into_owned();
        let expect = file
            .expect
            .clone()
            .ok_or_else(|| CliError::Invalid(format!("{}: corpus cases need an `expect` block", path.display())))?;
        let cmd = Command::parse(&expect.command)?;
        let (status, text) = evaluate(&file, cmd, expect.which.clone());
        let golden = golden_dir.join(format!("{name}.json"));
        let state = if status != expect.status {
            CaseState::StatusMismatch
        } else if bless {
            write(&golden, &text)?;
            CaseState::Blessed
        } else if !golden.exists() {
            CaseState::MissingGolden
        } else if read(&golden)? == text {
            CaseState::Pass
        } else {
            CaseState::ReportDrift
        };
        results.push(CaseResult { name, anchor: file.anchor.clone(), expected_status: expect.status, status, state });
    }
    Ok(results)
}

pub fn summary_json(results: &[CaseResult]) -> Value {
    let passed = results.iter().filter(|r| r.state.ok()).count();
    json!({
        "cases": results.iter().map(|r| json!({
            "name": r.name,
            "anchor": r.anchor,
            "expected_status": r.expected_status,
            "status": r.status,
            "state": r.state.as_str(),
        })).collect::<Vec<_>>(),
        "passed": passed,
        "total": results.len(),
    })
}
