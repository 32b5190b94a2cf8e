use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hidvar_cli::commands::{self, Command, Settings, STATUS_ERROR};
use hidvar_cli::corpus;
use hidvar_cli::error::CliResult;
use hidvar_cli::problem;
use hidvar_cli::report;

/// Exact feasibility checks for joint distributions and hidden-variable models.
#[derive(Parser)]
#[command(name = "hidvar", version)]
struct Cli {
    /// print the full JSON report instead of a summary
    #[arg(long, global = true)]
    json: bool,
    /// largest joint lattice the LP will enumerate
    #[arg(long, global = true)]
    atom_cap: Option<usize>,
    /// tolerance for floating-point eigenvalue checks
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// cross-check decide against the brute-force vertex oracle
    #[arg(long, global = true)]
    oracle: bool,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Input {
    /// problem file (JSON)
    file: PathBuf,
}

#[derive(Subcommand)]
enum Sub {
    /// Decide whether a joint distribution exists
    Decide(Input),
    /// Build and verify a deterministic hidden-variable model
    HiddenVariable(Input),
    /// Evaluate the classical inequalities
    Inequalities {
        #[command(flatten)]
        input: Input,
        /// `all` or a comma-separated list of ids
        #[arg(long, default_value = "all")]
        which: String,
    },
    /// Run the natural command for the file's kind
    Run(Input),
    /// Check the golden corpus
    Corpus {
        /// rewrite golden reports
        #[arg(long)]
        bless: bool,
        /// corpus directory with `cases/` and `golden/`
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn code(status: i32) -> ExitCode {
    ExitCode::from(status.clamp(0, 255) as u8)
}

fn run_problem(cli: &Cli, cmd: Command, input: &Input, which: Option<String>) -> CliResult<i32> {
    let file = problem::load(&input.file)?;
    let settings = Settings { atom_cap: cli.atom_cap, tol: cli.tol, oracle: cli.oracle, which };
    let out = commands::execute(cmd, &file, &settings)?;
    if cli.json {
        print!("{}", report::render(&out.report));
    } else {
        for line in &out.summary {
            println!("{line}");
        }
    }
    Ok(out.status)
}

fn run_corpus(cli: &Cli, bless: bool, dir: Option<PathBuf>) -> CliResult<i32> {
    let dir = dir.unwrap_or_else(corpus::default_dir);
    let results = corpus::run(&dir, bless)?;
    if cli.json {
        print!("{}", report::render(&corpus::summary_json(&results)));
    } else {
        for r in &results {
            let mark = if r.state.ok() { "PASS" } else { "FAIL" };
            println!("{mark} {:<34} status {} (expected {}) {}", r.name, r.status, r.expected_status, r.state.as_str());
        }
        let passed = results.iter().filter(|r| r.state.ok()).count();
        println!("{passed}/{} cases pass", results.len());
    }
    Ok(if results.iter().all(|r| r.state.ok()) { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Sub::Decide(i) => run_problem(&cli, Command::Decide, i, None),
        Sub::HiddenVariable(i) => run_problem(&cli, Command::HiddenVariable, i, None),
        Sub::Inequalities { input, which } => run_problem(&cli, Command::Inequalities, input, Some(which.clone())),
        Sub::Run(i) => run_problem(&cli, Command::Run, i, None),
        Sub::Corpus { bless, dir } => run_corpus(&cli, *bless, dir.clone()),
    };
    match result {
        Ok(status) => code(status),
        Err(e) => {
            eprintln!("error: {e}");
            code(STATUS_ERROR)
        }
    }
}
