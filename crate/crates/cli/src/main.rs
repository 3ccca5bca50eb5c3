mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use drinfeld_core::Error;

use commands::{Outcome, Overrides};
use input::{Auto, Rational};

/// Exit status: 1 input, 2 rank, 3 precision, 4 residual, 5 failed check.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Core(Error),
    Verification(Vec<String>),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Verification(_) => 5,
            CliError::Core(e) => match e {
                Error::RankInconsistent(_) => 2,
                Error::PrecisionExhausted(_) | Error::NonConvergence(_) => 3,
                Error::ResidualTooLarge(_) => 4,
                _ => 1,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(s) => write!(f, "{s}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Verification(names) => write!(f, "checks failed: {}", names.join(", ")),
        }
    }
}

#[derive(Parser)]
#[command(name = "drinfeld", version, about = "Drinfeld modules over local fields of positive characteristic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input document (JSON or TOML).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Series depth, or `auto`.
    #[arg(long, global = true)]
    depth: Option<Auto<usize>>,
    /// Precision exponent, or `auto`.
    #[arg(long, global = true)]
    prec: Option<Auto<i64>>,
    /// Valuation bound for `uniformize`.
    #[arg(long, global = true)]
    bound: Option<Rational>,
    /// Re-run the invariant checks and include their results.
    #[arg(long, global = true)]
    verify: bool,
    /// Write the JSON report here and print a summary instead.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check good reduction and print the reduction data.
    Validate,
    /// Compute the canonical lift.
    Lift,
    /// Map the lattice generators through χ⁻¹.
    ChiInv,
    /// Inertia structure of the lattice quotient.
    Analyze,
    /// Truncated Tate uniformization.
    Uniformize,
    /// Local Tate-module ranks.
    TateRanks,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| CliError::Parse("--input is required".into()))?;
    let resolved = input::resolve(input::load(path)?)?;
    let o = Overrides {
        depth: cli.depth,
        prec: cli.prec,
        bound: cli.bound.map(|b| b.0),
    };
    match cli.command {
        Command::Validate => commands::validate(&resolved),
        Command::Lift => commands::lift(&resolved, &o, cli.verify),
        Command::ChiInv => commands::chi_inv(&resolved, &o, cli.verify),
        Command::Analyze => commands::analyze(&resolved, &o, cli.verify),
        Command::Uniformize => commands::uniformize(&resolved, &o, cli.verify),
        Command::TateRanks => commands::tate_ranks(&resolved),
    }
}

fn emit(cli: &Cli, outcome: Outcome) -> Result<(), CliError> {
    let mut report = outcome.report;
    let mut failed = Vec::new();
    if let Some(checks) = &outcome.checks {
        failed = checks.iter().filter(|(_, ok)| !**ok).map(|(k, _)| k.clone()).collect();
        if let Value::Object(map) = &mut report {
            map.insert("checks".into(), serde_json::to_value(checks).unwrap());
        }
    }
    let text = serde_json::to_string_pretty(&report).unwrap() + "\n";
    match &cli.json {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display())))?;
            println!("{}", outcome.summary);
            if let Some(checks) = &outcome.checks {
                for (name, ok) in checks {
                    println!("  {name}: {}", if *ok { "pass" } else { "FAIL" });
                }
            }
        }
        None => print!("{text}"),
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("DRINFELD_LOG")).init();
    // clap exits 2 on usage errors, which is taken by rank errors here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli).and_then(|o| emit(&cli, o)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
