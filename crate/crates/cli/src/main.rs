mod args;
mod commands;
mod error;
mod report;

use std::process::ExitCode;

use blowup::{make_provider, DomainSpec, GreenProvider64};
use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;
use crate::report::Report;

const THREADS_VAR: &str = "BLOWUP_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot start {n} threads: {e}")))
}

fn load_domain(cli: &Cli) -> Result<DomainSpec, CliError> {
    let path = cli.domain.as_ref().ok_or_else(|| CliError::Validation("--domain is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.clone(), source })?;
    DomainSpec::from_json(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<Option<CliError>, CliError> {
    configure_threads()?;
    let spec = load_domain(cli)?;
    let g: GreenProvider64 = make_provider(&spec)?;
    let outcome = commands::run(&cli.command, &spec, &g, cli.seed, cli.expect)?;
    let report = Report::new(cli, &spec, outcome.output);
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write { path: path.clone(), source })?,
        None => print!("{text}"),
    }
    Ok(outcome.failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let failure = match execute(&cli) {
        Ok(f) => f,
        Err(e) => Some(e),
    };
    match failure {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
