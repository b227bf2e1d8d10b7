use std::time::{SystemTime, UNIX_EPOCH};

use blowup::DomainSpec;
use serde::Serialize;
use serde_json::Value;

use crate::args::Cli;

/// Bumped whenever `schema/report.schema.json` changes shape.
pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Serialize)]
pub struct Inputs<'a> {
    pub domain_file: String,
    pub domain: &'a DomainSpec,
    pub arguments: &'a Cli,
}

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub schema_version: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub inputs: Inputs<'a>,
    pub output: Value,
    /// Seconds since the Unix epoch; the only field that differs between identical runs.
    pub timestamp: u64,
}

impl<'a> Report<'a> {
    pub fn new(cli: &'a Cli, domain: &'a DomainSpec, output: Value) -> Self {
        let domain_file = cli.domain.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        Self {
            schema_version: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION"),
            command: cli.command.name(),
            seed: cli.seed,
            inputs: Inputs { domain_file, domain, arguments: cli },
            output,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }
}
