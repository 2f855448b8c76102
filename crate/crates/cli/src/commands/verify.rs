//! `--verify`: replays the witnesses and certificates of a saved report.

use std::fmt::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{chi, glue, inspect, search, Recheck};
use crate::document::read_json;
use crate::error::CliError;
use crate::report::{digest, to_value, Output, Report, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyResults {
    pub command: String,
    pub verified: bool,
    pub checks: Vec<Recheck>,
}

pub fn execute(path: &Path) -> Result<Output, CliError> {
    let started = Instant::now();
    let report: Report = read_json(path)?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(CliError::Parse(format!(
            "report schema version {} is not supported (expected {SCHEMA_VERSION})",
            report.schema_version
        )));
    }
    let mut checks = vec![Recheck::new("inputs digest matches", digest(&report.inputs) == report.inputs_digest)];
    let (inputs, results) = (&report.inputs, &report.results);
    checks.extend(match report.command.as_str() {
        "validate" | "limit" => inspect::verify(&report.command, inputs, results)?,
        "chi" => chi::verify(inputs, results)?,
        "glue" => glue::verify_glue(inputs, results)?,
        "lift" => glue::verify_lift_report(inputs, results)?,
        "search" => search::verify(inputs, results)?,
        other => return Err(CliError::Parse(format!("cannot replay a `{other}` report"))),
    });
    let results = VerifyResults {
        command: report.command.clone(),
        verified: checks.iter().all(|c| c.ok),
        checks,
    };
    let mut text = format!(
        "verify {} report: {}\n",
        results.command,
        if results.verified { "VERIFIED" } else { "FAILED" }
    );
    for c in &results.checks {
        writeln!(text, "  [{}] {}", if c.ok { "ok" } else { "FAIL" }, c.name).unwrap();
    }
    let inputs = serde_json::json!({"report_digest": digest(&to_value(&report))});
    Ok(Output {
        report: Report::new("verify", inputs, to_value(&results), started),
        text,
    })
}
