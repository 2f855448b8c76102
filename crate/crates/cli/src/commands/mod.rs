//! Argument parsing and command dispatch.

mod chi;
mod glue;
mod inspect;
mod search;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pchi::chi::OpenOptions;
use pchi::polytope::DEFAULT_FACE_BUDGET;
use serde::{Deserialize, Serialize};

use crate::document::fraction;
use crate::error::CliError;
use crate::report::{Format, Output};

pub use search::SearchResults;

#[derive(Debug, Parser)]
#[command(name = "pchi", version, about = "Exact checks for limits of finite diagrams and their measure spaces")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    report: Format,
    /// Replay a saved JSON report, re-checking its witnesses and certificates.
    #[arg(long, value_name = "REPORT")]
    verify: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a diagram document and check coherence.
    Validate { diagram: PathBuf },
    /// List the limit and its maximal-coordinate embedding.
    Limit { diagram: PathBuf },
    /// Run surjectivity, openness and affinity checks on the characteristic map.
    Chi(chi::ChiArgs),
    /// Glue a consistent marginal family into a measure on the limit.
    Glue(glue::GlueArgs),
    /// Lift a measure along a morphism of diagrams with prescribed marginals.
    Lift(glue::LiftArgs),
    /// Classify and check pseudo-random diagrams within bounds.
    Search(search::SearchArgs),
}

/// Openness settings shared by `chi` and `search`.
#[derive(Clone, Debug, Args)]
pub struct OpenArgs {
    /// Maximum number of domain faces to certify.
    #[arg(long, default_value_t = DEFAULT_FACE_BUDGET)]
    face_budget: usize,
    /// Sample points for the sampled openness modulus.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Ball radius for the sampled modulus, as a fraction.
    #[arg(long, default_value = "1/1000")]
    radius: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// The resolved form of [`OpenArgs`], as embedded in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenSettings {
    pub face_budget: usize,
    pub samples: usize,
    pub radius: String,
    pub seed: u64,
}

impl OpenArgs {
    fn settings(&self) -> Result<OpenSettings, CliError> {
        let radius = fraction(&self.radius)?;
        if radius <= pchi::rational::zero() {
            return Err(CliError::Parse("--radius must be positive".into()));
        }
        Ok(OpenSettings {
            face_budget: self.face_budget,
            samples: self.samples,
            radius: pchi::rational::format_fraction(&radius),
            seed: self.seed,
        })
    }
}

impl OpenSettings {
    pub fn options(&self) -> Result<OpenOptions, CliError> {
        Ok(OpenOptions {
            face_budget: self.face_budget,
            samples: self.samples,
            radius: fraction(&self.radius)?,
            seed: self.seed,
        })
    }
}

/// Exit code and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Execution { code, stdout, stderr };
        }
    };
    let format = cli.report;
    let (name, result) = dispatch(cli);
    match result {
        Ok(out) => Execution {
            code: exit_code(&out),
            stdout: out.render(format),
            stderr: String::new(),
        },
        Err(e) => {
            let stdout = match format {
                Format::Json => {
                    let doc = serde_json::json!({
                        "schema_version": crate::report::SCHEMA_VERSION,
                        "command": name,
                        "error": {"kind": e.kind(), "message": e.message()},
                    });
                    format!("{}\n", serde_json::to_string_pretty(&doc).expect("JSON values serialize"))
                }
                Format::Text => String::new(),
            };
            Execution {
                code: e.exit_code(),
                stdout,
                stderr: format!("{e}\n"),
            }
        }
    }
}

/// A replay that found a bad witness or certificate is a domain failure.
fn exit_code(out: &Output) -> i32 {
    let failed = out.report.command == "verify" && out.report.results.get("verified") != Some(&serde_json::Value::Bool(true));
    if failed {
        2
    } else {
        0
    }
}

fn dispatch(cli: Cli) -> (&'static str, Result<Output, CliError>) {
    if let Some(path) = cli.verify {
        if cli.command.is_some() {
            return ("verify", Err(CliError::Parse("--verify replays a report and takes no command".into())));
        }
        return ("verify", verify::execute(&path));
    }
    match cli.command {
        None => ("pchi", Err(CliError::Parse("a command or --verify is required; see --help".into()))),
        Some(Command::Validate { diagram }) => ("validate", inspect::validate(&diagram)),
        Some(Command::Limit { diagram }) => ("limit", inspect::limit(&diagram)),
        Some(Command::Chi(args)) => ("chi", chi::execute(&args)),
        Some(Command::Glue(args)) => ("glue", glue::execute_glue(&args)),
        Some(Command::Lift(args)) => ("lift", glue::execute_lift(&args)),
        Some(Command::Search(args)) => ("search", search::execute(&args)),
    }
}

/// One named re-check made by `--verify`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recheck {
    pub name: String,
    pub ok: bool,
}

impl Recheck {
    fn new(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), ok }
    }
}
