//! Command-line front end: parses a [`CommandConfig`], runs one subcommand
//! and writes a canonical JSON report.

pub mod commands;
pub mod config;
pub mod emit;
pub mod error;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use serde_json::{json, Value};

pub use commands::Outcome;
pub use config::{AlgebraSpec, Cli, CommandConfig, RepChoice, Subcommand, Tolerances};
pub use emit::{canonical_json, emit_report};
pub use error::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub fn run_subcommand(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    match cfg.subcommand {
        Subcommand::Cohomology => commands::cohomology::run(cfg),
        Subcommand::Normalize => commands::normalize::run(cfg),
        Subcommand::ConformalCheck => commands::conformal::run(cfg),
        Subcommand::EinsteinSolve => commands::einstein::run(cfg),
        Subcommand::TransformCheck => commands::transform::run(cfg),
        Subcommand::Fixtures => commands::fixtures::run(cfg),
    }
}

/// The configuration as recorded in a report; the output path is left out so
/// that equal runs give equal bytes wherever they are written.
fn recorded_config(cfg: &CommandConfig) -> Value {
    let mut c = cfg.clone();
    c.out = None;
    emit::to_value(&c)
}

/// The report document for a finished run.
pub fn build_report(cfg: &CommandConfig, outcome: &Outcome) -> Value {
    json!({
        "subcommand": cfg.subcommand.name(),
        "suite": outcome.suite,
        "config": recorded_config(cfg),
        "tolerances": outcome.tolerances,
        "summary": outcome.summary,
        "results": outcome.results,
        "pass": outcome.pass(),
    })
}

/// Run a parsed configuration to completion and return the exit code.
pub fn execute(cfg: &CommandConfig) -> i32 {
    let (report, code) = match run_subcommand(cfg) {
        Ok(outcome) => {
            let pass = outcome.pass();
            (build_report(cfg, &outcome), if pass { EXIT_OK } else { EXIT_FAIL })
        }
        Err(e @ (CliError::Usage(_) | CliError::Io { .. })) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
        Err(e) => {
            eprintln!("error: {e}");
            let report = json!({
                "subcommand": cfg.subcommand.name(),
                "config": recorded_config(cfg),
                "error": e.to_string(),
                "results": [],
                "pass": false,
            });
            (report, e.exit_code())
        }
    };
    match emit_report(&report, cfg.out.as_deref()) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match CommandConfig::from_command(cli.command) {
        Ok(cfg) => execute(&cfg),
        Err(e) => {
            eprintln!("error: {e}\n\n{}", Cli::command().render_usage());
            e.exit_code()
        }
    }
}
