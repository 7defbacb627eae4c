//! `budgetmech`: batch driver for the solvers, families and analyses.
//!
//! Every command writes one output file atomically. Without `--output` the
//! file goes to `$BUDGETMECH_OUT_DIR` (or the working directory) under a
//! fixed name. Failures print `error kind=<tag> msg=<text>` on stderr and
//! exit with a code specific to the tag.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let msg = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("error kind={} msg={msg}", e.kind());
            ExitCode::from(exit_code(e.kind()))
        }
    }
}

/// Distinct nonzero codes per error kind; 2 stays with clap's usage errors.
fn exit_code(kind: &str) -> u8 {
    match kind {
        "parse" => 10,
        "invalid_distribution" => 11,
        "missing_assignment" => 12,
        "invalid_lottery" => 13,
        "invalid_parameter" => 14,
        "malformed_lp" => 15,
        "certificate" => 16,
        "indicator_budget" => 17,
        "enumeration_budget" => 18,
        "dominance" => 19,
        "io" => 20,
        "json" => 21,
        _ => 1,
    }
}
