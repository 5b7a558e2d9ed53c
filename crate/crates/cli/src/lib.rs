//! Library behind the `spectra` binary.
//!
//! Every subcommand resolves its flags into a [`config::RunConfig`], runs,
//! and renders a report that embeds that config, so `spectra replay` can
//! reproduce any report byte for byte.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::Path;

use args::Action;
use error::{CliError, CliResult, EXIT_FAILURE, EXIT_SUCCESS};

/// Runs a parsed command line and returns the process exit code.
pub fn execute(command: args::CliCommand) -> CliResult<u8> {
    let (cfg, out) = match args::to_action(command)? {
        Action::Run(cfg) => {
            let out = cfg.out.clone();
            (cfg, out)
        }
        Action::Replay { report, out } => {
            let text = std::fs::read_to_string(&report).map_err(|e| CliError::io(&report, e))?;
            let cfg = commands::config_from_report(&text)?;
            (cfg, out.map(|p| p.display().to_string()))
        }
    };
    let rendered = commands::run(&cfg)?;
    output::emit(&rendered.text, out.as_deref().map(Path::new))?;
    Ok(if rendered.passed { EXIT_SUCCESS } else { EXIT_FAILURE })
}
