//! Command implementations behind the `crossing` binary.

pub mod args;
pub mod commands;
mod error;
pub mod manifest;
pub mod settings;

use std::io::Write;

pub use args::{Cli, Command};
pub use error::{CliError, Result};

/// Runs one command, writing its normal output to `out`.
pub fn run(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Train(a) => {
            let outcome = commands::cmd_train(a)?;
            write_out(out, &outcome.summary())
        }
        Command::Evaluate(a) => {
            let report = commands::cmd_evaluate(a)?;
            let text = if a.json {
                serde_json::to_string_pretty(&report).map_err(crossing_core::Error::from)?
            } else {
                report.metrics.to_string()
            };
            write_out(out, &text)
        }
        Command::Predict(a) => {
            let csv = commands::prediction_csv(&commands::cmd_predict(a)?);
            match &a.out {
                Some(path) => std::fs::write(path, csv).map_err(|e| CliError::io(path, e)),
                None => out
                    .write_all(csv.as_bytes())
                    .map_err(|e| CliError::io("<stdout>", e)),
            }
        }
        Command::Plot(a) => {
            let kind = commands::cmd_plot(a)?;
            write_out(out, &format!("wrote {} ({kind})", a.out.display()))
        }
        Command::Synth(a) => {
            let paths = commands::cmd_synth(a)?;
            write_out(out, &paths.join("\n"))
        }
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| CliError::io("<stdout>", e))
}
