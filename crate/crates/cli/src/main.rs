mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Command, Format, OutputArgs};
use commands::{CliError, Outcome};

fn report_error(err: &CliError) -> ExitCode {
    eprint!(
        "{}",
        String::from_utf8_lossy(&output::to_json(&err.to_json()))
    );
    ExitCode::from(err.exit_code() as u8)
}

fn run(cli: &Cli) -> Result<(Outcome, &OutputArgs), CliError> {
    match &cli.command {
        Command::Construct(a) => Ok((commands::construct(a)?, &a.output)),
        Command::Verify(a) => Ok((commands::verify(a)?, &a.construct.output)),
        Command::Curvature(a) => Ok((commands::curvature(a)?, &a.output)),
        Command::Embed(a) => Ok((commands::embed(a)?, &a.output)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string().trim_end().to_owned();
            return report_error(&CliError::Usage(message));
        }
    };
    let (outcome, out) = match run(&cli) {
        Ok(v) => v,
        Err(e) => return report_error(&e),
    };
    for w in &outcome.warnings {
        eprint!(
            "{}",
            String::from_utf8_lossy(&output::to_json(&json!({ "warning": w })))
        );
    }
    let csv = out.format == Format::Csv;
    if let Err(e) = output::emit(&outcome.document, csv, out.out.as_deref()) {
        let target = out
            .out
            .as_ref()
            .map_or_else(|| "standard output".to_owned(), |p| p.display().to_string());
        return report_error(&CliError::Io(format!("writing {target}: {e}")));
    }
    if outcome.checks_failed {
        ExitCode::from(5)
    } else {
        ExitCode::SUCCESS
    }
}
