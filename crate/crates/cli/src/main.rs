mod args;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use report::Render;

/// Exit code 2 for usage errors, 1 for failed checks or computations.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

fn render<R: Render>(report: &R, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Failure(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Failure(e.to_string());
            w.write_record(report.csv_header()).map_err(io)?;
            for row in report.csv_rows() {
                w.write_record(&row).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Failure(e.to_string()))
        }
        Format::Text => Ok(report.text()),
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let (out, ok) = match &cli.command {
        Command::Tables(a) => (render(&report::tables(a)?, cli.format)?, true),
        Command::Verify(a) => {
            let r = report::verify(a)?;
            (render(&r, cli.format)?, !r.failed())
        }
        Command::Mahler(a) => (render(&report::mahler(a, cli.precision)?, cli.format)?, true),
        Command::Search(a) => (render(&report::search(a), cli.format)?, true),
    };
    match &cli.output {
        Some(path) => {
            std::fs::write(path, out).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(out.as_bytes()).map_err(|e| CliError::Failure(e.to_string()))?;
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
