//! Command-line front end for the `dlpad` library.
//!
//! Every command produces one [`table::Table`] written as CSV (default) or
//! JSON. Exit status: 0 success, 1 validation failure, 2 usage error.

pub mod args;
pub mod commands;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, OutputArgs};
use table::{Format, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] dlpad::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Model(dlpad::Error::Eigensolver(_) | dlpad::Error::ToleranceExceeded { .. }) => 1,
            CliError::Csv(_) | CliError::Json(_) => 1,
            _ => 2,
        }
    }

    /// A closed stdout (`dlpad ... | head`) is not an error.
    fn is_broken_pipe(&self) -> bool {
        match self {
            CliError::Io(e) => e.kind() == io::ErrorKind::BrokenPipe,
            CliError::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe),
            CliError::Json(e) => e.io_error_kind() == Some(io::ErrorKind::BrokenPipe),
            _ => false,
        }
    }
}

/// A finished table and whether its checks passed.
pub struct Report {
    pub table: Table,
    pub passed: bool,
    pub default_format: Format,
}

pub fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Cumulants(a) => commands::cumulants(a),
        Command::Collapse(a) => commands::collapse(a),
        Command::OracleCheck(a) => commands::oracle_check(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::PhiTable(a) => commands::phi_table(a),
    }
}

fn output_args(command: &Command) -> &OutputArgs {
    match command {
        Command::Cumulants(a) => &a.output,
        Command::Collapse(a) => &a.output,
        Command::OracleCheck(a) => &a.output,
        Command::Simulate(a) => &a.output,
        Command::PhiTable(a) => &a.output,
    }
}

fn emit(report: &Report, output: &OutputArgs) -> Result<(), CliError> {
    let format = output.format.unwrap_or(report.default_format);
    match &output.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.table.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            report.table.write(format, &mut w)?;
        }
    }
    Ok(())
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = execute(&cli.command).and_then(|report| {
        emit(&report, output_args(&cli.command))?;
        Ok(report.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("dlpad: validation failed");
            ExitCode::from(1)
        }
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dlpad: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
