//! `rqsl` command-line front end.
//!
//! Exit codes: 0 pass, 2 bound violated, 3 regime inapplicable, 4 invalid physical
//! parameter, 5 every branch precluded, 64 usage error, 70 numerical failure,
//! 74 output error.

pub mod args;
pub mod commands;
pub mod config;
pub mod table;

use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::error::ErrorKind;
use clap::Parser;
use rqsl_core::Error;

pub use args::{Cli, OutputFormat};
pub use config::RunConfig;
pub use table::{Cell, Table};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATED: i32 = 2;
pub const EXIT_REGIME: i32 = 3;
pub const EXIT_PHYSICAL: i32 = 4;
pub const EXIT_ALL_PRECLUDED: i32 = 5;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NUMERICAL: i32 = 70;
pub const EXIT_OUTPUT: i32 = 74;

/// A command that could not produce its result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn physical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PHYSICAL,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::AllPrecluded { .. } => EXIT_ALL_PRECLUDED,
            Error::InvalidConfig(_) => EXIT_USAGE,
            Error::ConvergenceFailure { .. }
            | Error::DepthExceeded { .. }
            | Error::OrthogonalOverlap { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidPartition(_) => EXIT_NUMERICAL,
            _ => EXIT_PHYSICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// A result table plus the exit code it implies. A table may accompany a failing
/// code (e.g. the detector bounds are still reported when `t_meas` is undefined).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub code: i32,
    /// Human-readable lines for stderr.
    pub notes: Vec<String>,
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
        }
    };
    let cfg = match RunConfig::resolve(&cli.global) {
        Ok(cfg) => cfg,
        Err(f) => {
            eprintln!("error: {f}");
            return f.code;
        }
    };
    let outcome = match commands::execute(&cli.command, &cfg) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {f}");
            return f.code;
        }
    };
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    let written = match &cli.global.output {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            outcome.table.write(cfg.output_format, &mut w)?;
            w.flush()
        }),
        None => outcome.table.write(cfg.output_format, io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_OUTPUT;
    }
    outcome.code
}
