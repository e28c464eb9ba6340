// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! `kannai` command-line front end.
//!
//! Exit codes: 0 success, 1 tolerance or bound failure, 2 usage error,
//! 3 I/O error.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use commands::Output;
use config::Parsed;
use error::{CliError, CliResult, EXIT_OK, EXIT_TOLERANCE};

/// Writes the CSV to `out` (standard output for `-`) and the summary as
/// `key=value` lines. The summary goes to standard error when the CSV
/// occupies standard output.
fn emit(output: &Output, out: &str) -> CliResult<()> {
    let summary: String = output
        .summary
        .iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect();
    let failures: String = output
        .failures
        .iter()
        .map(|f| format!("failure={f}\n"))
        .collect();
    if out == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(output.csv.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })?;
        eprint!("{summary}{failures}");
    } else {
        let path = Path::new(out);
        std::fs::write(path, &output.csv).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        print!("{summary}");
        eprint!("{failures}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cfg = match config::parse_config(std::env::args_os()) {
        Ok(Parsed::Run(cfg)) => cfg,
        Ok(Parsed::Exit {
            message,
            code,
            to_stderr,
        }) => {
            if to_stderr {
                eprint!("{message}");
            } else {
                print!("{message}");
            }
            return ExitCode::from(code);
        }
        Err(e) => {
            eprintln!("kannai: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let result = commands::dispatch(&cfg).and_then(|output| {
        emit(&output, cfg.get_str("out", "-"))?;
        Ok(output)
    });
    match result {
        Ok(output) if output.failures.is_empty() => ExitCode::from(EXIT_OK),
        Ok(_) => ExitCode::from(EXIT_TOLERANCE),
        Err(e) => {
            eprintln!("kannai: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
