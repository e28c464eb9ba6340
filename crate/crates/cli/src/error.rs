// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use kannai_core::Error as CoreError;

/// Process exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_TOLERANCE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{0}")]
    Core(#[from] CoreError),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

/// Precondition failures are usage errors; everything that goes wrong after
/// a valid setup counts as a tolerance failure.
fn core_exit_code(e: &CoreError) -> u8 {
    use CoreError::*;
    match e {
        DegenerateGrid { .. }
        | SizeLimit { .. }
        | UnsupportedGrid(_)
        | NormalizationTooSmall { .. }
        | DegenerateSelector
        | InvalidTime(_)
        | InvalidPrecision(_)
        | MissingParameter(_)
        | InvalidPanel { .. }
        | ShapeError { .. }
        | InvalidPerturbation(_)
        | InvalidOperator(_)
        | SingularSystem
        | NotDissipative(_)
        | NotNormal(_)
        | NoSpectralGap(_)
        | UnsupportedDimension(_)
        | InvalidArgument(_) => EXIT_USAGE,
        NumericalBreakdown(_)
        | QuadratureFailure(_)
        | RootFindingFailure { .. }
        | PlanMismatch(_)
        | DegenerateOutput
        | BoundViolation(_)
        | UnstableMarch { .. }
        | LogDomainError { .. } => EXIT_TOLERANCE,
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
