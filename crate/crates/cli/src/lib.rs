//! Command-line front end for `dirac-spectra`.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("boundary conditions are not regular: {0}")]
    NonRegular(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NonRegular(_) => 3,
            CliError::Solver(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<dirac_spectra::Error> for CliError {
    fn from(e: dirac_spectra::Error) -> Self {
        use dirac_spectra::Error::*;
        let msg = e.to_string();
        match e {
            NotReducible | NonRegularSubproblem(_) => CliError::NonRegular(msg),
            KernelDivergence { .. }
            | BoundaryNearZero(_)
            | LocalizationFailure { .. }
            | Pairing(_)
            | NotAnEigenvalue(..)
            | InsufficientData { .. }
            | WeightNotFound { .. } => CliError::Solver(msg),
            _ => CliError::Config(msg),
        }
    }
}
