//! Command implementations behind the `dsurf` binary.

mod commands;
mod output;
mod spec;

use std::path::Path;

use thiserror::Error;

use crate::canon::CanonError;
use crate::family::FamilyError;
use crate::geom::GeomError;

pub use commands::{
    cmd_canonize, cmd_check, cmd_family, cmd_invariants, cmd_mesh, CanonizeArgs, FamilyArgs,
    FamilyOp, InvariantsArgs, MeshArgs,
};
pub use output::{canonical_json, fmt_f64};
pub use spec::{DomainSpec, Loaded, SurfaceSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Validation(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::EmptyDomain
            | GeomError::NotIsothermal { .. }
            | GeomError::NotTimelike { .. }
            | GeomError::NotHolomorphic { .. }
            | GeomError::GridTooSmall { .. }
            | GeomError::NotSymbolic
            | GeomError::Mink(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<CanonError> for CliError {
    fn from(e: CanonError) -> Self {
        match e {
            CanonError::Geom(g) => (*g).into(),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Geom(g) => g.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// What a command produced: lines for stdout and stderr.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Report {
    pub stdout: Vec<String>,
    pub stderr: Vec<String>,
    /// Non-zero when the command ran but its verdict is a failure.
    pub exit_code: i32,
}
