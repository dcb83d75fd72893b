//! Command-line companion to the `knotfield` library: verification sweeps,
//! zero-set certification artifacts, field-line integration, and CSV/JSON/VTK
//! exports of the knot, the domain boundary, and field glyph samples.
//!
//! The binary is `knotfield`; see [`commands`] for the subcommand
//! implementations and [`config`] for the flag grammar. Exit codes follow a
//! fixed contract: 0 when every check passes, 1 when a mathematical check
//! fails, 2 on invalid input or filesystem trouble.
//!
//! Every file writer re-reads what it wrote and compares against the
//! in-memory values, so a successful run certifies its own artifacts.

pub mod checks;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod fieldline;
pub mod report;
pub mod vtk;

use std::path::{Path, PathBuf};
use thiserror::Error;

/// Failures surfaced by the command layer, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration — exit code 2.
    #[error("{0}")]
    Config(String),
    /// Filesystem failure with the offending path — exit code 2.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A written file failed its re-read consistency check — exit code 1.
    #[error("round-trip mismatch in {path}: {detail}")]
    RoundTrip { path: PathBuf, detail: String },
}

impl CliError {
    /// Exit code for this failure per the 0/1/2 contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::RoundTrip { .. } => 1,
        }
    }

    /// Wraps an I/O error with its path.
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
