//! Library side of the `hdk` command-line tool.
//!
//! Each subcommand reads JSON inputs, runs the matching `hdk_core` pipeline
//! and writes a JSON report that embeds a [`RunManifest`].

pub mod args;
mod commands;
pub mod manifest;
mod output;
pub mod svg;

use std::process::ExitCode;

pub use args::{Cli, Command};
pub use manifest::RunManifest;

use hdk_core::ErrorKind;

/// Eval found files without a partner in the other directory.
#[derive(Debug)]
pub struct Unmatched(pub Vec<String>);

impl std::fmt::Display for Unmatched {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unmatched files: {}", self.0.join(", "))
    }
}

impl std::error::Error for Unmatched {}

/// Input rejected before any geometry ran; always exits with status 2.
#[derive(Debug)]
pub struct InvalidInput(pub String);

impl std::fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidInput {}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    commands::run(cli)
}

/// 0 success, 2 input or format, 3 geometry, 4 optimization.
pub fn exit_code(err: &anyhow::Error) -> ExitCode {
    if err
        .chain()
        .any(|e| e.is::<InvalidInput>() || e.is::<Unmatched>())
    {
        return ExitCode::from(2);
    }
    let kind = err
        .chain()
        .find_map(|e| e.downcast_ref::<hdk_core::Error>())
        .map(hdk_core::Error::kind);
    match kind {
        Some(ErrorKind::Geometry) => ExitCode::from(3),
        Some(ErrorKind::Optimization) => ExitCode::from(4),
        Some(ErrorKind::Input) | None => ExitCode::from(2),
    }
}

/// Sizes the global rayon pool from `HDK_THREADS` when set.
pub fn init_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("HDK_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| anyhow::anyhow!("HDK_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global()?;
    Ok(())
}
