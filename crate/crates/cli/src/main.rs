mod commands;
mod config;
mod evaluator;
mod output;

use std::fmt;
use std::process::ExitCode;

use config::{command, Resolved};
use output::RunDir;

/// Invalid flags, config values or identifiers; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn is_usage(err: &anyhow::Error) -> bool {
    if err.downcast_ref::<UsageError>().is_some() {
        return true;
    }
    matches!(
        err.downcast_ref::<mmo_core::Error>(),
        Some(mmo_core::Error::Config(_) | mmo_core::Error::Parameter(_) | mmo_core::Error::DimensionMismatch { .. })
    )
}

#[cfg(feature = "parallel")]
fn configure_threads(roster_len: usize) -> anyhow::Result<()> {
    let threads = match std::env::var("MMO_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| UsageError(format!("MMO_THREADS must be a positive integer, got '{v}'")))?,
        Err(_) => roster_len.max(1),
    };
    // A pool that already exists (e.g. in tests) is left as is.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_roster_len: usize) -> anyhow::Result<()> {
    Ok(())
}

fn run() -> anyhow::Result<()> {
    let matches = command().try_get_matches().unwrap_or_else(|e| e.exit());
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    let mut resolved = Resolved::from_matches(name, sub)?;
    let roster_len = if resolved.has("roster") {
        resolved.raw("roster").split(',').count()
    } else {
        mmo_core::OptimizerKind::ALL.len()
    };
    configure_threads(roster_len)?;
    let dir = RunDir::create(&mut resolved)?;
    match name {
        "bench-single" => commands::bench_single(&resolved, &dir)?,
        "bench-mmo" => commands::bench_mmo(&resolved, &dir)?,
        "ablation" => commands::ablation(&resolved, &dir)?,
        "cross-dim" => commands::cross_dim(&resolved, &dir)?,
        "svm" => commands::svm(&resolved, &dir)?,
        "optimize" => commands::optimize(&resolved, &dir)?,
        other => unreachable!("unhandled subcommand {other}"),
    }
    eprintln!("results written to {}", dir.path().display());
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if is_usage(&err) { EXIT_USAGE } else { EXIT_RUNTIME })
        }
    }
}
