//! Batch front door for the SLE(κ;ρ̲) toolkit: configuration parsing, the
//! experiment dispatcher, and reproducible artifact plumbing.

pub mod commands;
pub mod config;
pub mod ensemble;
pub mod report;
pub mod svg;

use std::time::Instant;

use anyhow::Result;

use config::{Command, RunConfig};
use report::RunOutcome;

/// Draw a master seed when the config omits one. Entropy quality is
/// irrelevant — the draw happens once and lands in the manifest, after which
/// every rerun is deterministic.
fn draw_seed() -> u64 {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    let mixed = nanos ^ (u64::from(std::process::id()) << 32);
    // splitmix64 finalizer, so adjacent draws differ in many bits
    let mut z = mixed.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Execute a validated config: dispatch the experiment, write its artifacts
/// and manifest, and report the verdict set. The effective config (defaults
/// filled, seed recorded) is what the manifest echoes.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let started = Instant::now();
    let seed = config.mc.seed.unwrap_or_else(draw_seed);
    let mut effective = config.clone();
    effective.mc.seed = Some(seed);

    let output = match effective.command {
        Command::Weights => commands::weights::run(&effective)?,
        Command::Simulate => commands::simulate::run(&effective, seed)?,
        Command::Trace => commands::trace::run(&effective, seed)?,
        Command::Lpp => commands::lpp::run(&effective, seed)?,
        Command::Martingale => commands::martingale::run(&effective, seed)?,
        Command::VirasoroCheck => commands::virasoro_check::run(&effective)?,
        Command::StripCompare => commands::strip_compare::run(&effective, seed)?,
    };

    report::write_artifacts(&effective, seed, &output, started)
}
