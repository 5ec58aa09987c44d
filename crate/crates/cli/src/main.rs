use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use sle_rho::config::{self, Command};

#[derive(Parser)]
#[command(
    name = "sle-rho",
    version,
    about = "SLE(kappa;rho) toolkit: Loewner simulation, CFT observables, and verification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding mc.seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for ensemble runs (default: machine parallelism).
    /// Results are bit-for-bit identical for every thread count.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory, overriding output.directory from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Closed-form CFT quantities for the configured parameters.
    Weights(CommonArgs),
    /// Chordal path ensemble (Euler-Maruyama driving, exact slit advances).
    Simulate(CommonArgs),
    /// Extract the curve of one simulated chordal path.
    Trace(CommonArgs),
    /// Left-passage probability: analytic quadrature vs Monte Carlo.
    Lpp(CommonArgs),
    /// Martingale constancy of the observable F along strip paths.
    Martingale(CommonArgs),
    /// Level-2 null-vector and Kac-determinant verification.
    VirasoroCheck(CommonArgs),
    /// Chordal-vs-strip coordinate consistency under matched increments.
    StripCompare(CommonArgs),
}

impl CliCommand {
    fn split(self) -> (Command, CommonArgs) {
        match self {
            CliCommand::Weights(a) => (Command::Weights, a),
            CliCommand::Simulate(a) => (Command::Simulate, a),
            CliCommand::Trace(a) => (Command::Trace, a),
            CliCommand::Lpp(a) => (Command::Lpp, a),
            CliCommand::Martingale(a) => (Command::Martingale, a),
            CliCommand::VirasoroCheck(a) => (Command::VirasoroCheck, a),
            CliCommand::StripCompare(a) => (Command::StripCompare, a),
        }
    }
}

fn execute(command: Command, args: CommonArgs) -> Result<bool> {
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }

    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let mut config = config::parse_config(&text)
        .with_context(|| format!("parsing config {}", args.config.display()))?;

    // Flags win over the config file, subcommand included: the manifest
    // echoes whatever actually ran.
    config.command = command;
    if let Some(seed) = args.seed {
        config.mc.seed = Some(seed);
    }
    if let Some(out) = args.out {
        config.output.directory = out.to_string_lossy().into_owned();
    }

    let outcome = sle_rho::run(&config)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for v in &outcome.verdicts {
        println!("VERDICT {}: {} — {}", v.name, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!(
        "RESULT: {} (manifest: {})",
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.manifest_path.display()
    );
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = cli.command.split();
    match execute(command, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            // Machine-readable failure report on stderr.
            let report = serde_json::json!({
                "error": format!("{e:#}"),
            });
            eprintln!("{report}");
            ExitCode::from(2)
        }
    }
}
