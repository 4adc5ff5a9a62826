//! `fp-lab`: seeded experiments for best-response learning dynamics.
//!
//! Subcommands:
//! - `run --config <path|preset>`: execute an experiment, writing a trace
//!   CSV and a summary JSON;
//! - `certify --config <path|preset>`: the slack-to-distance sweep (the
//!   config must carry a `certify` block);
//! - `presets`: list built-in experiment presets;
//! - `validate --config <path|preset>`: parse, validate, and print the
//!   canonical config fingerprint.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime abort. The
//! `FP_LAB_OUT` environment variable overrides `--out-dir`.

mod config;
mod error;
mod output;
mod presets;
mod runner;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "fp-lab", version, about = "Seeded simulator for best-response learning dynamics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute an experiment config or preset; writes trace + summary.
    Run(RunArgs),
    /// List built-in experiment presets.
    Presets,
    /// Run the slack-to-distance certification sweep of a config or preset.
    Certify(RunArgs),
    /// Parse and validate a config, printing its canonical fingerprint.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to a config JSON file, or a built-in preset name.
    #[arg(long)]
    config: String,
    /// Override the config's rng seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Artifact directory (the FP_LAB_OUT env var overrides this).
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Suppress progress output.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Path to a config JSON file, or a built-in preset name.
    #[arg(long)]
    config: String,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Presets => {
            for p in presets::all() {
                println!("{:<24} {}", p.name, p.summary);
            }
            Ok(())
        }
        Cmd::Validate(args) => {
            let (name, cfg) = config::load(&args.config)?;
            println!("ok {name} {}", config::fingerprint(&cfg));
            Ok(())
        }
        Cmd::Run(args) => run_command(args, false),
        Cmd::Certify(args) => run_command(args, true),
    }
}

fn run_command(args: RunArgs, require_certify: bool) -> Result<(), CliError> {
    let (name, mut cfg) = config::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if require_certify && cfg.certify.is_none() {
        return Err(CliError::config(
            "certify",
            "the certify subcommand needs a `certify` block in the config",
        ));
    }
    let out_dir = match std::env::var_os("FP_LAB_OUT") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => args.out_dir,
    };
    let artifacts = runner::execute(&name, &cfg, &out_dir)?;
    if !args.quiet {
        let kind = artifacts.summary.get("kind").and_then(|k| k.as_str()).unwrap_or("?");
        println!(
            "{name} [{kind}] seed {} -> {} + {}",
            cfg.seed,
            artifacts.trace_csv.display(),
            artifacts.summary_json.display()
        );
        if let Some(metrics) =
            artifacts.summary.get("final_metrics").and_then(|m| m.as_object())
        {
            for (key, value) in metrics {
                println!("  final {key} = {value}");
            }
        }
    }
    Ok(())
}
