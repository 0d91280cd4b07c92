//! Thin command-line front end.
//!
//! All real work lives in the library (`hardybound::commands`); this file
//! only parses flags, loads the configuration, applies command-line
//! overrides, and maps outcomes onto process exit codes:
//!
//! * `0` — success
//! * `1` — invalid input (bad flags, unreadable or malformed config,
//!   inconsistent settings)
//! * `2` — a numerical budget ran out or the integrand misbehaved
//!   (NaN, broken monotonicity) before a verdict was reached
//! * `3` — the computation finished and the verdict is "divergent"
//!
//! The report's `config_hash` fingerprints the *effective* configuration —
//! file settings plus any `--seed`/`--tol` overrides — so two invocations
//! with equal hashes really did compute the same thing.

use clap::{Parser, Subcommand, ValueEnum};
use hardybound::commands::{self, CommandOutput};
use hardybound::config::{Config, TolerancesConfig};
use hardybound::error::{Error, QuadFailure};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "hardybound",
    version,
    about = "Boundedness constants and operator-norm estimates for weighted Hardy-type integral operators"
)]
struct Cli {
    /// Path to a TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Size of the worker thread pool (default: one per core).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Override the configured random seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Override the configured relative quadrature tolerance.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the boundedness constants for the configured operator.
    Criterion,
    /// Estimate the discretized operator norm and compare it to the constant.
    Norm,
    /// Check the kernel's claimed two-sided decomposition on a grid.
    VerifyClass,
    /// Evaluate the constants across kernels, exponent pairs, and windows.
    Sweep,
    /// Chain two kernels through a middle weight and tabulate the result.
    Compose,
    /// Compute and audit a doubling-level partition of the primitive.
    Partition,
}

fn effective_config(cli: &Cli) -> Result<(Config, String), Error> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| {
            Error::invalid(format!("cannot read config {}: {e}", path.display()))
        })?,
        None => String::new(),
    };
    let mut cfg = Config::from_toml_str(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(tol) = cli.tol {
        let t = cfg.tolerances.get_or_insert(TolerancesConfig {
            rel: None,
            abs: None,
            max_evals: None,
        });
        t.rel = Some(tol);
    }
    // Fingerprint the effective settings rather than the file bytes so the
    // hash also covers command-line overrides.
    let raw = serde_json::to_string(&cfg)
        .map_err(|e| Error::invalid(format!("cannot serialize config: {e}")))?;
    Ok((cfg, raw))
}

fn run(cli: &Cli) -> Result<CommandOutput, Error> {
    let (cfg, raw) = effective_config(cli)?;
    match cli.command {
        Command::Criterion => commands::run_criterion(&cfg, &raw),
        Command::Norm => commands::run_norm(&cfg, &raw),
        Command::VerifyClass => commands::run_verify_class(&cfg, &raw),
        Command::Sweep => commands::run_sweep(&cfg, &raw),
        Command::Compose => commands::run_compose(&cfg, &raw),
        Command::Partition => commands::run_partition(&cfg, &raw),
    }
}

fn emit(cli: &Cli, output: &CommandOutput) -> std::io::Result<()> {
    let body = match cli.format {
        Format::Json => &output.json,
        Format::Csv => &output.csv,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, body),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        // Only fails if a global pool already exists, which cannot happen
        // this early; fall back to the default pool in that case.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run(&cli) {
        Ok(output) => {
            if let Err(e) = emit(&cli, &output) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(u8::try_from(output.exit_code).unwrap_or(1))
        }
        Err(Error::InvalidInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Error::Numerical(f)) => {
            eprintln!("error: {f}");
            match f {
                QuadFailure::Divergent { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
