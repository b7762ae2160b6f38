//! `freepos`: command-line driver for the k-positivity criteria and the GUE
//! witness experiments.
//!
//! Exit codes: 0 success, 2 configuration error, 3 scientific outcome
//! inconsistent with the regime prediction, 4 numerical failure.

mod commands;
mod config;
mod output;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use freepos::rmt::Seed;

use commands::Params;
use config::{Artifact, ConfigError, Emit, Manifest, RunConfig, SCHEMA_VERSION};
use output::Sink;

const EXIT_CONFIG: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "freepos",
    version,
    about = "Free-probability k-positivity criteria and GUE entanglement experiments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output directory (default: freepos-out; for run/replay, overrides the stored one).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Artifacts to write, comma separated.
    #[arg(
        long,
        global = true,
        value_enum,
        value_delimiter = ',',
        default_value = "csv,json,svg"
    )]
    emit: Vec<Artifact>,
    /// Repeat for more log output on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Cmd {
    #[command(flatten)]
    Experiment(Params),
    /// Runs a configuration file (see schema/config.schema.json).
    Run { config: PathBuf },
    /// Re-runs the configuration stored in a manifest.
    Replay { manifest: PathBuf },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() || cause.is::<serde_json::Error>() || cause.is::<std::io::Error>() {
            return EXIT_CONFIG;
        }
        if let Some(e) = cause.downcast_ref::<freepos::Error>() {
            return match e {
                freepos::Error::NumericalFailure(_) | freepos::Error::ConvergenceFailure(_) => EXIT_NUMERICAL,
                _ => EXIT_CONFIG,
            };
        }
    }
    EXIT_NUMERICAL
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("FREEPOS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ConfigError::other(format!("FREEPOS_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("building the thread pool")?;
    Ok(())
}

fn resolve(cli: Cli) -> Result<RunConfig> {
    match cli.cmd {
        Cmd::Experiment(mut params) => {
            let mut seed = Seed::new(cli.seed);
            if let Params::Witness(p) | Params::Certify(p) = &mut params {
                if let Some(s) = p.resolve()? {
                    seed = s;
                }
            }
            Ok(RunConfig {
                schema_version: SCHEMA_VERSION,
                params,
                seed,
                output_dir: cli.out.unwrap_or_else(|| PathBuf::from("freepos-out")),
                emit: Emit::from_list(&cli.emit),
            })
        }
        Cmd::Run { config } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(out) = cli.out {
                cfg.output_dir = out;
            }
            Ok(cfg)
        }
        Cmd::Replay { manifest } => {
            let mut cfg = Manifest::load(&manifest)?.config;
            if let Some(out) = cli.out {
                cfg.output_dir = out;
            }
            Ok(cfg)
        }
    }
}

fn manifest(cfg: &RunConfig, outputs: &[String]) -> Result<Vec<u8>> {
    let m = Manifest {
        schema_version: SCHEMA_VERSION,
        library_version: freepos::VERSION.to_string(),
        cli_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        config: cfg.clone(),
        outputs: outputs.to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&m)?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn execute(cfg: &RunConfig) -> Result<bool> {
    let mut sink = Sink::new(&cfg.output_dir, &cfg.emit)?;
    // written up front so failed runs can be reproduced too
    std::fs::write(cfg.output_dir.join("manifest.json"), manifest(cfg, &[])?)?;
    log::info!("running {} into {}", cfg.params.name(), cfg.output_dir.display());
    let outcome = cfg.params.execute(cfg.seed, &mut sink)?;
    std::fs::write(cfg.output_dir.join("manifest.json"), manifest(cfg, sink.written())?)?;
    let mut stdout = std::io::stdout().lock();
    let printed = writeln!(stdout, "{}", serde_json::to_string_pretty(&outcome.summary)?);
    // a closed pipe on stdout is not a failure of the run
    if let Err(e) = printed {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(e.into());
        }
    }
    Ok(outcome.consistent)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = init_threads().and_then(|_| resolve(cli)).and_then(|cfg| execute(&cfg));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_INCONSISTENT),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
