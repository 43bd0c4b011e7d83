use std::path::PathBuf;
use std::process::ExitCode;

use catasym::{run_scenario, CliError, Experiment, Overrides, RawConfig, ScenarioConfig};
use clap::Parser;

/// Runs one experiment on a flat cone scenario and writes a JSON report.
///
/// Exit status: 0 when every check passes, 3 when a check fails,
/// 2 for configuration errors and 1 for anything else.
#[derive(Debug, Parser)]
#[command(name = "catasym", version)]
struct Args {
    /// Experiment to run.
    experiment: Experiment,
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Sample mesh, overriding the file.
    #[arg(long)]
    mesh: Option<f64>,
    /// Sampling seed, overriding the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the file.
    #[arg(long)]
    out: Option<PathBuf>,
}

const WORKERS_VAR: &str = "CATASYM_WORKERS";

fn init_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(WORKERS_VAR) else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => {
            return Err(catasym::ConfigError::InvalidValue {
                key: WORKERS_VAR.into(),
                value: raw,
                reason: "expected a positive integer".into(),
            }
            .into())
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Pool(e.to_string()))
}

fn run(args: Args) -> Result<bool, CliError> {
    init_pool()?;
    let raw = RawConfig::load(&args.config)?;
    let over = Overrides {
        mesh: args.mesh,
        seed: args.seed,
        out: args.out,
    };
    let cfg = ScenarioConfig::from_raw(&raw, args.experiment, &over)?;
    let outcome = run_scenario(&cfg)?;
    for c in &outcome.report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            println!("{tag} {}", c.name);
        } else {
            println!("{tag} {} ({})", c.name, c.detail);
        }
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(outcome.report.passed)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
