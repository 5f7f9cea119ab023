use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use perfoptrl_harness::{emit_csv, emit_json, run, ExperimentConfig, HarnessError, Mode};

/// Run one seeded experiment and write `<mode>.csv` and `<mode>.json`.
#[derive(Debug, Parser)]
#[command(name = "perfoptrl", version)]
struct Args {
    /// retrain, minimax, estimator or lowerbound (overrides the file's `mode`).
    #[arg(long)]
    mode: Option<Mode>,
    /// TOML experiment file; every key is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Run this single seed instead of the configured list.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(args: &Args) -> Result<bool, HarnessError> {
    let mut cfg = match (&args.config, args.mode) {
        (Some(path), mode) => ExperimentConfig::load(path, mode)?,
        (None, Some(mode)) => ExperimentConfig::with_mode(mode),
        (None, None) => {
            return Err(perfoptrl_harness::ConfigError::new(None, "pass --config, --mode or both").into())
        }
    };
    if let Some(seed) = args.seed {
        cfg.seeds = vec![seed];
    }
    let report = run(&cfg)?;
    std::fs::create_dir_all(&args.out)?;
    let name = cfg.mode.name();
    emit_csv(&report, &args.out.join(format!("{name}.csv")))?;
    emit_json(&report, &args.out.join(format!("{name}.json")))?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: built-in checks failed (see the JSON summary)");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
