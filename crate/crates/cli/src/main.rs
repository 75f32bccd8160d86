use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dnls_cli::{parse_config, run, Subcommand};

/// Spectral Galerkin simulator for the damped driven 2D nonlinear
/// Schrödinger equation.
///
/// Exit codes: 0 all checks passed, 1 a check failed, 2 configuration or
/// i/o error, 3 numerical blow-up.
#[derive(Debug, Parser)]
#[command(name = "dnls", version)]
struct Cli {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for CSV files and summary.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let text = match fs::read_to_string(&cli.config) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let cfg = match parse_config(&text) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(cli.subcommand, &cfg, &cli.out, cli.seed) {
        Ok(summary) => {
            for check in &summary.checks {
                let verdict = if check.pass { "PASS" } else { "FAIL" };
                println!(
                    "{verdict} {}: value {:.6e}, threshold {:.6e}",
                    check.name, check.value, check.threshold
                );
            }
            println!(
                "{}: wrote {} ({:.2}s)",
                summary.subcommand,
                cli.out.display(),
                summary.wall_clock_seconds
            );
            if summary.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
