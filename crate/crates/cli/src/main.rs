//! `polyphase` command-line front end.
//!
//! Exit status: 0 on success, 1 for invalid input, 2 when a computation or
//! I/O step fails.  Diagnostics go to standard error; results go to
//! standard output or the `--out` file.

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use polyphase::fock::cache::Precision;

use args::{Cli, Command};
use commands::{Globals, Report, DEFAULT_SEED};
use config::Settings;
use error::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("polyphase: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let settings = Settings::load(cli.global.config.as_deref())?;
    const G: &str = "global";
    let workers: Option<usize> = settings.opt(cli.global.workers, G, "workers")?;
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::Validation("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failure(format!("thread pool: {e}")))?;
    }
    let precision = Precision::from_bits(settings.value(cli.global.precision, G, "precision", 128u32)?)?;
    let globals = Globals {
        cache_dir: settings.opt(cli.global.cache_dir.clone(), G, "cache-dir")?,
        precision,
        seed: settings.value(cli.global.seed, G, "seed", DEFAULT_SEED)?,
    };
    let out: Option<PathBuf> = settings.opt(cli.global.out.clone(), G, "out")?;

    let mut extra = None;
    let report: Report = match &cli.command {
        Command::Synth(a) => commands::synth(a, &settings)?,
        Command::VerifyCircuits(a) => commands::verify_circuits(a, &settings, &globals)?,
        Command::Sweep(a) => {
            let (report, summary) = commands::sweep(a, &settings, &globals)?;
            extra = summary;
            report
        }
        Command::Vacuum(a) => commands::vacuum(a, &settings)?,
        Command::Moments(a) => commands::moments_cmd(a, &settings)?,
        Command::FtBound(a) => commands::ft_bound(a, &settings)?,
        Command::TwirlDensity(a) => commands::twirl_density(a, &settings)?,
        Command::Cache(a) => commands::cache(&a.action, &settings, &globals)?,
    };
    output::emit(out.as_deref(), &report.document)?;
    if let Some((path, bytes)) = extra {
        output::emit(Some(&path), &bytes)?;
    }
    for w in &report.warnings {
        eprintln!("polyphase: warning: {w}");
    }
    Ok(if report.failed { ExitCode::from(2) } else { ExitCode::SUCCESS })
}
