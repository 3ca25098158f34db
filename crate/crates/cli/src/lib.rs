//! Command-line front end: argument parsing, reports, batch runs and replay.

pub mod args;
pub mod bench;
pub mod commands;
pub mod error;
pub mod report;
pub mod verify;

use std::io::Write;

use args::{Cli, Command};
use error::{CliError, CliResult};

/// Runs one parsed command, writing its output to stdout.
pub fn run(cli: &Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| dispatch(&cli.command))
    } else {
        dispatch(&cli.command)
    }
}

fn dispatch(command: &Command) -> CliResult<()> {
    let out_err = |e: std::io::Error| CliError::Output(e.to_string());
    match command {
        Command::Solve(a) => {
            let inst = commands::load_instance(&a.source)?;
            let report = commands::solve(&inst, a)?;
            commands::emit_report(&report, a.json, a.output.as_deref())
        }
        Command::Atspp(a) => {
            let inst = commands::load_instance(&a.source)?;
            let report = commands::atspp(&inst, a)?;
            commands::emit_report(&report, a.json, a.output.as_deref())
        }
        Command::Bench(a) => {
            let rows = bench::run(a)?;
            bench::write_csv(&rows, std::io::stdout().lock())
        }
        Command::Verify(a) => {
            let checks = verify::verify(a)?;
            let mut out = std::io::stdout().lock();
            for c in &checks {
                writeln!(out, "{c}").map_err(out_err)?;
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len()).map_err(out_err)?;
            if failed > 0 {
                return Err(CliError::VerifyFailed {
                    failed,
                    total: checks.len(),
                });
            }
            Ok(())
        }
        Command::Gen(a) => {
            let text = commands::gen(a)?;
            std::io::stdout().lock().write_all(text.as_bytes()).map_err(out_err)
        }
    }
}
