mod args;
mod commands;
mod error;
mod figures;
mod output;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn run(cli: &Cli, argv: &[String]) -> CliResult<()> {
    let g = &cli.global;
    if let Some(jobs) = g.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let mut out = g.out.clone();
    let mut verdict = true;
    let report = match &cli.command {
        Command::Fock(a) => commands::fock(a)?,
        Command::Steer(a) => commands::steer(a, g.tol)?,
        Command::Correlators(a) => commands::correlators(a, g.tol)?,
        Command::Threshold(a) => commands::threshold(a, g.tol)?,
        Command::Werner(a) => commands::werner(a)?,
        Command::Hermite(a) => commands::hermite(a)?,
        Command::Figure(a) => {
            out.get_or_insert_with(|| figures::default_path(a.id, g.format));
            figures::figure(a, g.tol)?
        }
        Command::Verify(a) => {
            let (report, ok) = verify::verify(a)?;
            verdict = ok;
            report
        }
    };
    output::emit(&report, g.format, out.as_deref(), argv)?;
    if !verdict {
        return Err(CliError::Verification("a deviation exceeded its tolerance".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(&cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
