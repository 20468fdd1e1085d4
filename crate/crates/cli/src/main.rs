use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use expcycle_core::Budget;

mod args;
mod commands;
mod render;

use args::{Cli, Command, Format};

#[derive(Debug)]
pub enum CliError {
    Core(expcycle_core::Error),
    Usage(String),
    Io(String),
}

impl From<expcycle_core::Error> for CliError {
    fn from(e: expcycle_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_budget() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) if e.is_budget() => write!(f, "budget exceeded: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut budget = Budget::default();
    if let Some(bytes) = cli.mem_budget {
        budget = budget.with_memory(bytes);
    }
    let default_format = match cli.command {
        Command::Survey(_) => Format::Csv,
        _ => Format::Json,
    };
    let format = cli.format.unwrap_or(default_format);

    let payload = match &cli.command {
        Command::Analyze(a) => commands::analyze(a, &budget),
        Command::Tau(a) => commands::tau(a),
        Command::Nu(a) => commands::nu(a),
        Command::Freq(a) => commands::freq(a, &budget),
        Command::Fixed(a) => commands::fixed(a, &budget),
        Command::Rcount(a) => commands::rcount(a, &budget),
        Command::Sumprod(a) => commands::sumprod(a, &budget),
        Command::Survey(a) => commands::survey(a, &budget),
        Command::Artin(a) => commands::artin(a, &budget),
        Command::Report(a) => commands::report(a, &budget),
    }?;
    let body = payload.render(format)?;

    match &cli.out {
        Some(path) => {
            write_file(path, &body)?;
            for (suffix, contents) in &payload.sidecars {
                let mut name = path.as_os_str().to_owned();
                name.push(suffix);
                write_file(Path::new(&name), contents)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
