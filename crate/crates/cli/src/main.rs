use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use t4flow::args::{Cli, Command};
use t4flow::{commands, verify, CliResult};

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Table1(a) => emit(&commands::table1(a)?, a.output.out.as_deref()),
        Command::Scan(a) => emit(&commands::scan(a)?, a.output.out.as_deref()),
        Command::Reduce(a) => emit(&commands::reduce(a)?, a.output.out.as_deref()),
        Command::Euler(a) => emit(&commands::euler(a)?, a.output.out.as_deref()),
        Command::Verify(a) => {
            let (text, status) = verify::report(&verify::run_suite(a.suite));
            emit(&text, a.output.out.as_deref())?;
            status
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("t4flow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
