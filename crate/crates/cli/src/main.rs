use std::io::Write;
use std::process::ExitCode;

use qpair_cli::{emit, execute, parse_request, CliError, Parsed};

fn run() -> Result<u8, CliError> {
    let request = match parse_request(std::env::args_os())? {
        Parsed::Request(r) => r,
        Parsed::Info(text) => {
            print!("{text}");
            return Ok(0);
        }
    };
    let outcome = execute(&request)?;
    let bytes = emit(&outcome.envelope, request.output)?;
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(&bytes)
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::Internal(format!("writing output: {e}")))?;
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
