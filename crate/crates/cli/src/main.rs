use std::process::ExitCode;

use dynframe_cli::{parse_config, run, CliError};

fn main() -> ExitCode {
    let result = parse_config(std::env::args_os()).and_then(|cfg| run(&cfg).map(|_| ()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Usage(_)) => {
            // help and version go to stdout with status 0
            let code = e.exit_code();
            if let CliError::Usage(inner) = e {
                let _ = inner.print();
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
