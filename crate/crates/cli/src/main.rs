use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use fitzlaw_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = std::panic::catch_unwind(|| run(&cli));
    let code = match result {
        Ok(Ok(out)) => {
            eprint!("{}", out.stderr);
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.stdout.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(5);
            }
            0
        }
        Ok(Err(failure)) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
        Err(_) => 5,
    };
    ExitCode::from(code as u8)
}
