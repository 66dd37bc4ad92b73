use std::io::Write;
use std::process::ExitCode;

use agrivolt::cli::{execute, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((summary, written)) => {
            let mut out = std::io::stdout().lock();
            let _ = write!(out, "{summary}");
            for path in written {
                let _ = writeln!(out, "wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("agrivolt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
