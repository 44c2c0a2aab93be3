use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use gfk_cli::{run, write_files, Cli, Env};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Env::from_process().and_then(|env| {
        let output = run(&cli, env)?;
        write_files(&output)?;
        Ok(output)
    });
    match result {
        Ok(output) => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = stdout.write_all(output.stdout.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gfk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
