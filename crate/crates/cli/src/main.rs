use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use cliquetile_cli::{run, write_atomic, Cli, EXIT_ERROR};

fn main() -> ExitCode {
    // Usage errors exit with 1; 2 and 3 are solve verdicts.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
        Err(e) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok((out, path)) => {
            match path {
                Some(p) => {
                    if let Err(e) = write_atomic(&p, &out.text) {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_ERROR as u8);
                    }
                }
                None => {
                    // A closed pipe (e.g. `| head`) is not an error.
                    let _ = writeln!(std::io::stdout().lock(), "{}", out.text);
                }
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
