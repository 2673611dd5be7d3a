use std::process::ExitCode;

use clap::Parser;
use radial_conformal_cli::{run, Cli};

fn main() -> ExitCode {
    // Exit code 2 means a failed check, so usage errors must not use clap's default.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command, &cli.options) {
        Ok(summary) => {
            if !cli.options.quiet {
                println!("{}", summary.line);
            }
            ExitCode::from(summary.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
