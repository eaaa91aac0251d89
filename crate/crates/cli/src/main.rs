use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use specasym_cli::{error::EXIT_CONFIG, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error[config] threads: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    match run(&cli) {
        Ok(out) => {
            if cli.report {
                eprint!("{}", out.report);
            }
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}] {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
