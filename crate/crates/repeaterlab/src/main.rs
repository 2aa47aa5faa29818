use clap::Parser;
use repeaterlab::cli::{execute, resolve, Cli, SEED_ENV};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    match resolve(&cli, env_seed.as_deref()).and_then(|cfg| execute(&cfg)) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
