//! `featex` — corpus pipeline and evaluation CLI.
//!
//! Subcommands: `ingest`, `preprocess`, `split`, `make-train`, `parse-preds`,
//! `eval`, `kappa`, `stats`, `report`. Exit codes: 0 success, 1 validation
//! error, 2 I/O or transport error.

mod commands;

use clap::Parser;

fn main() {
    let cli = commands::Cli::parse();
    match commands::run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(commands::exit_code(&err));
        }
    }
}
