//! `qotto` binary entry point: parse the command line, execute, and map
//! failures to the documented exit codes (see [`qotto::error`]).

use clap::Parser;
use qotto::run;

fn main() {
    let cli = run::Cli::parse();
    if let Err(e) = run::execute(&cli) {
        eprintln!("qotto: {e}");
        std::process::exit(e.exit_code());
    }
}
