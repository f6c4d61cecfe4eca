//! `specmorph` command-line front end.

mod args;
mod catalog;
mod output;
mod spectrum;
mod transform;
mod verify;

use clap::Parser;

use args::{Cli, Command};
use output::{emit, emit_error};

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Catalog { id } => catalog::run(id.as_deref()),
        Command::Transform(a) => transform::run(a),
        Command::Spectrum(a) => spectrum::run(a),
        Command::Verify(a) => verify::run(a, cli.seed),
    };
    match result {
        Ok(out) => {
            emit(&out, cli.format, cli.seed);
            std::process::exit(out.code);
        }
        Err(e) => {
            emit_error(&e, cli.format, cli.seed);
            std::process::exit(e.code);
        }
    }
}
