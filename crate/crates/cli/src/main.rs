use std::process;

use clap::Parser;

use crate::args::{Cli, Command};

mod args;
mod commands;

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Matrix { family, output } => commands::matrix(family, output),
        Command::Scan { family, window, precision, use_abs, output } => {
            commands::scan_cmd(family, window, precision, *use_abs, output)
        }
        Command::Detcurve { family, window, precision, use_abs, output } => {
            commands::detcurve_cmd(family, window, precision, *use_abs, output)
        }
        Command::Verify { driver } => commands::verify(driver),
        Command::Exppoly { family, indices, positive_alpha, output } => {
            commands::exppoly(family, indices.as_deref(), *positive_alpha, output)
        }
    };
    if let Err(failure) = result {
        eprintln!("hadapow: {failure}");
        process::exit(failure.code);
    }
}
