mod args;
mod commands;
mod config;

use args::{Cli, Command};
use clap::Parser;
use config::Config;

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on stdout with success
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let config = match Config::load(cli.config.as_deref()) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("ghpd: error: {message}");
            return 2;
        }
    };
    let result = match &cli.command {
        Command::Compute(args) => commands::run_compute(args, &config),
        Command::Simulate(args) => commands::run_simulate(args, &config),
        Command::Classify(args) => commands::run_classify(args, &config),
        Command::Wheel(args) => commands::run_wheel(args, &config),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ghpd: error: {}", e.message);
            e.code
        }
    }
}
