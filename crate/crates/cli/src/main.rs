//! Command-line front end for automated insight discovery.

mod benchmark;
mod config;
mod discover;
mod failure;
mod generate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "insight", version, about = "Search a table for interesting patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search a CSV file and write a report.
    Discover(discover::DiscoverArgs),
    /// Score presets on synthetic datasets with planted patterns.
    Benchmark(benchmark::BenchmarkArgs),
    /// Write a synthetic dataset and its planted-pattern manifest.
    Generate(generate::GenerateArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(failure::USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = std::panic::catch_unwind(|| match cli.command {
        Command::Discover(args) => discover::run(args),
        Command::Benchmark(args) => benchmark::run(args),
        Command::Generate(args) => generate::run(args),
    });
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => failure::report(&e),
        Err(_) => ExitCode::from(failure::INTERNAL),
    }
}
