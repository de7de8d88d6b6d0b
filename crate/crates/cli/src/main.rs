use std::process::ExitCode;

use clap::Parser;
use vecmkit_cli::{execute, parse_config, Command, Overrides};

#[derive(Debug, Parser)]
#[command(name = "vecmkit", version, about = "Cointegration and VECM workflow for quarterly panels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = parse_config(&cli.overrides).and_then(|cfg| execute(&cfg, cli.command));
    match outcome {
        Ok(out) => {
            print!("{}", out.report);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
