use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lrp_ids::cli::{self, Command, ExperimentConfig};

/// Integrated density of states experiments on long-range percolation graphs.
#[derive(Parser)]
#[command(name = "lrp-ids", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML experiment configuration.
    #[arg(long, short)]
    config: PathBuf,
    /// Overrides `output.directory`.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let result = ExperimentConfig::load(&args.config).and_then(|c| cli::run(&c, args.command, args.output.as_deref()));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", cli::error_json(&e));
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
