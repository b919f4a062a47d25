use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use orthoqkd::scenario::{execute, load_config, Format};
use orthoqkd::Error;

/// Run an orthoqkd scenario file.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// JSON scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write only this format.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Grid resolution (overrides the config).
    #[arg(long)]
    resolution: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let format = args
        .format
        .map(|f| f.parse::<Format>().expect("clap restricts values"));
    let config = match load_config(&args.config, args.out, format, args.seed, args.resolution) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
    };
    match execute(&config) {
        Ok(outcome) => {
            for line in &outcome.summaries {
                println!("{line}");
            }
            for a in &outcome.artifacts {
                println!("wrote {}", a.path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("config error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
