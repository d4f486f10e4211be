mod args;
mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::Cli;
use config::RunConfig;

fn write_output(config: &RunConfig, report: &str) -> Result<()> {
    match &config.output {
        Some(path) => std::fs::write(path, report).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(report.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

async fn run(cli: Cli) -> Result<()> {
    let config = RunConfig::new(&cli.global, &cli.command)?;
    if let Some(report) = commands::run(&config, &cli.command).await? {
        write_output(&config, &report)?;
    }
    Ok(())
}

#[tokio::main]
async fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .init();
    let cli = Cli::parse();
    match run(cli).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
