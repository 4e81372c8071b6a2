use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use fv_cli::acceptance;
use fv_cli::config::{AcceptConfig, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fv", version, about = "Restriction/extension experiments and acceptance suite")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for the numerical kernels.
    #[arg(long, global = true, env = "FV_THREADS")]
    threads: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config's `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    Decay(RunArgs),
    Tails(RunArgs),
    Knapp(RunArgs),
    Smooth(RunArgs),
    Dimension(RunArgs),
    Autoconv(RunArgs),
    Solve(RunArgs),
    Sobolev(RunArgs),
    /// Run the acceptance suite.
    Accept {
        /// Criterion id (1-11) or key.
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(fv_cli::EXIT_FAILED_CHECKS as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(fv_cli::EXIT_ERROR as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<bool> {
    fv_cli::configure_threads(cli.threads)?;
    let (id, config, out) = match cli.command {
        Command::Accept { only, out } => {
            return accept(only, out);
        }
        Command::Decay(a) => ("decay", a.config, a.out),
        Command::Tails(a) => ("tails", a.config, a.out),
        Command::Knapp(a) => ("knapp", a.config, a.out),
        Command::Smooth(a) => ("smooth", a.config, a.out),
        Command::Dimension(a) => ("dimension", a.config, a.out),
        Command::Autoconv(a) => ("autoconv", a.config, a.out),
        Command::Solve(a) => ("solve", a.config, a.out),
        Command::Sobolev(a) => ("sobolev", a.config, a.out),
    };
    let config = ExperimentConfig::load(&config)?;
    if config.id() != id {
        bail!("config describes a '{}' experiment, not '{id}'", config.id());
    }
    let dir = out.or_else(|| config.out_dir().map(Into::into)).unwrap_or_else(|| PathBuf::from("out"));
    let outcome = fv_cli::run(&config)?;
    for c in &outcome.report.checks {
        println!("{} {} = {:.6e}", if c.pass { "pass" } else { "FAIL" }, c.name, c.value);
    }
    let (csv, json) = fv_cli::write_outcome(&dir, &outcome)?;
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(outcome.report.pass)
}

fn accept(only: Option<String>, out: Option<PathBuf>) -> Result<bool> {
    let config = ExperimentConfig::Accept(AcceptConfig { only: only.clone(), out_dir: out.clone() });
    let results = acceptance::run(only.as_deref())?;
    for r in &results {
        println!("{}", r.line());
    }
    let pass = results.iter().all(|r| r.pass);
    println!("{} of {} criteria pass", results.iter().filter(|r| r.pass).count(), results.len());
    if let Some(dir) = out {
        let checks = results
            .iter()
            .map(|r| fv_cli::Check::holds(format!("criterion_{}_{}", r.id, r.key), r.pass))
            .collect();
        let seconds = results.iter().map(|r| r.seconds).sum();
        let report = fv_cli::Report::new("accept", serde_json::to_value(&config)?, checks, Vec::new(), seconds);
        let outcome = fv_cli::Outcome { report, csv: acceptance::summary_csv(&results)? };
        fv_cli::write_outcome(&dir, &outcome)?;
    }
    Ok(pass)
}
