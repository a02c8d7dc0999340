//! `holonomy-lab`: runs the numerical experiments and writes JSON/CSV reports.

mod config;
mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "holonomy-lab", version, about = "Holonomy Laplacian experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Self-duality, Yang–Mills and Bianchi residuals of the field at sample points.
    SelfdualReport(RunArgs),
    /// Laplacian of the holonomy for every configured (curve, W) pair.
    Laplacian(RunArgs),
    /// Closed form against the kernel (and optionally finite-difference) route.
    OracleCheck(RunArgs),
    /// Laplacian over the configured and random curves; left vs right rotations.
    Scan(RunArgs),
    /// The J(r) diagnostic and the pointwise trace recovery.
    LemmaDiagnostics(RunArgs),
    /// Lists built-in charts, fields, curves and experiments.
    ListBuiltins,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Evaluate the configured tolerances; exit with status 2 on failure.
    #[arg(long)]
    accept: bool,
    /// Override a config value, e.g. `--set transport.steps=400`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (default: `output.dir` from the config, else `holonomy-out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn run(name: &str, args: &RunArgs) -> Result<bool> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    let mut cfg = ExperimentConfig::load(&args.config, &args.set)?;
    cfg.experiment = Some(name.to_string());
    let outcome = experiments::run(name, &cfg)?;
    let config_json = serde_json::to_value(&cfg)?;
    let (doc, hash) = report::build_json(name, &config_json, &outcome, args.accept)?;
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("holonomy-out"));
    let csv = (!cfg.output.no_csv).then_some(outcome.csv.as_slice());
    let written = report::write(&dir, name, &doc, hash, csv)?;
    let resolved = dir.join(format!("{name}.config.toml"));
    std::fs::write(&resolved, cfg.to_toml()?).with_context(|| format!("cannot write {}", resolved.display()))?;

    println!("report: {}", written.json.display());
    if let Some(p) = &written.csv {
        println!("table:  {}", p.display());
    }
    println!("config: {}", resolved.display());
    println!("hash:   {}", written.hash);
    if args.accept {
        for c in outcome.checks.iter().filter(|c| !c.passed) {
            eprintln!("FAIL {}: {:e} outside {:?}", c.name, c.value, c.bound);
        }
        println!(
            "accept: {} ({} checks)",
            if outcome.passed() { "PASS" } else { "FAIL" },
            outcome.checks.len()
        );
    }
    Ok(!args.accept || outcome.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (name, args) = match &cli.command {
        Command::ListBuiltins => {
            print!("{}", holonomy_core::builtins::list_builtins());
            return ExitCode::SUCCESS;
        }
        Command::SelfdualReport(a) => ("selfdual-report", a),
        Command::Laplacian(a) => ("laplacian", a),
        Command::OracleCheck(a) => ("oracle-check", a),
        Command::Scan(a) => ("scan", a),
        Command::LemmaDiagnostics(a) => ("lemma-diagnostics", a),
    };
    match run(name, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
