use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ira_cli::commands::{self, Method};
use ira_cli::{CliError, CliResult, ExperimentConfig};

#[derive(Parser)]
#[command(name = "ira", version, about = "Interpolated data-driven reachability")]
struct Cli {
    /// TOML configuration, or a manifest.json from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for interval interpolation.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Data and instance seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output root; each command writes to a subdirectory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one reachable-set chain.
    Reach {
        #[arg(long, value_enum, default_value = "ira")]
        method: Method,
    },
    /// Runtime and width ratios over ranges of K and Ns.
    Sweep,
    /// Calibrate a predictor and report coverage on fresh instances.
    Calibrate,
    /// Sequential, parallel and surrogate variants against the fine chain.
    Ablation,
    /// Coarse versus fine step-size sensitivity report.
    Sensitivity,
    /// Write training pairs and held-out trajectories for a learned predictor.
    ExportTraining,
    /// Serve the baseline predictor over stdin/stdout.
    ServeBaseline,
}

fn load(cli: &Cli) -> CliResult<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = load(cli)?;
    let dir = match cli.command {
        Command::Reach { method } => commands::cmd_reach(&cfg, method)?,
        Command::Sweep => commands::cmd_sweep(&cfg)?,
        Command::Calibrate => commands::cmd_calibrate(&cfg)?,
        Command::Ablation => commands::cmd_ablation(&cfg)?,
        Command::Sensitivity => commands::cmd_sensitivity(&cfg)?,
        Command::ExportTraining => commands::cmd_export_training(&cfg)?,
        Command::ServeBaseline => return commands::cmd_serve_baseline(&cfg),
    };
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &CliError) -> u8 {
    e.exit_code() as u8
}
