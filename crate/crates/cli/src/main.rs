//! `sturm-res`: resonance computations for half-line Sturm-Liouville problems.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::Serialize;
use sturm_resonance::AnalyticPotential;

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(name = "sturm-res", version, about = "Jost functions, resonance-free regions and resonances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Scaling angle, overriding the config.
    #[arg(long, global = true)]
    phi: Option<f64>,
    /// Boundary-condition angle, overriding the config.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Accuracy target, overriding the config.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Also write outputs with z divided by |c|.
    #[arg(long, global = true)]
    normalize_c: bool,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Command {
    /// Evaluate the boundary function on a grid of z.
    Jost,
    /// Boundary of the resonance-free region and the sector certificate.
    Region,
    /// Search boxes for resonances and polish seeds.
    Resonance,
    /// Follow a resonance as the strength parameter varies.
    Track,
    /// Spectral density and its concentration points.
    Spectral,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Jost => "jost",
            Command::Region => "region",
            Command::Resonance => "resonance",
            Command::Track => "track",
            Command::Spectral => "spectral",
        }
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'static str,
    version: &'static str,
    timestamp_unix: u64,
    potential: &'a AnalyticPotential,
    alpha: f64,
    phi: f64,
    #[serde(rename = "R")]
    r: f64,
    tol: f64,
    normalize_c: bool,
    config: &'a RunConfig,
    exit_code: u8,
    issues: &'a [String],
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config <file> is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg: RunConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if let Some(phi) = cli.phi {
        cfg.scaling.phi = phi;
    }
    if let Some(alpha) = cli.alpha {
        cfg.alpha = alpha;
    }
    if let Some(tol) = cli.tol {
        cfg.tol = tol;
    }
    cfg.normalize_c |= cli.normalize_c;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.potential.validate().map_err(|e| CliError::Config(e.to_string()))?;
    if !(0.0..std::f64::consts::PI).contains(&cfg.alpha) {
        return Err(CliError::Config(format!("alpha = {} is outside [0, pi)", cfg.alpha)));
    }
    if !(cfg.tol > 0.0 && cfg.tol < 1.0) {
        return Err(CliError::Config(format!("tol = {} must lie in (0, 1)", cfg.tol)));
    }
    Ok(())
}

fn write_metadata(dir: &Path, cmd: Command, cfg: &RunConfig, exit_code: u8, issues: &[String]) -> Result<(), CliError> {
    let meta = Metadata {
        command: cmd.name(),
        version: env!("CARGO_PKG_VERSION"),
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        potential: &cfg.potential,
        alpha: cfg.alpha,
        phi: cfg.scaling.phi,
        r: cfg.scaling.r,
        tol: cfg.tol,
        normalize_c: cfg.normalize_c,
        config: cfg,
        exit_code,
        issues,
    };
    let text = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Io(e.into()))?;
    std::fs::write(dir.join("metadata.json"), text + "\n")?;
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = load(cli)?;
    std::fs::create_dir_all(&cli.out)?;
    let result = match cli.command {
        Command::Jost => commands::jost(&cfg, &cli.out),
        Command::Region => commands::region(&cfg, &cli.out),
        Command::Resonance => commands::resonance(&cfg, &cli.out),
        Command::Track => commands::track(&cfg, &cli.out),
        Command::Spectral => commands::spectral(&cfg, &cli.out),
    };
    let (code, issues) = match result {
        Ok(issues) if issues.is_empty() => (0, issues),
        Ok(issues) => (3, issues),
        Err(CliError::Numerical(msg)) => (3, vec![msg]),
        Err(e) => return Err(e),
    };
    for msg in &issues {
        eprintln!("warning: {msg}");
    }
    write_metadata(&cli.out, cli.command, &cfg, code, &issues)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("sturm-res: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
