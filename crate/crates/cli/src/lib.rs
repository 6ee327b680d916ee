//! Command-line experiment runner.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use neuropde::walk::BackendKind;

pub use commands::{cmd_calibrate, cmd_devices_mc, cmd_solve_1d, cmd_solve_2d, cmd_sweep};
pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "neuropde", version, about = "Random-walk PDE solver on emulated stochastic hardware")]
pub struct Cli {
    /// TOML config; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads, overriding the config.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Walk backend: software, hw-p or hw-pv.
    #[arg(long, global = true)]
    pub backend: Option<BackendKind>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the effective config as TOML and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Steady heat conduction in a wire.
    #[command(name = "solve-1d")]
    Solve1d,
    /// Point-source diffusion on a square.
    #[command(name = "solve-2d")]
    Solve2d,
    /// 2D accuracy over walker counts and backends.
    Sweep,
    /// Weight-noise statistics and an activation history.
    #[command(name = "devices-mc")]
    DevicesMc,
    /// Drive operating point for the target stay probability.
    Calibrate,
}

impl Cli {
    /// Config file plus command-line overrides, validated.
    pub fn effective_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(w) = self.workers {
            cfg.workers = Some(w);
        }
        if let Some(b) = self.backend {
            cfg.backend = b;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn verdict(passed: bool, what: &str) -> Result<(), CliError> {
    if passed {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!("{what} outside tolerance")))
    }
}

/// Runs the parsed command line, printing a summary on stdout.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.effective_config()?;
    if cli.print_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(CliError::Config("no command given (try --help)".into()));
    };
    println!("config_hash={} master_seed={}", cfg.hash(), cfg.master_seed);
    match command {
        Command::Solve1d => {
            let r = cmd_solve_1d(&cfg)?;
            println!("{}", r.summary("solve-1d"));
            verdict(r.passed, "solve-1d max sigma2")
        }
        Command::Solve2d => {
            let r = cmd_solve_2d(&cfg)?;
            println!("{}", r.summary("solve-2d"));
            verdict(r.passed, "solve-2d max sigma2")
        }
        Command::Sweep => {
            let r = cmd_sweep(&cfg)?;
            for row in &r.table.rows {
                println!("sweep w={} backend={} max_sigma2={:e}", row.w, row.backend, row.max_sigma2);
            }
            Ok(())
        }
        Command::DevicesMc => {
            let r = cmd_devices_mc(&cfg)?;
            println!(
                "devices-mc samples={} mean_shift={:.5} variance={:e} history_stay={:.4} {}",
                r.stats.n,
                r.stats.mean_shift,
                r.stats.variance,
                r.pooled_stay,
                if r.passed { "PASS" } else { "FAIL" }
            );
            verdict(r.passed, "weight-noise statistics")
        }
        Command::Calibrate => {
            let r = cmd_calibrate(&cfg)?;
            println!("{}", r.summary());
            verdict(r.passed, "calibration check")
        }
    }
}
