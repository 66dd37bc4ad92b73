//! Command-line arguments and dispatch.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::commands::{self, CommandOutput, Options};
use crate::error::AppResult;
use crate::ingest::Scenario;
use crate::run::with_threads;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    /// Hourly simulation with monthly yields.
    Simulate,
    /// Feasible ST-hour window under the energy and crop thresholds.
    Feasibility,
    /// Price-performance of the configured scheme.
    Economics,
    /// Cheapest feasible customized schedule.
    Optimize,
    /// Every cell of the `[sweep]` grid.
    Sweep,
    /// Tariff increase needed for parity over the standard M_L, density, scheme and farm grid.
    Table2,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "agrivolt",
    version,
    about = "Single-axis tracked agrivoltaic simulator and planner"
)]
pub struct Cli {
    pub verb: Verb,
    /// Scenario TOML file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Directory receiving the output files; created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write every simulated timestep (simulate only).
    #[arg(long)]
    pub dump_timesteps: bool,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Runs the command in memory; returns its output without writing anything.
pub fn compute(cli: &Cli) -> AppResult<CommandOutput> {
    let scenario = Scenario::load(&cli.scenario)?;
    let options = Options {
        dump_timesteps: cli.dump_timesteps,
    };
    let verb = match cli.verb {
        Verb::Simulate => commands::simulate,
        Verb::Feasibility => commands::feasibility,
        Verb::Economics => commands::economics,
        Verb::Optimize => commands::optimize,
        Verb::Sweep => commands::sweep,
        Verb::Table2 => commands::table2,
    };
    with_threads(cli.threads, || verb(&scenario, options))?
}

/// Computes, then writes all outputs. Returns the summary and the written paths.
pub fn execute(cli: &Cli) -> AppResult<(String, Vec<PathBuf>)> {
    let out = compute(cli)?;
    let written = out.files.commit(&cli.out)?;
    Ok((out.summary, written))
}
