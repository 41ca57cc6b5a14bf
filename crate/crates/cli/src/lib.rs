//! Command-line front end for the airtime allocator, slot scheduler and
//! group simulator.

pub mod commands;
pub mod error;
pub mod scenario_file;

use std::path::PathBuf;

use airtime_core::sim::{Policy, Scenario};
use clap::{Args, Parser, Subcommand};

pub use commands::Format;
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "airtime", version, about = "Fair airtime allocation for GO-coordinated contact groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Scenario file (TOML).
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    pub scenario: Option<PathBuf>,
    /// Built-in scenario: table1 or dynamic4.
    #[arg(long)]
    pub preset: Option<String>,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Input {
    pub fn load(&self) -> CliResult<Scenario> {
        let mut scenario = match (&self.scenario, &self.preset) {
            (Some(path), _) => scenario_file::load(path)?,
            (None, Some(name)) => scenario_file::preset(name)?,
            (None, None) => return Err(CliError::Schema("give a scenario file or --preset".into())),
        };
        if let Some(seed) = self.seed {
            scenario.seed = seed;
        }
        Ok(scenario)
    }
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse().map_err(|e: airtime_core::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-node upload/broadcast times, rates and utilities for one round.
    Allocate {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "gsa", value_parser = parse_policy)]
        policy: Policy,
        #[arg(long, default_value_t = 0)]
        round: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// The time-slotted schedule of one round.
    Schedule {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "gsa", value_parser = parse_policy)]
        policy: Policy,
        #[arg(long, default_value_t = 0)]
        round: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Runs the full scenario and writes rounds.csv, delivery.csv and metrics.csv.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "gsa", value_parser = parse_policy)]
        policy: Policy,
        /// Output directory, created if missing.
        #[arg(long, default_value = "airtime-out")]
        out: PathBuf,
    },
    /// Mean Nash product of GSA, EQL and WTD over contact durations.
    Compare {
        #[command(flatten)]
        input: Input,
        /// Contact durations in seconds, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2,4,6,8,10,12,14,16,18,20,22,24,26,28,30,32,34,36,38,40")]
        durations: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Mean WPF aggregate against the ideal allocation per basic slot size.
    Sweep {
        #[command(flatten)]
        input: Input,
        /// Basic slot sizes in milliseconds, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "5,10,20,50,100")]
        slot_sizes: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

/// Executes a parsed command and returns what it prints.
pub fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Allocate { input, policy, round, format } => commands::allocate(&input.load()?, *policy, *round, *format),
        Command::Schedule { input, policy, round, format } => commands::schedule(&input.load()?, *policy, *round, *format),
        Command::Simulate { input, policy, out } => commands::simulate(&input.load()?, *policy, out),
        Command::Compare { input, durations, reps, format } => commands::compare(&input.load()?, durations, *reps, *format),
        Command::Sweep { input, slot_sizes, reps, format } => commands::sweep(&input.load()?, slot_sizes, *reps, *format),
    }
}
