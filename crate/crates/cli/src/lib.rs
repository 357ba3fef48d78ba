//! Command-line harness for the `leashed` learners.
//!
//! Every run flag can also be given as a `LEASHED_*` environment variable
//! (for example `LEASHED_T=1000`) or as a key in a TOML file passed with
//! `--config`. Flags beat the environment, which beats the file.

pub mod config;
pub mod run;
pub mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use leashed::verify::{run_suite, Suite, VerifyOptions};
use leashed::AdversaryKind;

use config::{read_file, RunOptions};
use sweep::{Grid, GridFile};

#[derive(Debug, Parser)]
#[command(name = "leashed", version, about = "Parameter-free online learners against adversarial gradient streams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play one stack against one adversary and write trace.csv and summary.json
    Run(RunArgs),
    /// Run the acceptance checks and report measured against required values
    Verify(VerifyArgs),
    /// Play a grid of k, p, adversaries and horizons and write sweep.csv
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML file with run settings; flags and environment override it
    #[arg(long, env = "LEASHED_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub options: RunOptions,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// all, coin, reductions, ball or bounds
    #[arg(default_value = "all")]
    pub suite: Suite,
    /// Widen the bettor's clip range to check that the suite notices
    #[arg(long)]
    pub mutate_clip: bool,
}

/// A non-empty comma-separated list.
#[derive(Debug, Clone)]
pub struct List<T>(pub Vec<T>);

impl<T> FromStr for List<T>
where
    T: FromStr,
    T::Err: std::error::Error + Send + Sync + 'static,
{
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        sweep::parse_list("grid", s).map(List)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML file with run settings and an optional [grid] table
    #[arg(long, env = "LEASHED_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub options: RunOptions,
    /// Comma-separated barrier scales
    #[arg(long, env = "LEASHED_K_GRID")]
    pub k_grid: Option<List<f64>>,
    /// Comma-separated barrier exponents
    #[arg(long, env = "LEASHED_P_GRID")]
    pub p_grid: Option<List<f64>>,
    /// Comma-separated adversary kinds
    #[arg(long, env = "LEASHED_ADVERSARIES")]
    pub adversaries: Option<List<AdversaryKind>>,
    /// Comma-separated horizons
    #[arg(long = "T-grid", env = "LEASHED_T_GRID")]
    pub t_grid: Option<List<usize>>,
}

fn layered(config: Option<&PathBuf>, flags: RunOptions) -> Result<(RunOptions, toml::Table)> {
    match config {
        Some(path) => {
            let (file, rest) = read_file(path)?;
            Ok((flags.over(file), rest))
        }
        None => Ok((flags, toml::Table::new())),
    }
}

fn nonempty<T>(name: &str, values: Vec<T>) -> Result<Vec<T>> {
    anyhow::ensure!(!values.is_empty(), "empty {name} grid");
    Ok(values)
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let (options, _) = layered(args.config.as_ref(), args.options)?;
    let cfg = options.resolve()?;
    let dir = cfg.out_dir()?.to_path_buf();
    let outcome = run::play_config(&cfg)?;
    let summary = run::write_outputs(&dir, &cfg, &outcome)?;
    run::print_summary(&summary);
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let opts = VerifyOptions {
        mutate_clip: args.mutate_clip,
    };
    let reports = run_suite(args.suite, opts);
    for report in &reports {
        println!("{report}");
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", reports.len() - failed, reports.len());
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    let (options, rest) = layered(args.config.as_ref(), args.options)?;
    let file_grid = match rest.get("grid") {
        Some(table) => GridFile::deserialize(table.clone()).context("in [grid]")?,
        None => GridFile::default(),
    };
    let base = options.resolve()?;
    let params = &base.stack.params;
    let file_kinds = file_grid
        .adversary
        .map(|names| {
            names
                .iter()
                .map(|n| n.parse::<AdversaryKind>().context("in [grid] adversary"))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let grid = Grid {
        k: nonempty("k", args.k_grid.map(|l| l.0).or(file_grid.k).unwrap_or(vec![params.k]))?,
        p: nonempty("p", args.p_grid.map(|l| l.0).or(file_grid.p).unwrap_or(vec![params.p]))?,
        adversary: nonempty(
            "adversary",
            args.adversaries.map(|l| l.0).or(file_kinds).unwrap_or(vec![base.adversary.kind]),
        )?,
        rounds: nonempty("T", args.t_grid.map(|l| l.0).or(file_grid.rounds).unwrap_or(vec![base.rounds]))?,
    };
    sweep::sweep(&base, &grid)?;
    Ok(ExitCode::SUCCESS)
}

pub fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}
