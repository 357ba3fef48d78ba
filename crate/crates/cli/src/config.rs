//! Run configuration: flags, `LEASHED_*` environment variables and a TOML
//! file, in that order of precedence.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Deserializer};

use leashed::bounds::BoundParams;
use leashed::{Algo, AdversaryConfig, AdversaryKind, Point, StackConfig};

fn parsed<'de, D, T>(d: D) -> Result<Option<T>, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: std::fmt::Display,
{
    Option::<String>::deserialize(d)?
        .map(|s| s.parse().map_err(serde::de::Error::custom))
        .transpose()
}

/// Every setting of a single run. All fields are optional so that layers can
/// be merged; [`RunOptions::resolve`] fills in defaults.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunOptions {
    /// ons_hints, hintless, leashed, leashed_dimfree, fixed_diameter or adagrad_ball
    #[arg(long, env = "LEASHED_ALGO")]
    #[serde(deserialize_with = "parsed")]
    pub algo: Option<Algo>,
    /// e.g. constant, alternating, growing:0.5, spike:100:10, seeded_uniform
    #[arg(long, env = "LEASHED_ADVERSARY")]
    #[serde(deserialize_with = "parsed")]
    pub adversary: Option<AdversaryKind>,
    /// Number of rounds
    #[arg(long = "T", env = "LEASHED_T")]
    #[serde(rename = "T")]
    pub rounds: Option<usize>,
    #[arg(long, env = "LEASHED_DIM")]
    pub dim: Option<usize>,
    /// Barrier scale
    #[arg(long, env = "LEASHED_K")]
    pub k: Option<f64>,
    /// Barrier exponent, in (0, 1]
    #[arg(long, env = "LEASHED_P")]
    pub p: Option<f64>,
    /// Initial wealth (the regret at the origin)
    #[arg(long, env = "LEASHED_EPS")]
    pub eps: Option<f64>,
    /// ONS regularization
    #[arg(long, env = "LEASHED_ALPHA")]
    pub alpha: Option<f64>,
    /// Initial gradient-scale guess
    #[arg(long, env = "LEASHED_G0")]
    pub g0: Option<f64>,
    /// Radius for fixed_diameter
    #[arg(long = "D", env = "LEASHED_D")]
    #[serde(rename = "D")]
    pub diameter: Option<f64>,
    #[arg(long, env = "LEASHED_SEED")]
    pub seed: Option<u64>,
    /// Gradient scale of the adversary
    #[arg(long, env = "LEASHED_SCALE")]
    pub scale: Option<f64>,
    /// `auto`, or points separated by `;` with coordinates separated by `,`
    #[arg(long, env = "LEASHED_COMPARATORS")]
    pub comparators: Option<String>,
    /// Existing directory for the output files
    #[arg(long, env = "LEASHED_OUT")]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($field:ident),*) => {
        RunOptions { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunOptions {
    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: RunOptions) -> RunOptions {
        overlay!(
            self, base, algo, adversary, rounds, dim, k, p, eps, alpha, g0, diameter, seed, scale,
            comparators, out
        )
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let algo = self.algo.unwrap_or(Algo::Leashed);
        let dim = self.dim.unwrap_or(1);
        let rounds = self.rounds.unwrap_or(1000);
        if rounds == 0 {
            bail!("--T must be at least 1");
        }
        if dim == 0 {
            bail!("--dim must be at least 1");
        }
        if algo.scalar_only() && dim != 1 {
            bail!("{algo} is one-dimensional; use --dim 1 or a lifted algorithm");
        }
        let defaults = BoundParams::default();
        let params = BoundParams {
            epsilon: self.eps.unwrap_or(defaults.epsilon),
            alpha: self.alpha.unwrap_or(defaults.alpha),
            k: self.k.unwrap_or(defaults.k),
            p: self.p.unwrap_or(defaults.p),
            g0: self.g0.unwrap_or(defaults.g0),
            q_grid: defaults.q_grid,
        };
        params.validate()?;
        let diameter = self.diameter.unwrap_or(1.0);
        if !(diameter.is_finite() && diameter > 0.0) {
            bail!("--D must be positive, got {diameter}");
        }
        let adversary = AdversaryConfig::new(self.adversary.unwrap_or(AdversaryKind::Constant), dim)
            .scale(self.scale.unwrap_or(1.0))
            .seed(self.seed.unwrap_or(0));
        adversary.validate()?;
        let comparators = Comparators::parse(self.comparators.as_deref().unwrap_or("auto"), dim)?;
        Ok(RunConfig {
            stack: StackConfig {
                algo,
                params,
                diameter,
            },
            adversary,
            rounds,
            comparators,
            out: self.out.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Comparators {
    /// The standard sweep for the run's dimension.
    Auto,
    Explicit(Vec<Point>),
}

impl Comparators {
    pub fn parse(s: &str, dim: usize) -> Result<Self> {
        let s = s.trim();
        if s == "auto" {
            return Ok(Comparators::Auto);
        }
        let mut points = Vec::new();
        for chunk in s.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let coords = chunk
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .with_context(|| format!("bad comparator `{chunk}`"))?;
            if coords.len() != dim {
                bail!("comparator `{chunk}` has {} coordinates, expected {dim}", coords.len());
            }
            points.push(Point::new(coords)?);
        }
        if points.is_empty() {
            bail!("no comparators given");
        }
        Ok(Comparators::Explicit(points))
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub stack: StackConfig,
    pub adversary: AdversaryConfig,
    pub rounds: usize,
    pub comparators: Comparators,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// The output directory, which must already exist.
    pub fn out_dir(&self) -> Result<&Path> {
        let dir = self.out.as_deref().context("no output directory given (--out)")?;
        if !dir.is_dir() {
            bail!("output directory {} does not exist", dir.display());
        }
        Ok(dir)
    }
}

/// Reads a TOML config file, returning the run options and whatever tables
/// remain (the sweep grid lives in `[grid]`).
pub fn read_file(path: &Path) -> Result<(RunOptions, toml::Table)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut table: toml::Table = text
        .parse()
        .with_context(|| format!("parsing {}", path.display()))?;
    let mut rest = toml::Table::new();
    if let Some(grid) = table.remove("grid") {
        rest.insert("grid".into(), grid);
    }
    let options = RunOptions::deserialize(toml::Value::Table(table))
        .with_context(|| format!("in {}", path.display()))?;
    Ok((options, rest))
}
