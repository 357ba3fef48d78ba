//! Cross-product sweeps over `k`, `p`, adversary and horizon.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Deserialize;

use leashed::oracle::loglog_slope;
use leashed::AdversaryKind;

use crate::config::RunConfig;
use crate::run::{play_config, real, rows, write_outputs};

pub const SWEEP_HEADER: [&str; 8] = ["k", "p", "adversary", "T", "comparator", "regret", "bound", "ratio"];

/// The `[grid]` table of a config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridFile {
    pub k: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub adversary: Option<Vec<String>>,
    #[serde(rename = "T")]
    pub rounds: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub k: Vec<f64>,
    pub p: Vec<f64>,
    pub adversary: Vec<AdversaryKind>,
    pub rounds: Vec<usize>,
}

impl Grid {
    pub fn cells(&self) -> usize {
        self.k.len() * self.p.len() * self.adversary.len() * self.rounds.len()
    }
}

/// Splits a comma-separated flag value. An empty list is an error.
pub fn parse_list<T>(name: &str, s: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr,
    T::Err: std::error::Error + Send + Sync + 'static,
{
    let items = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().with_context(|| format!("bad value `{x}` in {name}")))
        .collect::<Result<Vec<_>>>()?;
    if items.is_empty() {
        bail!("empty {name}");
    }
    Ok(items)
}

/// One row of the aggregate table.
#[derive(Debug, Clone)]
struct Row {
    k: f64,
    p: f64,
    adversary: String,
    rounds: usize,
    comparator: String,
    regret: f64,
    bound: f64,
}

fn comparator_label(u: &[f64]) -> String {
    u.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(" ")
}

fn run_cell(base: &RunConfig, k: f64, p: f64, kind: AdversaryKind, rounds: usize) -> Result<Vec<Row>> {
    let mut cfg = base.clone();
    cfg.stack.params.k = k;
    cfg.stack.params.p = p;
    cfg.stack.params.validate()?;
    cfg.adversary.kind = kind;
    cfg.adversary.validate()?;
    cfg.rounds = rounds;
    let outcome = play_config(&cfg).with_context(|| format!("cell k={k} p={p} {kind} T={rounds}"))?;
    Ok(rows(&cfg, &outcome)?
        .into_iter()
        .map(|r| Row {
            k,
            p,
            adversary: kind.to_string(),
            rounds,
            comparator: comparator_label(&r.comparator),
            regret: r.regret,
            bound: r.bound,
        })
        .collect())
}

type GroupKey = (String, String, String, String);

fn group_key(r: &Row) -> GroupKey {
    (real(r.k), real(r.p), r.adversary.clone(), r.comparator.clone())
}

/// Log-log slope of `max(regret, 1)` against `T` for each configuration.
/// Clamping keeps negative regret (the learner beating the comparator) from
/// breaking the logarithm.
fn exponents(rows: &[Row], horizons: usize) -> BTreeMap<GroupKey, f64> {
    let mut points: BTreeMap<GroupKey, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        points
            .entry(group_key(r))
            .or_default()
            .push((r.rounds as f64, r.regret.max(1.0)));
    }
    points
        .into_iter()
        .filter(|(_, pts)| pts.len() == horizons)
        .map(|(key, pts)| (key, loglog_slope(&pts)))
        .collect()
}

/// Runs every cell of `grid` in parallel and writes `sweep.csv` into the
/// output directory. A single-cell grid also writes the usual run outputs.
pub fn sweep(base: &RunConfig, grid: &Grid) -> Result<()> {
    let dir = base.out_dir()?;
    let mut cells = Vec::with_capacity(grid.cells());
    for &k in &grid.k {
        for &p in &grid.p {
            for &kind in &grid.adversary {
                for &rounds in &grid.rounds {
                    cells.push((k, p, kind, rounds));
                }
            }
        }
    }
    let results: Vec<Vec<Row>> = cells
        .par_iter()
        .map(|&(k, p, kind, rounds)| run_cell(base, k, p, kind, rounds))
        .collect::<Result<_>>()?;
    let rows: Vec<Row> = results.into_iter().flatten().collect();

    let with_exponent = grid.rounds.len() >= 2;
    let slopes = if with_exponent {
        exponents(&rows, grid.rounds.len())
    } else {
        BTreeMap::new()
    };
    write_csv(&dir.join("sweep.csv"), &rows, with_exponent.then_some(&slopes))?;

    if cells.len() == 1 {
        let (k, p, kind, rounds) = cells[0];
        let mut cfg = base.clone();
        cfg.stack.params.k = k;
        cfg.stack.params.p = p;
        cfg.adversary.kind = kind;
        cfg.rounds = rounds;
        write_outputs(dir, &cfg, &play_config(&cfg)?)?;
    }

    report(&rows, grid, &slopes);
    Ok(())
}

fn write_csv(path: &Path, rows: &[Row], slopes: Option<&BTreeMap<GroupKey, f64>>) -> Result<()> {
    let mut out = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header: Vec<&str> = SWEEP_HEADER.to_vec();
    if slopes.is_some() {
        header.push("exponent");
    }
    out.write_record(&header)?;
    for r in rows {
        let mut record = vec![
            real(r.k),
            real(r.p),
            r.adversary.clone(),
            r.rounds.to_string(),
            r.comparator.clone(),
            real(r.regret),
            real(r.bound),
            real(r.regret / r.bound),
        ];
        if let Some(slopes) = slopes {
            record.push(slopes.get(&group_key(r)).map(|&s| real(s)).unwrap_or_default());
        }
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

fn report(rows: &[Row], grid: &Grid, slopes: &BTreeMap<GroupKey, f64>) {
    let worst = rows.iter().map(|r| r.regret / r.bound).fold(f64::NEG_INFINITY, f64::max);
    println!("{} cells, {} rows, worst regret/bound {worst:.4}", grid.cells(), rows.len());
    if grid.k.len() >= 2 {
        // Against a stream the learner can exploit, regret is negative and
        // keeps falling as k grows, so the bound's argmin is shown as well.
        let mut best: BTreeMap<(String, String, usize, String), [(f64, f64); 2]> = BTreeMap::new();
        for r in rows {
            let key = (real(r.p), r.adversary.clone(), r.rounds, r.comparator.clone());
            let entry = best.entry(key).or_insert([(r.k, r.regret), (r.k, r.bound)]);
            if r.regret < entry[0].1 {
                entry[0] = (r.k, r.regret);
            }
            if r.bound < entry[1].1 {
                entry[1] = (r.k, r.bound);
            }
        }
        println!("k minimizing regret and bound:");
        for ((p, adversary, rounds, u), [(kr, regret), (kb, bound)]) in best {
            let p = p.parse::<f64>().unwrap_or(f64::NAN);
            println!(
                "  p={p} {adversary} T={rounds} u={u}: regret k={kr} ({regret:.4e}), bound k={kb} ({bound:.4e})"
            );
        }
    }
    if !slopes.is_empty() {
        println!("growth exponents (slope of log max(regret, 1) over log T):");
        for ((k, p, adversary, u), slope) in slopes {
            let (k, p) = (k.parse::<f64>().unwrap_or(f64::NAN), p.parse::<f64>().unwrap_or(f64::NAN));
            println!("  k={k} p={p} {adversary} u={u}: {slope:.4}");
        }
    }
}
