//! A single run: play the stack, then write the per-round trace and the
//! per-comparator summary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use leashed::bounds::{cor1_bound, simplified_bound, thm1_bound, Setting};
use leashed::oracle::comparator_sweep;
use leashed::stacks::{claimed_bound, play, regret, Outcome};
use leashed::{Point, RegretLedger};

use crate::config::{Comparators, RunConfig};

/// Seed of the random directions in the automatic comparator sweep.
const SWEEP_SEED: u64 = 7;

pub const TRACE_HEADER: [&str; 7] = ["t", "w_norm", "g_norm", "hint", "barrier", "wealth", "cum_loss"];

/// Seventeen significant digits, enough to read back the exact double.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

pub fn play_config(cfg: &RunConfig) -> Result<Outcome> {
    let mut adversary = cfg.adversary.build()?;
    play(&cfg.stack, &mut adversary, cfg.rounds).context("game aborted")
}

pub fn comparators(cfg: &RunConfig, outcome: &Outcome) -> Vec<Point> {
    match &cfg.comparators {
        Comparators::Auto => {
            comparator_sweep(outcome.ledger.dim(), outcome.ledger.grad_sum(), SWEEP_SEED)
        }
        Comparators::Explicit(points) => points.clone(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparatorRow {
    pub comparator: Vec<f64>,
    pub norm: f64,
    pub regret: f64,
    pub thm1: f64,
    pub cor1: f64,
    /// Name of the bound this stack actually guarantees.
    pub claimed: &'static str,
    pub bound: f64,
    pub ratio: f64,
    /// Constant-free growth shape, not an upper bound.
    pub simplified_nonrigorous: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub algo: String,
    pub adversary: String,
    #[serde(rename = "T")]
    pub rounds: usize,
    pub dim: usize,
    pub seed: u64,
    pub scale: f64,
    pub k: f64,
    pub p: f64,
    pub eps: f64,
    pub alpha: f64,
    pub g0: f64,
    #[serde(rename = "D")]
    pub diameter: f64,
    pub cum_loss: f64,
    pub sum_sq: f64,
    pub max_grad: f64,
    pub final_hint: f64,
    pub all_within_bound: bool,
    pub comparators: Vec<ComparatorRow>,
}

pub fn rows(cfg: &RunConfig, outcome: &Outcome) -> Result<Vec<ComparatorRow>> {
    let params = &cfg.stack.params;
    let setting = if params.p == 0.5 {
        Setting::HalfZero
    } else {
        Setting::Thirds
    };
    comparators(cfg, outcome)
        .into_iter()
        .map(|u| {
            let r = regret(outcome, &u)?;
            let norm = u.norm();
            let claim = claimed_bound(&cfg.stack, outcome, &u);
            Ok(ComparatorRow {
                comparator: u.into_vec(),
                norm,
                regret: r,
                thm1: thm1_bound(params, &outcome.stats, norm),
                cor1: cor1_bound(params, &outcome.stats, norm),
                claimed: claim.name,
                bound: claim.value,
                ratio: r / claim.value,
                simplified_nonrigorous: simplified_bound(setting, &outcome.stats, norm, params.k),
            })
        })
        .collect()
}

pub fn summary(cfg: &RunConfig, outcome: &Outcome) -> Result<Summary> {
    let rows = rows(cfg, outcome)?;
    let params = &cfg.stack.params;
    let adv = &cfg.adversary;
    Ok(Summary {
        algo: cfg.stack.algo.to_string(),
        adversary: adv.kind.to_string(),
        rounds: cfg.rounds,
        dim: adv.dim,
        seed: adv.seed,
        scale: adv.scale,
        k: params.k,
        p: params.p,
        eps: params.epsilon,
        alpha: params.alpha,
        g0: params.g0,
        diameter: cfg.stack.diameter,
        cum_loss: outcome.ledger.cum_loss(),
        sum_sq: outcome.stats.sum_sq,
        max_grad: outcome.stats.max_grad,
        final_hint: outcome.stats.final_hint,
        all_within_bound: rows.iter().all(|r| r.regret <= r.bound),
        comparators: rows,
    })
}

pub fn write_trace(path: &Path, ledger: &RegretLedger) -> Result<()> {
    let mut out = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    out.write_record(TRACE_HEADER)?;
    let mut cum_loss = 0.0;
    for r in ledger.rounds() {
        cum_loss += r.grad.dot(&r.played);
        out.write_record([
            r.t.to_string(),
            real(r.played.norm()),
            real(r.grad.norm()),
            opt(r.hint_before),
            opt(r.barrier),
            opt(r.wealth),
            real(cum_loss),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut out, summary)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Writes `trace.csv` and `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, cfg: &RunConfig, outcome: &Outcome) -> Result<Summary> {
    let summary = summary(cfg, outcome)?;
    write_trace(&dir.join("trace.csv"), &outcome.ledger)?;
    write_summary(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

pub fn print_summary(summary: &Summary) {
    println!(
        "{} vs {} for {} rounds (dim {}): cumulative loss {:.6e}",
        summary.algo, summary.adversary, summary.rounds, summary.dim, summary.cum_loss
    );
    println!("{:>24} {:>14} {:>14} {:>16} {:>9}", "comparator", "regret", "bound", "claim", "ratio");
    for row in &summary.comparators {
        let u = row.comparator.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>().join(",");
        println!(
            "{:>24} {:>14.6e} {:>14.6e} {:>16} {:>9.4}",
            truncate_label(&u, 24),
            row.regret,
            row.bound,
            row.claimed,
            row.ratio
        );
    }
}

fn truncate_label(s: &str, width: usize) -> String {
    if s.chars().count() <= width {
        s.to_string()
    } else {
        let head: String = s.chars().take(width - 1).collect();
        format!("{head}…")
    }
}
