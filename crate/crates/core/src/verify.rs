//! The acceptance checks, runnable from tests and from the command line.
//!
//! Each check plays the relevant stack against a family of adversaries and
//! compares what it measures with what the theory promises. A report carries
//! both numbers, so a failure says by how much.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::adversary::{AdversaryConfig, AdversaryKind};
use crate::bettor_game::{play_bettor, BettorRun, HintSchedule};
use crate::bounds::{fenchel_bound, thm1_bound, BoundParams};
use crate::coin_betting::{ons_inner_regret, ons_regret_bound, OnsBettor};
use crate::error::Result;
use crate::game::{Adversary, Learner, RegretLedger};
use crate::oracle::{
    best_betting_fraction, comparator_sweep, exp_potential_conjugate, loglog_slope,
    random_unit_vectors, FRACTION_RESOLUTION,
};
use crate::reductions::{DimFree, LeashParams, Leashed};
use crate::stacks::{claimed_bound, play, regret, Algo, StackConfig};
use crate::vector::{inner_product, Gradient, Point};
use crate::wide::Wide;

/// How far the deliberately broken clip widens the betting interval.
const MUTANT_CLIP_SCALE: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub required: String,
    pub measured: String,
    pub passed: bool,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: measured {}; required {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.required
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Coin,
    Reductions,
    Ball,
    Bounds,
}

impl Suite {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
            Suite::Coin => &[1, 2, 3],
            Suite::Reductions => &[4, 5, 6, 8, 9, 11],
            Suite::Ball => &[7],
            Suite::Bounds => &[10],
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("unknown suite `{0}`; expected all, coin, reductions, ball or bounds")]
pub struct ParseSuiteError(String);

impl FromStr for Suite {
    type Err = ParseSuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Suite::All),
            "coin" => Ok(Suite::Coin),
            "reductions" => Ok(Suite::Reductions),
            "ball" => Ok(Suite::Ball),
            "bounds" => Ok(Suite::Bounds),
            other => Err(ParseSuiteError(other.to_string())),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::Coin => "coin",
            Suite::Reductions => "reductions",
            Suite::Ball => "ball",
            Suite::Bounds => "bounds",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    /// Run the coin-betting checks with a bettor whose clip interval is too
    /// wide, to show that they notice.
    pub mutate_clip: bool,
}

pub fn run_suite(suite: Suite, opts: VerifyOptions) -> Vec<CriterionReport> {
    suite.criteria().iter().map(|&id| run_criterion(id, opts)).collect()
}

/// Runs one check by number. Panics on an unknown number.
pub fn run_criterion(id: u8, opts: VerifyOptions) -> CriterionReport {
    let outcome = match id {
        1 => wealth_and_clip(opts),
        2 => coin_regret(opts),
        3 => inner_ons(opts),
        4 => truncation_excess(),
        5 => leashed_end_to_end(),
        6 => sublinearity(),
        7 => unit_ball(),
        8 => dimension_free_identity(),
        9 => barrier_scale_invariance(),
        10 => fenchel_lemma(),
        11 => fixed_diameter(),
        _ => panic!("no acceptance criterion {id}"),
    };
    match outcome {
        Ok(report) => report,
        Err(e) => CriterionReport {
            id,
            name: NAMES[id as usize - 1],
            required: "the run to complete".into(),
            measured: format!("error: {e}"),
            passed: false,
        },
    }
}

const NAMES: [&str; 11] = [
    "wealth positivity and clip containment",
    "coin-betting regret within its bound",
    "inner ONS regret against the best grid fraction",
    "truncation excess within G(max|w|+|u|)",
    "Leashed regret within the expanded bound",
    "sublinear regret growth",
    "unit-ball regret bound",
    "dimension-free regret identity",
    "barrier scale invariance",
    "conjugate of the exponential potential",
    "fixed-diameter variant",
];

fn report(id: u8, required: String, measured: String, passed: bool) -> Result<CriterionReport> {
    Ok(CriterionReport {
        id,
        name: NAMES[id as usize - 1],
        required,
        measured,
        passed,
    })
}

fn is_seeded(kind: AdversaryKind) -> bool {
    matches!(kind, AdversaryKind::SeededUniform | AdversaryKind::SeededSigns)
}

/// One config per kind, and one per seed for the seeded kinds.
fn configs(kinds: &[AdversaryKind], seeds: std::ops::RangeInclusive<u64>, dim: usize) -> Vec<AdversaryConfig> {
    let mut out = Vec::new();
    for &kind in kinds {
        if is_seeded(kind) {
            out.extend(seeds.clone().map(|s| AdversaryConfig::new(kind, dim).seed(s)));
        } else {
            out.push(AdversaryConfig::new(kind, dim).seed(*seeds.start()));
        }
    }
    out
}

fn bettor(opts: VerifyOptions, first_hint: f64) -> Result<OnsBettor> {
    let b = OnsBettor::with_hint(first_hint)?;
    Ok(if opts.mutate_clip {
        b.with_clip_scale(MUTANT_CLIP_SCALE)
    } else {
        b
    })
}

fn bettor_run(cfg: &AdversaryConfig, rounds: usize, schedule: HintSchedule, opts: VerifyOptions) -> Result<BettorRun> {
    let first = match schedule {
        HintSchedule::Envelope => cfg.envelope(1),
        HintSchedule::Truncated => 1.0,
    };
    play_bettor(bettor(opts, first)?, &mut cfg.build()?, rounds, schedule)
}

/// `a/b` for extended-range values, as an `f64`.
fn wide_ratio(a: Wide, b: Wide) -> f64 {
    if a == Wide::ZERO {
        return 0.0;
    }
    a.signum() * b.signum() * (a.ln_abs() - b.ln_abs()).exp()
}

fn wealth_and_clip(opts: VerifyOptions) -> Result<CriterionReport> {
    let start = Instant::now();
    let mut rounds = 0usize;
    let mut clip_violations = 0usize;
    let mut wealth_violations = 0usize;
    let mut worst_clip = 0.0f64;
    let mut min_factor = f64::INFINITY;
    for kind in AdversaryKind::all() {
        for seed in 1..=10 {
            let cfg = AdversaryConfig::new(kind, 1).seed(seed);
            for schedule in [HintSchedule::Envelope, HintSchedule::Truncated] {
                let run = bettor_run(&cfg, 10_000, schedule, opts)?;
                let mut check = |v: f64, hint: f64| {
                    let used = 2.0 * hint * v.abs();
                    worst_clip = worst_clip.max(used);
                    if !(v.abs() <= 1.0 / (2.0 * hint)) {
                        clip_violations += 1;
                    }
                };
                for r in &run.rounds {
                    rounds += 1;
                    check(r.v, r.hint);
                    min_factor = min_factor.min(r.factor);
                    if !(r.wealth_after > 0.0 && r.factor > 0.0) {
                        wealth_violations += 1;
                    }
                }
                check(run.final_fraction, run.next_hint);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "wealth > 0 and |v_t| <= 1/(2h_t) in every round; < 5 s".into(),
        format!(
            "{rounds} rounds, {wealth_violations} non-positive wealth, {clip_violations} clip violations, \
             max 2h|v| = {worst_clip:.6}, min factor = {min_factor:.6}, {secs:.2} s"
        ),
        clip_violations == 0 && wealth_violations == 0 && secs < 5.0,
    )
}

fn coin_streams() -> Vec<(AdversaryConfig, usize)> {
    let kinds = [
        AdversaryKind::Constant,
        AdversaryKind::Alternating,
        AdversaryKind::SeededUniform,
    ];
    let mut out = Vec::new();
    for cfg in configs(&kinds, 1..=10, 1) {
        for t in [100, 1_000, 10_000] {
            out.push((cfg, t));
        }
    }
    out
}

fn coin_regret(opts: VerifyOptions) -> Result<CriterionReport> {
    let params = BoundParams::default();
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for (cfg, t) in coin_streams() {
        let run = bettor_run(&cfg, t, HintSchedule::Envelope, opts)?;
        let stats = run.stats();
        for u in comparator_sweep(1, &Gradient::zeros(1), 0) {
            let u = u.first();
            let r = run.regret(u);
            let bound = thm1_bound(&params, &stats, u.abs());
            checked += 1;
            worst = worst.max(wide_ratio(r, Wide::from(bound)));
            if !(r <= Wide::from(bound)) {
                violations.push(format!("{} T={t} u={u}", cfg.kind));
            }
        }
    }
    report(
        2,
        "regret <= thm1 bound, zero tolerance".into(),
        format!(
            "{checked} (stream, comparator) pairs, {} violations{}, max regret/bound = {worst:.4}",
            violations.len(),
            first_few(&violations)
        ),
        violations.is_empty(),
    )
}

fn first_few(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!(" (e.g. {})", items.iter().take(3).cloned().collect::<Vec<_>>().join(", "))
    }
}

fn inner_ons(opts: VerifyOptions) -> Result<CriterionReport> {
    let slack = 1e-3;
    let mut worst_margin = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    let streams = coin_streams();
    for (cfg, t) in &streams {
        let run = bettor_run(cfg, *t, HintSchedule::Envelope, opts)?;
        let trace = run.loss_trace();
        let h = run.final_hint();
        let best = best_betting_fraction(&trace, h, FRACTION_RESOLUTION);
        let r = ons_inner_regret(&trace, best)?;
        let bound = ons_regret_bound(run.alpha, h, trace.sum_g_sq());
        worst_margin = worst_margin.max(r - bound);
        if !(r <= bound + slack) {
            violations.push(format!("{} T={t}", cfg.kind));
        }
    }
    report(
        3,
        format!("ONS regret vs best grid fraction <= a/(4h^2) + 4.5 ln(1 + S/a) + {slack}"),
        format!(
            "{} streams, {} violations{}, max (regret - bound) = {worst_margin:.4}",
            streams.len(),
            violations.len(),
            first_few(&violations)
        ),
        violations.is_empty(),
    )
}

fn truncation_excess() -> Result<CriterionReport> {
    let kinds = [
        AdversaryKind::Spike {
            period: 100,
            magnitude: 10.0,
        },
        AdversaryKind::Growing { rate: 0.5 },
    ];
    let mut checked = 0;
    let mut truncated = 0;
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for cfg in configs(&kinds, 1..=1, 1) {
        let run = bettor_run(&cfg, 10_000, HintSchedule::Truncated, VerifyOptions::default())?;
        truncated += run.rounds.iter().filter(|r| r.g != r.fed).count();
        for u in comparator_sweep(1, &Gradient::zeros(1), 0) {
            let (lhs, rhs) = run.truncation_excess(u.first());
            checked += 1;
            worst = worst.max(wide_ratio(lhs, rhs));
            if !(lhs <= rhs) {
                violations.push(format!("{} u={}", cfg.kind, u.first()));
            }
        }
    }
    report(
        4,
        "sum (g - g_trunc)(w - u) <= G (max|w| + |u|), exact".into(),
        format!(
            "{checked} (stream, comparator) pairs, {truncated} truncated rounds, {} violations{}, max lhs/rhs = {worst:.4}",
            violations.len(),
            first_few(&violations)
        ),
        violations.is_empty(),
    )
}

/// Plays a stack on every config and compares regret with its claim.
fn claims_hold(
    config: &StackConfig,
    configs: &[AdversaryConfig],
    horizons: &[usize],
    comparators: impl Fn(&RegretLedger, &AdversaryConfig) -> Vec<Point>,
) -> Result<(usize, Vec<String>, f64)> {
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for cfg in configs {
        for &t in horizons {
            let out = play(config, &mut cfg.build()?, t)?;
            for u in comparators(&out.ledger, cfg) {
                let r = regret(&out, &u)?;
                let claim = claimed_bound(config, &out, &u);
                checked += 1;
                worst = worst.max(r / claim.value);
                if !(r <= claim.value) {
                    violations.push(format!("{} T={t} |u|={:.3}", cfg.kind, u.norm()));
                }
            }
        }
    }
    Ok((checked, violations, worst))
}

fn leashed_end_to_end() -> Result<CriterionReport> {
    let start = Instant::now();
    let config = StackConfig::new(Algo::Leashed);
    let (checked, violations, worst) = claims_hold(
        &config,
        &configs(&AdversaryKind::all(), 1..=3, 1),
        &[1_000, 10_000],
        |_, _| comparator_sweep(1, &Gradient::zeros(1), 0),
    )?;
    let secs = start.elapsed().as_secs_f64();
    report(
        5,
        "regret <= cor1 bound at the best grid q, zero tolerance; < 30 s".into(),
        format!(
            "{checked} (stream, comparator) pairs, {} violations{}, max regret/bound = {worst:.4}, {secs:.2} s",
            violations.len(),
            first_few(&violations)
        ),
        violations.is_empty() && secs < 30.0,
    )
}

fn sublinearity() -> Result<CriterionReport> {
    let config = StackConfig::new(Algo::Leashed);
    let adversary = AdversaryConfig::new(AdversaryKind::Constant, 1);
    let comparator = Point::scalar(1.0);
    let horizons = [100usize, 1_000, 10_000, 100_000];
    let mut regrets = Vec::new();
    for &t in &horizons {
        let out = play(&config, &mut adversary.build()?, t)?;
        regrets.push(regret(&out, &comparator)?);
    }
    let per_round: Vec<f64> = regrets.iter().zip(&horizons).map(|(r, &t)| r / t as f64).collect();
    let decreasing = per_round[2] < per_round[0];
    let points: Vec<(f64, f64)> = horizons
        .iter()
        .zip(&regrets)
        .map(|(&t, &r)| (t as f64, r.max(1.0)))
        .collect();
    let slope = loglog_slope(&points);
    report(
        6,
        "R(1e4)/1e4 < R(1e2)/1e2 and log-log slope of max(R, 1) over T in {1e2..1e5} <= 0.55".into(),
        format!(
            "R = {:?}, R/T = {:?}, slope = {slope:.4}",
            regrets.iter().map(|r| format!("{r:.4e}")).collect::<Vec<_>>(),
            per_round.iter().map(|r| format!("{r:.4e}")).collect::<Vec<_>>()
        ),
        decreasing && slope <= 0.55,
    )
}

fn unit_ball() -> Result<CriterionReport> {
    let kinds = [
        AdversaryKind::SeededUniform,
        AdversaryKind::SeededSigns,
        AdversaryKind::Constant,
        AdversaryKind::Alternating,
        AdversaryKind::AdaptiveSign,
    ];
    let config = StackConfig::new(Algo::AdaGradBall);
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for dim in [1, 2, 10] {
        let (c, v, w) = claims_hold(&config, &configs(&kinds, 1..=3, dim), &[10_000], |ledger, cfg| {
            let mut us = random_unit_vectors(dim, 20, cfg.seed.wrapping_add(1000));
            let sum = ledger.grad_sum();
            let n = sum.norm();
            if n > 0.0 {
                us.push(Point::from_vec(sum.as_slice().iter().map(|g| -g / n).collect()));
            }
            us
        })?;
        checked += c;
        violations.extend(v.into_iter().map(|s| format!("d={dim} {s}")));
        worst = worst.max(w);
    }
    report(
        7,
        "regret <= 2^{3/2} sqrt(sum ||g||^2) for unit comparators, zero tolerance".into(),
        format!(
            "{checked} (stream, comparator) pairs, {} violations{}, max regret/bound = {worst:.4}",
            violations.len(),
            first_few(&violations)
        ),
        violations.is_empty(),
    )
}

fn dimension_free_identity() -> Result<CriterionReport> {
    let tolerance = 1e-9;
    let mut checked = 0;
    let mut worst = 0.0f64;
    for dim in [2, 10] {
        for cfg in configs(&AdversaryKind::all(), 1..=3, dim) {
            let mut lifted = DimFree::leashed(LeashParams::default(), dim)?;
            let mut adv = cfg.build()?;
            let history = RegretLedger::new(dim);
            let mut rounds = Vec::with_capacity(1_000);
            for t in 1..=1_000 {
                let (x, y) = lifted.split();
                let y = y.to_vec();
                let w = lifted.predict();
                let g = adv.next_grad(t, &history, &w);
                lifted.update(&g)?;
                rounds.push((g, x, y, w));
            }
            let grad_sum = Gradient::from_vec((0..dim).map(|i| rounds.iter().map(|r| r.0[i]).sum()).collect());
            for u in comparator_sweep(dim, &grad_sum, cfg.seed) {
                let r = u.norm();
                if r == 0.0 {
                    continue;
                }
                let dir: Vec<f64> = u.as_slice().iter().map(|c| c / r).collect();
                let mut lhs = 0.0;
                let mut rhs = 0.0;
                for (g, x, y, w) in &rounds {
                    let g = g.as_slice();
                    let s = inner_product(g, y);
                    lhs += inner_product(g, w.as_slice()) - inner_product(g, u.as_slice());
                    rhs += s * (x - r) + r * (s - inner_product(g, &dir));
                }
                checked += 1;
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    report(
        8,
        format!("|sum <g, w - u> - [sum s(x - |u|) + |u| sum <g, y - u/|u|>]| <= {tolerance:e}"),
        format!("{checked} (trace, comparator) pairs, max gap = {worst:.3e}"),
        worst <= tolerance,
    )
}

fn barrier_trace(stream: &[f64]) -> Result<Vec<f64>> {
    let mut l = Leashed::ons(LeashParams::default())?;
    let mut out = vec![l.barrier()];
    for &g in stream {
        l.predict_scalar();
        l.update_scalar(g)?;
        out.push(l.barrier());
    }
    Ok(out)
}

fn barrier_scale_invariance() -> Result<CriterionReport> {
    let mut mismatched = Vec::new();
    let cfgs = configs(&AdversaryKind::all(), 1..=3, 1);
    for cfg in &cfgs {
        // Record the stream an actual Leashed run faces, then replay it scaled.
        let mut learner = Leashed::ons(LeashParams::default())?;
        let mut adv = cfg.build()?;
        let history = RegretLedger::new(1);
        let mut stream = Vec::with_capacity(1_000);
        for t in 1..=1_000 {
            let w = learner.predict();
            let g = adv.next_grad(t, &history, &w).first();
            learner.update_scalar(g)?;
            stream.push(g);
        }
        let scaled: Vec<f64> = stream.iter().map(|g| 1000.0 * g).collect();
        let a = barrier_trace(&stream)?;
        let b = barrier_trace(&scaled)?;
        if a.iter().zip(&b).any(|(x, y)| x.to_bits() != y.to_bits()) {
            mismatched.push(cfg.kind.to_string());
        }
    }
    report(
        9,
        "B_t traces for g and 1000 g bit-identical".into(),
        format!(
            "{} streams of 1000 rounds, {} mismatched{}",
            cfgs.len(),
            mismatched.len(),
            first_few(&mismatched)
        ),
        mismatched.is_empty(),
    )
}

/// The seeded `(a, b, c, θ)` tuples of the conjugate check.
pub fn fenchel_tuples(count: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut u = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    (0..count)
        .map(|_| {
            let a = 0.1 + 9.9 * u();
            let b = 0.1 + 9.9 * u();
            let c = 10.0 * u();
            let theta = 200.0 * u() - 100.0;
            [a, b, c, theta]
        })
        .collect()
}

fn fenchel_lemma() -> Result<CriterionReport> {
    let tolerance = 1e-6;
    let tuples = fenchel_tuples(20, 20_240_601);
    let mut violations = Vec::new();
    for &[a, b, c, theta] in &tuples {
        let conj = exp_potential_conjugate(a, b, c, theta);
        let bound = fenchel_bound(a, b, c, theta);
        if !(conj <= bound + tolerance) {
            violations.push((conj - bound, format!("a={a:.3} b={b:.3} c={c:.3} theta={theta:.2}: sup {conj:.4} > bound {bound:.4}")));
        }
    }
    violations.sort_by(|x, y| y.0.total_cmp(&x.0));
    let examples: Vec<String> = violations.iter().map(|v| v.1.clone()).collect();
    report(
        10,
        format!("sup_x(theta x - f(x)) <= fenchel bound + {tolerance:e} on 20 seeded tuples"),
        format!(
            "{} of {} tuples violate{}",
            violations.len(),
            tuples.len(),
            first_few(&examples)
        ),
        violations.is_empty(),
    )
}

fn fixed_diameter() -> Result<CriterionReport> {
    let diameter = 1.0;
    let config = StackConfig {
        diameter,
        ..StackConfig::new(Algo::FixedDiameter)
    };
    let adversary = AdversaryConfig::new(AdversaryKind::Growing { rate: 0.5 }, 1);
    let out = play(&config, &mut adversary.build()?, 10_000)?;
    let max_play = out.ledger.max_played_norm();
    let mut violations = Vec::new();
    let mut rows = Vec::new();
    for u in [0.0, 0.1, -0.1, 0.5, -0.5, 1.0, -1.0] {
        let p = Point::scalar(u);
        let r = regret(&out, &p)?;
        let bound = claimed_bound(&config, &out, &p).value;
        rows.push(format!("u={u}: {r:.2}/{bound:.2}"));
        if !(r <= bound) {
            violations.push(u.to_string());
        }
    }
    report(
        11,
        "max|w~_t| <= D = 1 exactly; regret <= 2 thm1 + G(D + |u|) for |u| <= 1".into(),
        format!("max|w~| = {max_play}, regret/bound {}", rows.join(", ")),
        max_play <= diameter && violations.is_empty(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        for s in [Suite::All, Suite::Coin, Suite::Reductions, Suite::Ball, Suite::Bounds] {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
        let mut all: Vec<u8> = [Suite::Coin, Suite::Reductions, Suite::Ball, Suite::Bounds]
            .iter()
            .flat_map(|s| s.criteria().iter().copied())
            .collect();
        all.sort();
        assert_eq!(all, Suite::All.criteria());
    }

    #[test]
    fn tuples_are_in_range() {
        for [a, b, c, t] in fenchel_tuples(50, 1) {
            assert!((0.1..=10.0).contains(&a) && (0.1..=10.0).contains(&b));
            assert!((0.0..=10.0).contains(&c) && t.abs() <= 100.0);
        }
    }
}
