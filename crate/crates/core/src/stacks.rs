//! The learner stacks, built by name, with the bound each one claims.

use std::fmt;
use std::str::FromStr;

use crate::bounds::{cor1_bound, fixed_diameter_bound, thm1_bound, BoundParams, StreamStats};
use crate::coin_betting::OnsBettor;
use crate::error::{Error, Result};
use crate::game::{run_game, run_hinted_game, Adversary, Learner, Probe, RegretLedger};
use crate::reductions::{fixed_diameter_wrap, DimFree, LeashParams, Leashed, Truncating};
use crate::unit_ball::{ball_regret_bound, AdaGradBall};
use crate::vector::{Gradient, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    /// The coin bettor, given the adversary's envelope as hints.
    OnsHints,
    /// The coin bettor behind the truncation wrapper.
    Hintless,
    Leashed,
    /// Leashed lifted to `ℝ^d` with an AdaGrad direction learner.
    LeashedDimFree,
    /// Truncation plus a constant radius `D`.
    FixedDiameter,
    /// AdaGrad on the unit ball.
    AdaGradBall,
}

impl Algo {
    pub const ALL: [Algo; 6] = [
        Algo::OnsHints,
        Algo::Hintless,
        Algo::Leashed,
        Algo::LeashedDimFree,
        Algo::FixedDiameter,
        Algo::AdaGradBall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algo::OnsHints => "ons_hints",
            Algo::Hintless => "hintless",
            Algo::Leashed => "leashed",
            Algo::LeashedDimFree => "leashed_dimfree",
            Algo::FixedDiameter => "fixed_diameter",
            Algo::AdaGradBall => "adagrad_ball",
        }
    }

    /// Whether the stack only plays in one dimension.
    pub fn scalar_only(self) -> bool {
        !matches!(self, Algo::LeashedDimFree | Algo::AdaGradBall)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("unknown algorithm `{0}`; expected one of ons_hints, hintless, leashed, leashed_dimfree, fixed_diameter, adagrad_ball")]
pub struct ParseAlgoError(String);

impl FromStr for Algo {
    type Err = ParseAlgoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| ParseAlgoError(s.to_string()))
    }
}

/// Which stack to build, and its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct StackConfig {
    pub algo: Algo,
    pub params: BoundParams,
    /// Radius of [`Algo::FixedDiameter`]; ignored by the others.
    pub diameter: f64,
}

impl StackConfig {
    pub fn new(algo: Algo) -> Self {
        Self {
            algo,
            params: BoundParams::default(),
            diameter: 1.0,
        }
    }

    pub fn leash_params(&self) -> LeashParams {
        LeashParams {
            k: self.params.k,
            p: self.params.p,
            g0: self.params.g0,
            epsilon: self.params.epsilon,
            alpha: self.params.alpha,
        }
    }
}

/// Passes everything through, remembering the scalar losses it was fed.
struct Recorded<L> {
    inner: L,
    fed: Vec<f64>,
}

impl<L: Learner> Learner for Recorded<L> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn predict(&mut self) -> Point {
        self.inner.predict()
    }

    fn update(&mut self, grad: &Gradient) -> Result<()> {
        self.fed.push(grad.first());
        self.inner.update(grad)
    }

    fn probe(&self) -> Probe {
        self.inner.probe()
    }
}

/// A finished game.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub ledger: RegretLedger,
    /// Statistics of the adversary's stream, with `h_T` the hint in force in
    /// the last round where the stack has one.
    pub stats: StreamStats,
    /// For [`Algo::LeashedDimFree`]: statistics of the scalar stream
    /// `⟨g_t, y_t⟩` seen by the magnitude learner.
    pub scalar_stats: Option<StreamStats>,
}

/// Regret of `outcome` against `comparator`.
pub fn regret(outcome: &Outcome, comparator: &Point) -> Result<f64> {
    outcome.ledger.regret(comparator)
}

fn last_hint(ledger: &RegretLedger) -> Option<f64> {
    ledger.rounds().last().and_then(|r| r.hint_before)
}

/// Builds the stack and plays `rounds` rounds against `adversary`.
pub fn play<A>(config: &StackConfig, adversary: &mut A, rounds: usize) -> Result<Outcome>
where
    A: Adversary + ?Sized,
{
    config.params.validate()?;
    let dim = adversary.dim();
    if config.algo.scalar_only() && dim != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: dim,
        });
    }
    let leash = config.leash_params();
    let mut scalar_fed = None;
    let ledger = match config.algo {
        Algo::OnsHints => {
            let first = adversary
                .envelope(1)
                .ok_or(Error::NoEnvelope(adversary.name()))?;
            let mut bettor = OnsBettor::new(leash.epsilon, leash.alpha, first)?;
            run_hinted_game(&mut bettor, adversary, rounds)?
        }
        Algo::Hintless => run_game(&mut Truncating::new(leash.bettor()?), adversary, rounds)?,
        Algo::Leashed => run_game(&mut Leashed::ons(leash)?, adversary, rounds)?,
        Algo::LeashedDimFree => {
            let magnitude = Recorded {
                inner: Leashed::ons(leash)?,
                fed: Vec::with_capacity(rounds),
            };
            let mut lifted = DimFree::new(magnitude, dim);
            let ledger = run_game(&mut lifted, adversary, rounds)?;
            scalar_fed = Some(lifted.magnitude().fed.clone());
            ledger
        }
        Algo::FixedDiameter => {
            let mut stack = fixed_diameter_wrap(leash.bettor()?, config.diameter)?;
            run_game(&mut stack, adversary, rounds)?
        }
        Algo::AdaGradBall => run_game(&mut AdaGradBall::new(dim), adversary, rounds)?,
    };
    let g0 = config.params.g0;
    let mut stats = StreamStats::from_ledger(&ledger, g0);
    if let Some(h) = last_hint(&ledger) {
        stats = stats.with_final_hint(h);
    }
    let scalar_stats = scalar_fed.map(|fed| {
        let s = StreamStats::from_norms(fed.iter().map(|x| x.abs()), g0);
        match last_hint(&ledger) {
            Some(h) => s.with_final_hint(h),
            None => s,
        }
    });
    Ok(Outcome {
        ledger,
        stats,
        scalar_stats,
    })
}

/// A regret upper bound and where it comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Claim {
    pub name: &'static str,
    pub value: f64,
}

/// The bound the stack guarantees against `comparator` on this outcome.
pub fn claimed_bound(config: &StackConfig, outcome: &Outcome, comparator: &Point) -> Claim {
    let params = &config.params;
    let stats = &outcome.stats;
    let u = comparator.norm();
    let (name, value) = match config.algo {
        Algo::OnsHints => ("thm1", thm1_bound(params, stats, u)),
        Algo::Hintless => {
            let extra = stats.max_grad * (outcome.ledger.max_played_norm() + u);
            ("thm1+truncation", thm1_bound(params, stats, u) + extra)
        }
        Algo::Leashed => ("cor1", cor1_bound(params, stats, u)),
        Algo::LeashedDimFree => {
            let scalar = outcome.scalar_stats.as_ref().unwrap_or(stats);
            (
                "cor1+ball",
                cor1_bound(params, scalar, u) + u * ball_regret_bound(stats.sum_sq),
            )
        }
        Algo::FixedDiameter => (
            "fixed_diameter",
            fixed_diameter_bound(params, stats, u, config.diameter),
        ),
        Algo::AdaGradBall => (
            "ball",
            ball_regret_bound(stats.sum_sq) + (u - 1.0).max(0.0) * stats.sum_abs,
        ),
    };
    Claim { name, value }
}
