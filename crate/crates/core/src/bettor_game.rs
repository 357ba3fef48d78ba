//! The coin bettor played on its own, with every quantity the oracles need.
//!
//! [`run_hinted_game`](crate::game::run_hinted_game) refuses non-finite plays,
//! which is right for a learner whose plays are used downstream. The bare
//! bettor, however, wins exponentially fast against easy streams, and its
//! plays overflow `f64` long before `T = 10⁴`. [`play_bettor`] records the
//! fraction, hint and log-wealth of every round instead, so regret can be
//! evaluated exactly with [`Wide`] arithmetic.

use crate::bounds::StreamStats;
use crate::coin_betting::{BettingLossTrace, OnsBettor};
use crate::error::{Error, Result};
use crate::game::{Adversary, HintedLearner, RegretLedger};
use crate::reductions::truncate_scalar;
use crate::vector::Point;
use crate::wide::Wide;

/// Where the bettor's hints come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HintSchedule {
    /// `h_t` is the running maximum of the adversary's envelope.
    Envelope,
    /// `h_t = max(𝔤, max_{i<t}|g_i|)` and overshooting gradients are
    /// truncated before the bettor sees them (`𝔤` is the bettor's first hint).
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BettorRound {
    pub t: usize,
    /// Fraction bet this round.
    pub v: f64,
    pub hint: f64,
    /// Gradient chosen by the adversary.
    pub g: f64,
    /// Gradient delivered to the bettor (differs from `g` only if truncated).
    pub fed: f64,
    /// `ln Wealth_{t−1}`
    pub log_wealth_before: f64,
    /// `1 − fed · v`
    pub factor: f64,
    /// `Wealth_t` as an `f64` (may be `inf` after overflow).
    pub wealth_after: f64,
}

impl BettorRound {
    /// The play `w_t = v_t Wealth_{t−1}`.
    pub fn play(&self) -> Wide {
        Wide::from_parts(self.v, self.log_wealth_before)
    }
}

#[derive(Debug, Clone)]
pub struct BettorRun {
    pub epsilon: f64,
    pub alpha: f64,
    pub rounds: Vec<BettorRound>,
    /// Fraction and hint after the last update.
    pub final_fraction: f64,
    pub next_hint: f64,
    pub log_wealth: f64,
}

impl BettorRun {
    /// `Σ g_t w_t` against the adversary's gradients.
    pub fn cum_loss(&self) -> Wide {
        self.rounds.iter().map(|r| r.play().scale(r.g)).sum()
    }

    pub fn grad_sum(&self) -> f64 {
        self.rounds.iter().map(|r| r.g).sum()
    }

    /// `Σ g_t (w_t − ẘ)`
    pub fn regret(&self, comparator: f64) -> Wide {
        self.cum_loss() - Wide::from(comparator * self.grad_sum())
    }

    /// Relative gap in `ε − Σ fed_t w_t = Wealth_T`.
    pub fn identity_residual(&self) -> f64 {
        let paid: Wide = self.rounds.iter().map(|r| r.play().scale(r.fed)).sum();
        let lhs = Wide::from(self.epsilon) - paid;
        let wealth = Wide::from_parts(1.0, self.log_wealth);
        let gap = (lhs - wealth).abs();
        if gap == Wide::ZERO {
            0.0
        } else {
            (gap.ln_abs() - self.log_wealth).exp()
        }
    }

    /// `(Σ (g_t − fed_t)(w_t − ẘ), G (max_t|w_t| + |ẘ|))`: the extra regret
    /// caused by truncation and its upper bound.
    pub fn truncation_excess(&self, comparator: f64) -> (Wide, Wide) {
        let lhs = self
            .rounds
            .iter()
            .filter(|r| r.g != r.fed)
            .map(|r| (r.play() - Wide::from(comparator)).scale(r.g - r.fed))
            .sum();
        let max_play = self
            .rounds
            .iter()
            .map(|r| r.play().abs())
            .fold(Wide::ZERO, Wide::max);
        let g = self.rounds.iter().map(|r| r.g.abs()).fold(0.0, f64::max);
        (lhs, (max_play + Wide::from(comparator.abs())).scale(g))
    }

    /// The inner betting-fraction game as seen by the bettor.
    pub fn loss_trace(&self) -> BettingLossTrace {
        let mut trace = BettingLossTrace::new();
        for r in &self.rounds {
            trace.push(r.v, r.fed);
        }
        trace
    }

    /// The hint in force during the last round.
    pub fn final_hint(&self) -> f64 {
        self.rounds.last().map_or(self.next_hint, |r| r.hint)
    }

    /// Statistics of the delivered stream, with `h_T` from [`final_hint`](Self::final_hint).
    pub fn stats(&self) -> StreamStats {
        StreamStats::from_norms(self.rounds.iter().map(|r| r.fed.abs()), 0.0)
            .with_final_hint(self.final_hint())
    }
}

/// Plays `rounds` rounds of a one-dimensional adversary against `bettor`.
pub fn play_bettor<A>(
    mut bettor: OnsBettor,
    adversary: &mut A,
    rounds: usize,
    schedule: HintSchedule,
) -> Result<BettorRun>
where
    A: Adversary + ?Sized,
{
    if rounds == 0 {
        return Err(Error::EmptyGame);
    }
    if adversary.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: adversary.dim(),
        });
    }
    let envelope = |adversary: &A, t: usize| {
        adversary
            .envelope(t)
            .ok_or(Error::NoEnvelope(adversary.name()))
    };
    let history = RegretLedger::new(1);
    let mut records = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let hint = bettor.hint();
        if schedule == HintSchedule::Envelope && envelope(adversary, t)? > hint {
            return Err(Error::HintViolated {
                grad: envelope(adversary, t)?,
                hint,
            });
        }
        let v = bettor.fraction();
        let log_wealth_before = bettor.log_wealth();
        let g = adversary.next_grad(t, &history, &Point::scalar(bettor.bet())).first();
        if !g.is_finite() {
            return Err(Error::NonFinite {
                what: "gradient",
                round: t,
            });
        }
        let (fed, next) = match schedule {
            HintSchedule::Envelope => (g, hint.max(envelope(adversary, t + 1)?)),
            HintSchedule::Truncated => (truncate_scalar(g, hint), hint.max(g.abs())),
        };
        bettor.update_scalar(fed, next)?;
        records.push(BettorRound {
            t,
            v,
            hint,
            g,
            fed,
            log_wealth_before,
            factor: 1.0 - fed * v,
            wealth_after: bettor.wealth(),
        });
    }
    Ok(BettorRun {
        epsilon: bettor.epsilon(),
        alpha: bettor.alpha(),
        rounds: records,
        final_fraction: bettor.fraction(),
        next_hint: bettor.hint(),
        log_wealth: bettor.log_wealth(),
    })
}
