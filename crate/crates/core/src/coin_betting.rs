//! One-dimensional coin betting with hints.
//!
//! The bettor starts with wealth `ε` and each round stakes the signed
//! fraction `v_t` of its current wealth, so it plays `w_t = v_t · Wealth_{t−1}`
//! and ends the round with `Wealth_t = Wealth_{t−1}(1 − g_t v_t)`. Because
//! the hint `h_t ≥ |g_t|` is known before betting, clipping `v_t` to
//! `[−1/(2h_t), 1/(2h_t)]` keeps every multiplicative factor inside
//! `[1/2, 3/2]` and the wealth strictly positive.
//!
//! The fraction itself is chosen by Online Newton Step on the exp-concave
//! losses `v ↦ −ln(1 − g_t v)`, over the shrinking intervals
//! `[−1/(2h_t), 1/(2h_t)]`, with `β = (2 − ln 3)/2` and `τ = 4α`.

use crate::error::{positive, Error, Result};
use crate::game::{HintedLearner, Probe};
use crate::vector::{Gradient, Point};

pub const DEFAULT_EPSILON: f64 = 1.0;
pub const DEFAULT_ALPHA: f64 = 1.0;

/// The ONS step multiplier `1/β = 2/(2 − ln 3)`.
pub fn ons_gain() -> f64 {
    2.0 / (2.0 - 3f64.ln())
}

/// One round of the inner betting-fraction game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetRound {
    /// Fraction used to bet this round.
    pub v: f64,
    pub g: f64,
    /// `g / (1 − g v)`, the derivative of `−ln(1 − g v)` at `v`.
    pub z: f64,
}

/// Per-round `(v_t, g_t, z_t)` triples of the inner ONS game, kept for oracle
/// comparison.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BettingLossTrace {
    rounds: Vec<BetRound>,
}

impl BettingLossTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: f64, g: f64) {
        self.rounds.push(BetRound {
            v,
            g,
            z: g / (1.0 - g * v),
        });
    }

    pub fn rounds(&self) -> &[BetRound] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn sum_g_sq(&self) -> f64 {
        self.rounds.iter().map(|r| r.g * r.g).sum()
    }

    /// Cumulative loss `Σ −ln(1 − g_t v)` of betting the fixed fraction `v`,
    /// or `None` when `v` leaves the domain for some round.
    pub fn fixed_fraction_loss(&self, v: f64) -> Option<f64> {
        let mut total = 0.0;
        for r in &self.rounds {
            let factor = 1.0 - r.g * v;
            if factor <= 0.0 {
                return None;
            }
            total -= factor.ln();
        }
        Some(total)
    }
}

/// Regret of the inner ONS game against the fixed fraction `v_ref`:
/// `Σ_t [−ln(1 − g_t v_t) + ln(1 − g_t v_ref)]`.
pub fn ons_inner_regret(trace: &BettingLossTrace, v_ref: f64) -> Result<f64> {
    let mut total = 0.0;
    for r in trace.rounds() {
        let reference = 1.0 - r.g * v_ref;
        if reference <= 0.0 {
            return Err(Error::OutsideDomain { v: v_ref, g: r.g });
        }
        total += reference.ln() - (1.0 - r.g * r.v).ln();
    }
    Ok(total)
}

/// Upper bound on the inner ONS regret against any fraction in the final
/// interval: `α/(4h_T²) + 4.5 · ln((α + Σg²)/α)`.
pub fn ons_regret_bound(alpha: f64, final_hint: f64, sum_g_sq: f64) -> f64 {
    alpha / (4.0 * final_hint * final_hint) + 4.5 * (sum_g_sq / alpha).ln_1p()
}

/// The coin-betting learner driven by ONS over shrinking domains.
#[derive(Debug, Clone)]
pub struct OnsBettor {
    epsilon: f64,
    alpha: f64,
    wealth: f64,
    log_wealth: f64,
    v: f64,
    accumulator: f64,
    hint: f64,
    rounds: usize,
    clip_scale: f64,
    trace: Option<BettingLossTrace>,
}

impl OnsBettor {
    pub fn new(epsilon: f64, alpha: f64, first_hint: f64) -> Result<Self> {
        let epsilon = positive("epsilon", epsilon)?;
        let alpha = positive("alpha", alpha)?;
        let hint = positive("hint", first_hint)?;
        Ok(Self {
            epsilon,
            alpha,
            wealth: epsilon,
            log_wealth: epsilon.ln(),
            v: 0.0,
            accumulator: 4.0 * alpha,
            hint,
            rounds: 0,
            clip_scale: 1.0,
            trace: None,
        })
    }

    /// `ε = 1`, `α = 1`.
    pub fn with_hint(first_hint: f64) -> Result<Self> {
        Self::new(DEFAULT_EPSILON, DEFAULT_ALPHA, first_hint)
    }

    /// Keep a [`BettingLossTrace`] of every update.
    pub fn recording(mut self) -> Self {
        self.trace = Some(BettingLossTrace::new());
        self
    }

    /// Widens the clip interval by `scale`. Only exists so the verification
    /// suite can demonstrate that it catches a broken clip.
    #[doc(hidden)]
    pub fn with_clip_scale(mut self, scale: f64) -> Self {
        self.clip_scale = scale;
        self
    }

    /// The bet `w_t = v_t · Wealth_{t−1}`.
    ///
    /// Against a stream the bettor keeps winning, wealth grows like `1.5^t`
    /// and leaves the `f64` range after a couple of thousand rounds; the bet
    /// is then infinite. The fraction update never reads the wealth, so the
    /// learner itself keeps going and [`log_wealth`](Self::log_wealth) stays
    /// exact.
    pub fn bet(&self) -> f64 {
        if self.v == 0.0 {
            0.0
        } else {
            self.v * self.wealth
        }
    }

    /// Absorbs `g_t` (with `|g_t| ≤ h_t`) and the next hint `h_{t+1} ≥ h_t`.
    pub fn update_scalar(&mut self, g: f64, next_hint: f64) -> Result<()> {
        if !g.is_finite() {
            return Err(Error::NonFinite {
                what: "gradient",
                round: self.rounds + 1,
            });
        }
        if g.abs() > self.hint {
            return Err(Error::HintViolated {
                grad: g.abs(),
                hint: self.hint,
            });
        }
        let next_hint = positive("hint", next_hint)?;
        if next_hint < self.hint {
            return Err(Error::HintDecreased {
                current: self.hint,
                next: next_hint,
            });
        }

        // Wealth_{t−1} − g_t w_t, written multiplicatively so that an
        // overflowed wealth stays infinite instead of turning into NaN.
        let factor = 1.0 - g * self.v;
        self.wealth *= factor;
        self.log_wealth += factor.ln();
        let z = g / factor;
        if let Some(trace) = self.trace.as_mut() {
            trace.push(self.v, g);
        }
        self.accumulator += z * z;
        let radius = self.clip_scale / (2.0 * next_hint);
        let step = self.v - ons_gain() * z / self.accumulator;
        self.v = step.min(radius).max(-radius);
        self.hint = next_hint;
        self.rounds += 1;
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn wealth(&self) -> f64 {
        self.wealth
    }

    /// `ln ε + Σ ln(1 − g_i v_i)`; finite even when [`wealth`](Self::wealth)
    /// has overflowed or underflowed.
    pub fn log_wealth(&self) -> f64 {
        self.log_wealth
    }

    /// The betting fraction for the coming round.
    pub fn fraction(&self) -> f64 {
        self.v
    }

    /// `A_t = 4α + Σ z_i²`.
    pub fn accumulator(&self) -> f64 {
        self.accumulator
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn trace(&self) -> Option<&BettingLossTrace> {
        self.trace.as_ref()
    }
}

impl HintedLearner for OnsBettor {
    fn dim(&self) -> usize {
        1
    }

    fn hint(&self) -> f64 {
        self.hint
    }

    fn predict(&mut self) -> Point {
        Point::scalar(self.bet())
    }

    fn update(&mut self, grad: &Gradient, next_hint: f64) -> Result<()> {
        grad.check_dim(1)?;
        self.update_scalar(grad.first(), next_hint)
    }

    fn probe(&self) -> Probe {
        Probe {
            hint: Some(self.hint),
            barrier: None,
            wealth: Some(self.wealth),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_examples() {
        let b = OnsBettor::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!((b.wealth(), b.fraction(), b.accumulator()), (1.0, 0.0, 4.0));
        assert_eq!(b.rounds(), 0);

        let b = OnsBettor::new(1.0, 10.0, 0.5).unwrap();
        assert_eq!(b.accumulator(), 40.0);
        assert_eq!(1.0 / (2.0 * b.hint()), 1.0);

        assert!(OnsBettor::new(0.0, 1.0, 1.0).is_err());
        assert!(OnsBettor::new(1.0, -1.0, 1.0).is_err());
        assert!(OnsBettor::new(1.0, 1.0, 0.0).is_err());
        assert!(OnsBettor::new(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn bet_is_fraction_times_wealth() {
        let mut b = OnsBettor::new(2.0, 1.0, 1.0).unwrap();
        assert_eq!(b.bet(), 0.0);
        b.v = -0.25;
        assert_eq!(b.bet(), -0.5);
        b.v = 0.5;
        b.wealth = 1.0;
        assert_eq!(b.bet(), 0.5);
        b.v = 0.0;
        b.wealth = f64::INFINITY;
        assert_eq!(b.bet(), 0.0);
        b.v = 0.5;
        b.wealth = 1.0;
        assert_eq!(b.bet(), 0.5);
    }

    #[test]
    fn zero_gradient_changes_nothing() {
        let mut b = OnsBettor::new(1.0, 1.0, 1.0).unwrap();
        b.update_scalar(1.0, 1.0).unwrap();
        let (wealth, v, a) = (b.wealth(), b.fraction(), b.accumulator());
        b.update_scalar(0.0, 1.0).unwrap();
        assert_eq!((b.wealth(), b.fraction(), b.accumulator()), (wealth, v, a));
    }

    #[test]
    fn first_update_by_hand() {
        let gain = 2.0 / (2.0 - 3f64.ln());
        let mut b = OnsBettor::new(1.0, 1.0, 1.0).unwrap();
        b.update_scalar(1.0, 1.0).unwrap();
        assert_eq!(b.wealth(), 1.0);
        assert_eq!(b.accumulator(), 5.0);
        assert!((b.fraction() - (-gain / 5.0)).abs() < 1e-15);
        assert!((b.fraction() - (-0.443760)).abs() < 1e-6);

        let mut b = OnsBettor::new(1.0, 1.0, 1.0).unwrap();
        b.update_scalar(1.0, 10.0).unwrap();
        assert_eq!(b.fraction(), -0.05);
    }

    #[test]
    fn log_wealth_survives_overflow() {
        let mut b = OnsBettor::with_hint(1.0).unwrap();
        for _ in 0..3000 {
            b.update_scalar(1.0, 1.0).unwrap();
        }
        assert_eq!(b.wealth(), f64::INFINITY);
        assert_eq!(b.bet(), f64::NEG_INFINITY);
        assert!(b.log_wealth().is_finite() && b.log_wealth() > 1000.0);
        assert!((b.fraction() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn hint_contract_enforced() {
        let mut b = OnsBettor::new(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            b.update_scalar(1.5, 2.0),
            Err(Error::HintViolated { .. })
        ));
        assert!(matches!(
            b.update_scalar(0.5, 0.9),
            Err(Error::HintDecreased { .. })
        ));
        assert_eq!(b.rounds(), 0);
    }

    #[test]
    fn inner_regret_examples() {
        let empty = BettingLossTrace::new();
        assert_eq!(ons_inner_regret(&empty, 0.3).unwrap(), 0.0);

        let mut trace = BettingLossTrace::new();
        trace.push(0.2, 0.7);
        assert_eq!(ons_inner_regret(&trace, 0.2).unwrap(), 0.0);

        let mut trace = BettingLossTrace::new();
        trace.push(0.0, 1.0);
        let r = ons_inner_regret(&trace, 0.25).unwrap();
        assert!((r - 0.75f64.ln()).abs() < 1e-15);
        assert!((r + 0.28768).abs() < 1e-5);

        assert!(matches!(
            ons_inner_regret(&trace, 1.0),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn regret_bound_examples() {
        assert_eq!(ons_regret_bound(1.0, 1.0, 0.0), 0.25);
        let e = std::f64::consts::E;
        assert!((ons_regret_bound(1.0, 1.0, e - 1.0) - 4.75).abs() < 1e-12);
        assert_eq!(ons_regret_bound(4.0, 2.0, 0.0), 0.25);
    }

    #[test]
    fn trace_records_pre_update_fraction() {
        let mut b = OnsBettor::new(1.0, 1.0, 1.0).unwrap().recording();
        b.update_scalar(1.0, 1.0).unwrap();
        let v1 = b.fraction();
        b.update_scalar(-0.5, 1.0).unwrap();
        let rounds = b.trace().unwrap().rounds();
        assert_eq!(rounds[0], BetRound { v: 0.0, g: 1.0, z: 1.0 });
        assert_eq!(rounds[1].v, v1);
        assert_eq!(rounds[1].z, -0.5 / (1.0 + 0.5 * v1));
    }
}
