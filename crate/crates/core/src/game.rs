//! The online linear optimization protocol and its regret accounting.
//!
//! Each round the learner commits to a point `w_t`, the adversary (which may
//! look at `w_t` and the history) answers with a gradient `g_t`, and the
//! learner is charged `⟨g_t, w_t⟩`. [`RegretLedger`] keeps the full trace plus
//! the running statistics every bound in this crate is expressed in.

use crate::error::{Error, Result};
use crate::vector::{Gradient, Point};

/// Internal state a learner exposes for traces. Fields that make no sense for
/// a given learner stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Probe {
    pub hint: Option<f64>,
    pub barrier: Option<f64>,
    pub wealth: Option<f64>,
}

/// A learner for the plain (hintless) game.
pub trait Learner {
    fn dim(&self) -> usize;

    /// The point for the current round. Calling it twice without an
    /// intervening [`Learner::update`] returns the same point.
    fn predict(&mut self) -> Point;

    fn update(&mut self, grad: &Gradient) -> Result<()>;

    fn probe(&self) -> Probe {
        Probe::default()
    }
}

/// A learner for the game with hints: before round `t` it knows `h_t` with
/// `‖g_t‖ ≤ h_t`, and hints never decrease.
pub trait HintedLearner {
    fn dim(&self) -> usize;

    /// The hint `h_t` in force for the current round.
    fn hint(&self) -> f64;

    fn predict(&mut self) -> Point;

    /// Delivers `g_t` (which must satisfy `‖g_t‖ ≤ h_t`) together with the
    /// next hint `h_{t+1} ≥ h_t`.
    fn update(&mut self, grad: &Gradient, next_hint: f64) -> Result<()>;

    fn probe(&self) -> Probe {
        Probe {
            hint: Some(self.hint()),
            ..Probe::default()
        }
    }
}

pub trait Adversary {
    fn dim(&self) -> usize;

    /// The gradient for round `round` (1-based), given everything played so
    /// far and the learner's current point.
    fn next_grad(&mut self, round: usize, history: &RegretLedger, played: &Point) -> Gradient;

    /// An a-priori bound on `‖g_round‖`, if the adversary can promise one.
    /// Hinted games draw their hints from here.
    fn envelope(&self, _round: usize) -> Option<f64> {
        None
    }

    fn name(&self) -> &'static str {
        "adversary"
    }
}

/// Adapts a closure `(round, played) -> gradient` into an [`Adversary`].
pub struct FnAdversary<F> {
    dim: usize,
    f: F,
}

impl<F> FnAdversary<F>
where
    F: FnMut(usize, &Point) -> Gradient,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Adversary for FnAdversary<F>
where
    F: FnMut(usize, &Point) -> Gradient,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn next_grad(&mut self, round: usize, _history: &RegretLedger, played: &Point) -> Gradient {
        (self.f)(round, played)
    }

    fn name(&self) -> &'static str {
        "closure"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: usize,
    pub played: Point,
    pub grad: Gradient,
    /// Hint in force when `played` was chosen; `None` for learners without
    /// hints (read as 0).
    pub hint_before: Option<f64>,
    /// Artificial-constraint radius in force when `played` was chosen.
    pub barrier: Option<f64>,
    /// Learner wealth after absorbing `grad`.
    pub wealth: Option<f64>,
}

impl RoundRecord {
    pub fn new(t: usize, played: Point, grad: Gradient) -> Self {
        Self {
            t,
            played,
            grad,
            hint_before: None,
            barrier: None,
            wealth: None,
        }
    }
}

/// Summary statistics of a trace. Kept incrementally by the ledger and
/// recomputable from its rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerStats {
    pub cum_loss: f64,
    pub grad_sum: Gradient,
    pub sum_norm: f64,
    pub sum_sq: f64,
    pub max_norm: f64,
    pub max_played_norm: f64,
}

impl LedgerStats {
    fn empty(dim: usize) -> Self {
        Self {
            cum_loss: 0.0,
            grad_sum: Gradient::zeros(dim),
            sum_norm: 0.0,
            sum_sq: 0.0,
            max_norm: 0.0,
            max_played_norm: 0.0,
        }
    }

    fn absorb(&mut self, played: &Point, grad: &Gradient) {
        let norm = grad.norm();
        self.cum_loss += grad.dot(played);
        let sum: Vec<f64> = self
            .grad_sum
            .as_slice()
            .iter()
            .zip(grad.as_slice())
            .map(|(s, g)| s + g)
            .collect();
        self.grad_sum = Gradient::from_vec(sum);
        self.sum_norm += norm;
        self.sum_sq += norm * norm;
        self.max_norm = self.max_norm.max(norm);
        self.max_played_norm = self.max_played_norm.max(played.norm());
    }
}

#[derive(Debug, Clone)]
pub struct RegretLedger {
    dim: usize,
    rounds: Vec<RoundRecord>,
    stats: LedgerStats,
}

impl RegretLedger {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rounds: Vec::new(),
            stats: LedgerStats::empty(dim),
        }
    }

    pub fn push(&mut self, record: RoundRecord) -> Result<()> {
        record.played.check_dim(self.dim)?;
        record.grad.check_dim(self.dim)?;
        if let Some(last) = self.rounds.last() {
            assert!(record.t > last.t, "round indices must increase");
        }
        self.stats.absorb(&record.played, &record.grad);
        self.rounds.push(record);
        Ok(())
    }

    /// `Σ_t ⟨g_t, w_t − ẘ⟩`.
    pub fn regret(&self, comparator: &Point) -> Result<f64> {
        comparator.check_dim(self.dim)?;
        Ok(self.stats.cum_loss - self.stats.grad_sum.dot(comparator))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn rounds(&self) -> &[RoundRecord] {
        &self.rounds
    }

    pub fn stats(&self) -> &LedgerStats {
        &self.stats
    }

    pub fn cum_loss(&self) -> f64 {
        self.stats.cum_loss
    }

    pub fn grad_sum(&self) -> &Gradient {
        &self.stats.grad_sum
    }

    pub fn sum_norm(&self) -> f64 {
        self.stats.sum_norm
    }

    pub fn sum_sq(&self) -> f64 {
        self.stats.sum_sq
    }

    pub fn max_norm(&self) -> f64 {
        self.stats.max_norm
    }

    pub fn max_played_norm(&self) -> f64 {
        self.stats.max_played_norm
    }

    /// Recomputes the summary statistics from scratch over the stored rounds.
    pub fn recompute(&self) -> LedgerStats {
        let mut stats = LedgerStats::empty(self.dim);
        for r in &self.rounds {
            stats.absorb(&r.played, &r.grad);
        }
        stats
    }
}

fn check_round(round: usize, point: &Point, grad: &Gradient) -> Result<()> {
    if !point.is_finite() {
        return Err(Error::NonFinite {
            what: "point",
            round,
        });
    }
    if !grad.is_finite() {
        return Err(Error::NonFinite {
            what: "gradient",
            round,
        });
    }
    Ok(())
}

fn check_dims(learner: usize, adversary: usize) -> Result<()> {
    if learner != adversary {
        return Err(Error::DimensionMismatch {
            expected: learner,
            got: adversary,
        });
    }
    Ok(())
}

/// Plays `rounds` rounds of the hintless game.
pub fn run_game<L, A>(learner: &mut L, adversary: &mut A, rounds: usize) -> Result<RegretLedger>
where
    L: Learner + ?Sized,
    A: Adversary + ?Sized,
{
    if rounds == 0 {
        return Err(Error::EmptyGame);
    }
    check_dims(learner.dim(), adversary.dim())?;
    let mut ledger = RegretLedger::new(learner.dim());
    for t in 1..=rounds {
        let w = learner.predict();
        let before = learner.probe();
        let g = adversary.next_grad(t, &ledger, &w);
        check_round(t, &w, &g)?;
        learner.update(&g)?;
        let after = learner.probe();
        ledger.push(RoundRecord {
            t,
            played: w,
            grad: g,
            hint_before: before.hint,
            barrier: before.barrier,
            wealth: after.wealth,
        })?;
    }
    Ok(ledger)
}

/// Plays the game with hints, drawing `h_t` from the adversary's declared
/// envelope. The learner must have been built with a first hint at least
/// `envelope(1)`; later hints are the running maximum of the envelope.
pub fn run_hinted_game<L, A>(
    learner: &mut L,
    adversary: &mut A,
    rounds: usize,
) -> Result<RegretLedger>
where
    L: HintedLearner + ?Sized,
    A: Adversary + ?Sized,
{
    if rounds == 0 {
        return Err(Error::EmptyGame);
    }
    check_dims(learner.dim(), adversary.dim())?;
    let mut ledger = RegretLedger::new(learner.dim());
    for t in 1..=rounds {
        let envelope = adversary
            .envelope(t)
            .ok_or(Error::NoEnvelope(adversary.name()))?;
        if envelope > learner.hint() {
            return Err(Error::HintViolated {
                grad: envelope,
                hint: learner.hint(),
            });
        }
        let w = learner.predict();
        let before = learner.probe();
        let g = adversary.next_grad(t, &ledger, &w);
        check_round(t, &w, &g)?;
        let next = adversary
            .envelope(t + 1)
            .ok_or(Error::NoEnvelope(adversary.name()))?;
        learner.update(&g, learner.hint().max(next))?;
        let after = learner.probe();
        ledger.push(RoundRecord {
            t,
            played: w,
            grad: g,
            hint_before: before.hint,
            barrier: before.barrier,
            wealth: after.wealth,
        })?;
    }
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(Point);

    impl Learner for Fixed {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn predict(&mut self) -> Point {
            self.0.clone()
        }
        fn update(&mut self, _grad: &Gradient) -> Result<()> {
            Ok(())
        }
    }

    fn ledger_1d(rounds: &[(f64, f64)]) -> RegretLedger {
        let mut ledger = RegretLedger::new(1);
        for (i, &(w, g)) in rounds.iter().enumerate() {
            ledger
                .push(RoundRecord::new(i + 1, w.into(), g.into()))
                .unwrap();
        }
        ledger
    }

    #[test]
    fn empty_ledger_has_zero_regret() {
        let ledger = RegretLedger::new(3);
        assert_eq!(ledger.regret(&Point::from_vec(vec![5.0, -1.0, 2.0])).unwrap(), 0.0);
    }

    #[test]
    fn regret_by_hand() {
        let ledger = ledger_1d(&[(2.0, 1.0), (-1.0, 1.0)]);
        assert_eq!(ledger.regret(&0.0.into()).unwrap(), 1.0);
        assert_eq!(ledger.regret(&3.0.into()).unwrap(), -5.0);
    }

    #[test]
    fn regret_rejects_wrong_dimension() {
        let ledger = ledger_1d(&[(1.0, 1.0)]);
        assert_eq!(
            ledger.regret(&Point::zeros(2)),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        );
    }

    #[test]
    fn zero_adversary_costs_nothing() {
        let mut learner = Fixed(Point::from_vec(vec![3.0, -4.0]));
        let mut adv = FnAdversary::new(2, |_, _| Gradient::zeros(2));
        let ledger = run_game(&mut learner, &mut adv, 100).unwrap();
        assert_eq!(ledger.len(), 100);
        assert_eq!(ledger.cum_loss(), 0.0);
        assert_eq!(ledger.max_played_norm(), 5.0);
    }

    #[test]
    fn constant_adversary_against_origin() {
        let mut learner = Fixed(0.0.into());
        let mut adv = FnAdversary::new(1, |_, _| 1.0.into());
        let ledger = run_game(&mut learner, &mut adv, 10).unwrap();
        assert_eq!(ledger.regret(&0.0.into()).unwrap(), 0.0);
        assert_eq!(ledger.regret(&(-1.0).into()).unwrap(), 10.0);
    }

    #[test]
    fn zero_rounds_rejected() {
        let mut learner = Fixed(0.0.into());
        let mut adv = FnAdversary::new(1, |_, _| 1.0.into());
        assert_eq!(run_game(&mut learner, &mut adv, 0).unwrap_err(), Error::EmptyGame);
    }

    #[test]
    fn non_finite_gradient_names_round() {
        let mut learner = Fixed(0.0.into());
        let mut adv = FnAdversary::new(1, |t, _| {
            if t == 7 {
                f64::NAN.into()
            } else {
                1.0.into()
            }
        });
        assert_eq!(
            run_game(&mut learner, &mut adv, 10).unwrap_err(),
            Error::NonFinite {
                what: "gradient",
                round: 7
            }
        );
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let mut learner = Fixed(0.0.into());
        let mut adv = FnAdversary::new(2, |_, _| Gradient::zeros(2));
        assert!(matches!(
            run_game(&mut learner, &mut adv, 3),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
