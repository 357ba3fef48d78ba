use crate::coin_betting::{OnsBettor, DEFAULT_ALPHA, DEFAULT_EPSILON};
use crate::error::{positive, Error, Result};
use crate::game::{HintedLearner, Learner, Probe};
use crate::vector::{Gradient, Point};

use super::{leash_project, surrogate_grad, truncate_scalar};

/// How the artificial-constraint radius evolves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BarrierRule {
    /// `B_{t+1} = k (Σ_{i≤t}|g_i| / G_t)^p`, and 0 while every gradient so far
    /// has been zero.
    Growing { k: f64, p: f64 },
    /// `B_t = D` every round.
    Fixed(f64),
}

impl BarrierRule {
    fn initial(&self) -> f64 {
        match *self {
            BarrierRule::Growing { .. } => 0.0,
            BarrierRule::Fixed(d) => d,
        }
    }

    /// Radius for the next round given `Σ|g_i|` and `G_t` so far.
    pub fn radius(&self, sum_abs: f64, max_grad: f64) -> f64 {
        match *self {
            BarrierRule::Growing { k, p } => {
                if max_grad > 0.0 {
                    k * (sum_abs / max_grad).powf(p)
                } else {
                    0.0
                }
            }
            BarrierRule::Fixed(d) => d,
        }
    }
}

/// Parameters of the default Leashed stack (Leashed over [`OnsBettor`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeashParams {
    pub k: f64,
    pub p: f64,
    /// Initial hint `𝔤`.
    pub g0: f64,
    pub epsilon: f64,
    pub alpha: f64,
}

impl Default for LeashParams {
    fn default() -> Self {
        Self {
            k: 1.0,
            p: 0.5,
            g0: 1.0,
            epsilon: DEFAULT_EPSILON,
            alpha: DEFAULT_ALPHA,
        }
    }
}

impl LeashParams {
    pub fn validate(&self) -> Result<()> {
        positive("k", self.k)?;
        positive("g0", self.g0)?;
        positive("epsilon", self.epsilon)?;
        positive("alpha", self.alpha)?;
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: self.p,
                reason: "must lie in (0, 1]",
            });
        }
        Ok(())
    }

    pub fn bettor(&self) -> Result<OnsBettor> {
        OnsBettor::new(self.epsilon, self.alpha, self.g0)
    }
}

/// One-dimensional learner that truncates overshooting gradients and keeps
/// its plays inside `[−B_t, B_t]`.
///
/// The inner learner proposes `w_t`; the played point is its projection onto
/// the interval. The inner learner is then fed a subgradient of the surrogate
/// loss `½(g^trunc w + |g^trunc| max(0, |w| − B_t))` at its own unprojected
/// `w_t`, which charges it for straying outside.
#[derive(Debug, Clone)]
pub struct Leashed<H> {
    inner: H,
    rule: BarrierRule,
    hint: f64,
    max_grad: f64,
    sum_abs: f64,
    barrier: f64,
    proposed: Option<f64>,
}

impl<H: HintedLearner> Leashed<H> {
    pub fn new(inner: H, rule: BarrierRule) -> Result<Self> {
        inner.dim().eq(&1).then_some(()).ok_or(Error::DimensionMismatch {
            expected: 1,
            got: inner.dim(),
        })?;
        match rule {
            BarrierRule::Growing { k, p } => {
                LeashParams {
                    k,
                    p,
                    ..LeashParams::default()
                }
                .validate()?;
            }
            BarrierRule::Fixed(d) => {
                positive("D", d)?;
            }
        }
        let hint = inner.hint();
        Ok(Self {
            inner,
            rule,
            hint,
            max_grad: 0.0,
            sum_abs: 0.0,
            barrier: rule.initial(),
            proposed: None,
        })
    }

    /// The radius `B_t` in force for the coming round.
    pub fn barrier(&self) -> f64 {
        self.barrier
    }

    pub fn hint(&self) -> f64 {
        self.hint
    }

    /// `G_t`, the largest `|g|` seen so far.
    pub fn max_grad(&self) -> f64 {
        self.max_grad
    }

    pub fn sum_abs(&self) -> f64 {
        self.sum_abs
    }

    pub fn rule(&self) -> BarrierRule {
        self.rule
    }

    pub fn inner(&self) -> &H {
        &self.inner
    }

    /// The inner learner's unprojected proposal for the current round.
    pub fn proposal(&mut self) -> f64 {
        match self.proposed {
            Some(w) => w,
            None => {
                let w = self.inner.predict().first();
                self.proposed = Some(w);
                w
            }
        }
    }

    pub fn predict_scalar(&mut self) -> f64 {
        let w = self.proposal();
        leash_project(w, self.barrier)
    }

    pub fn update_scalar(&mut self, g: f64) -> Result<()> {
        let proposed = self.proposal();
        let magnitude = g.abs();
        self.max_grad = self.max_grad.max(magnitude);
        self.sum_abs += magnitude;
        let next_hint = self.hint.max(magnitude);

        let g_trunc = truncate_scalar(g, self.hint);
        let g_surrogate = surrogate_grad(g_trunc, proposed, self.barrier);
        self.barrier = self.rule.radius(self.sum_abs, self.max_grad);

        self.inner.update(&Gradient::scalar(g_surrogate), next_hint)?;
        self.hint = next_hint;
        self.proposed = None;
        Ok(())
    }
}

impl Leashed<OnsBettor> {
    /// Leashed over the coin-betting learner with a growing barrier.
    pub fn ons(params: LeashParams) -> Result<Self> {
        params.validate()?;
        Self::new(
            params.bettor()?,
            BarrierRule::Growing {
                k: params.k,
                p: params.p,
            },
        )
    }
}

/// The bounded-diameter variant: truncation plus a constant radius `D`, so
/// every play satisfies `|w̃_t| ≤ D`.
pub fn fixed_diameter_wrap<H: HintedLearner>(inner: H, diameter: f64) -> Result<Leashed<H>> {
    Leashed::new(inner, BarrierRule::Fixed(diameter))
}

impl<H: HintedLearner> Learner for Leashed<H> {
    fn dim(&self) -> usize {
        1
    }

    fn predict(&mut self) -> Point {
        Point::scalar(self.predict_scalar())
    }

    fn update(&mut self, grad: &Gradient) -> Result<()> {
        grad.check_dim(1)?;
        self.update_scalar(grad.first())
    }

    fn probe(&self) -> Probe {
        Probe {
            hint: Some(self.hint),
            barrier: Some(self.barrier),
            wealth: self.inner.probe().wealth,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_barriers(stream: &[f64], k: f64, p: f64) -> Vec<f64> {
        let mut l = Leashed::ons(LeashParams {
            k,
            p,
            ..LeashParams::default()
        })
        .unwrap();
        let mut barriers = vec![l.barrier()];
        for &g in stream {
            l.predict_scalar();
            l.update_scalar(g).unwrap();
            barriers.push(l.barrier());
        }
        barriers
    }

    #[test]
    fn zero_stream_keeps_everything_at_origin() {
        let mut l = Leashed::ons(LeashParams::default()).unwrap();
        for _ in 0..50 {
            assert_eq!(l.predict_scalar(), 0.0);
            l.update_scalar(0.0).unwrap();
            assert_eq!(l.barrier(), 0.0);
        }
    }

    #[test]
    fn unit_stream_barrier_is_sqrt_t() {
        let b = run_barriers(&[1.0; 5], 1.0, 0.5);
        assert_eq!(b[0], 0.0);
        for t in 1..=5 {
            assert!((b[t] - (t as f64).sqrt()).abs() < 1e-15, "B_{} = {}", t + 1, b[t]);
        }
    }

    #[test]
    fn barrier_divides_by_current_max() {
        let b = run_barriers(&[1.0, 2.0], 1.0, 0.5);
        assert_eq!(b[1], 1.0);
        assert!((b[2] - 1.5f64.sqrt()).abs() < 1e-15);
        assert!((b[2] - 1.2247).abs() < 1e-4);
    }

    #[test]
    fn fixed_diameter_clamps_plays() {
        struct Proposer(f64);
        impl HintedLearner for Proposer {
            fn dim(&self) -> usize {
                1
            }
            fn hint(&self) -> f64 {
                1.0
            }
            fn predict(&mut self) -> Point {
                Point::scalar(self.0)
            }
            fn update(&mut self, _: &Gradient, _: f64) -> Result<()> {
                Ok(())
            }
        }
        let mut l = fixed_diameter_wrap(Proposer(5.0), 1.0).unwrap();
        assert_eq!(l.predict_scalar(), 1.0);
        let mut l = fixed_diameter_wrap(Proposer(0.3), 1.0).unwrap();
        assert_eq!(l.predict_scalar(), 0.3);
        l.update_scalar(0.0).unwrap();
        assert_eq!(l.barrier(), 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        for (k, p) in [(0.0, 0.5), (1.0, 0.0), (1.0, 1.5), (-1.0, 0.5)] {
            assert!(Leashed::ons(LeashParams {
                k,
                p,
                ..LeashParams::default()
            })
            .is_err());
        }
        assert!(fixed_diameter_wrap(OnsBettor::with_hint(1.0).unwrap(), 0.0).is_err());
    }
}
