//! Deterministic and seeded gradient streams.
//!
//! Random kinds use xoshiro256++ seeded through SplitMix64 (the
//! `seed_from_u64` of `rand_xoshiro`). A uniform draw is the top 20 bits of
//! one 64-bit output, `u = (x >> 44) · 2⁻²⁰`, so every generated value lies
//! on a dyadic grid and the stream is reproducible bit for bit in any
//! language. The same grid is applied to `growing` streams. Keeping values on
//! a coarse dyadic grid also means that multiplying a whole stream by a
//! moderate integer (say 1000) is exact in binary floating point, which the
//! scale-invariance checks rely on.

use std::fmt;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{positive, Error, Result};
use crate::game::{Adversary, RegretLedger};
use crate::vector::{Gradient, Point};

const GRID_BITS: u32 = 20;

fn grid_scale() -> f64 {
    (1u64 << GRID_BITS) as f64
}

/// Rounds `x` to the nearest multiple of 2⁻²⁰.
pub fn quantize(x: f64) -> f64 {
    (x * grid_scale()).round() / grid_scale()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdversaryKind {
    /// `scale · e₁`
    Constant,
    /// `(−1)^t · scale · e₁`
    Alternating,
    /// `scale · t^rate · e₁`; outgrows every fixed Lipschitz guess.
    Growing { rate: f64 },
    /// `scale · e₁`, except `magnitude · scale · e₁` every `period` rounds.
    Spike { period: usize, magnitude: f64 },
    /// Coordinates uniform on `[−1, 1)`, scaled by `scale/√d`.
    SeededUniform,
    /// Coordinates `±scale/√d` with fair random signs.
    SeededSigns,
    Zero,
    /// `scale · sign(⟨w_t, e₁⟩) · e₁` with `sign(0) = +1`: always charges the
    /// learner.
    AdaptiveSign,
}

impl AdversaryKind {
    /// One instance of every kind, with the default parameters for the
    /// parameterized ones.
    pub fn all() -> Vec<AdversaryKind> {
        vec![
            AdversaryKind::Constant,
            AdversaryKind::Alternating,
            AdversaryKind::Growing { rate: 0.5 },
            AdversaryKind::Spike {
                period: 100,
                magnitude: 10.0,
            },
            AdversaryKind::SeededUniform,
            AdversaryKind::SeededSigns,
            AdversaryKind::Zero,
            AdversaryKind::AdaptiveSign,
        ]
    }

    pub fn label(&self) -> &'static str {
        match self {
            AdversaryKind::Constant => "constant",
            AdversaryKind::Alternating => "alternating",
            AdversaryKind::Growing { .. } => "growing",
            AdversaryKind::Spike { .. } => "spike",
            AdversaryKind::SeededUniform => "seeded_uniform",
            AdversaryKind::SeededSigns => "seeded_signs",
            AdversaryKind::Zero => "zero",
            AdversaryKind::AdaptiveSign => "adaptive_sign",
        }
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversaryKind::Growing { rate } => write!(f, "growing:{rate}"),
            AdversaryKind::Spike { period, magnitude } => write!(f, "spike:{period}:{magnitude}"),
            other => f.write_str(other.label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("unknown adversary `{0}`; expected constant, alternating, growing[:rate], spike[:period[:magnitude]], seeded_uniform, seeded_signs, zero or adaptive_sign")]
pub struct ParseAdversaryError(String);

impl FromStr for AdversaryKind {
    type Err = ParseAdversaryError;

    /// Accepts the display form, e.g. `growing:0.5` or `spike:100:10`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseAdversaryError(s.to_string());
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let num = |i: usize, default: f64| -> Result<f64, ParseAdversaryError> {
            args.get(i).map_or(Ok(default), |a| a.parse().map_err(|_| err()))
        };
        let kind = match name {
            "constant" => AdversaryKind::Constant,
            "alternating" => AdversaryKind::Alternating,
            "growing" => AdversaryKind::Growing { rate: num(0, 0.5)? },
            "spike" => AdversaryKind::Spike {
                period: args.first().map_or(Ok(100), |a| a.parse().map_err(|_| err()))?,
                magnitude: num(1, 10.0)?,
            },
            "seeded_uniform" => AdversaryKind::SeededUniform,
            "seeded_signs" => AdversaryKind::SeededSigns,
            "zero" => AdversaryKind::Zero,
            "adaptive_sign" => AdversaryKind::AdaptiveSign,
            _ => return Err(err()),
        };
        let max_args = match kind {
            AdversaryKind::Growing { .. } => 1,
            AdversaryKind::Spike { .. } => 2,
            _ => 0,
        };
        if args.len() > max_args {
            return Err(err());
        }
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversaryConfig {
    pub kind: AdversaryKind,
    /// Gradient scale; also the envelope for kinds with a constant envelope.
    pub scale: f64,
    pub dim: usize,
    pub seed: u64,
}

impl AdversaryConfig {
    pub fn new(kind: AdversaryKind, dim: usize) -> Self {
        Self {
            kind,
            scale: 1.0,
            dim,
            seed: 0,
        }
    }

    pub fn scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        positive("scale", self.scale)?;
        if self.dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        match self.kind {
            AdversaryKind::Growing { rate } if !(rate.is_finite() && rate >= 0.0) => {
                Err(Error::InvalidParameter {
                    name: "rate",
                    value: rate,
                    reason: "must be finite and nonnegative",
                })
            }
            AdversaryKind::Spike { period, magnitude } => {
                if period == 0 {
                    return Err(Error::InvalidParameter {
                        name: "period",
                        value: 0.0,
                        reason: "must be at least 1",
                    });
                }
                positive("magnitude", magnitude).map(|_| ())
            }
            _ => Ok(()),
        }
    }

    pub fn build(&self) -> Result<StreamAdversary> {
        self.validate()?;
        Ok(StreamAdversary {
            config: *self,
            rng: Xoshiro256PlusPlus::seed_from_u64(self.seed),
        })
    }

    /// Bound on `‖g_t‖` known before round `t`.
    pub fn envelope(&self, t: usize) -> f64 {
        match self.kind {
            AdversaryKind::Growing { rate } => self.scale * quantize((t as f64).powf(rate)),
            AdversaryKind::Spike { period, magnitude } if t % period == 0 => {
                self.scale * magnitude
            }
            _ => self.scale,
        }
    }
}

/// An [`Adversary`] generated from an [`AdversaryConfig`].
#[derive(Debug, Clone)]
pub struct StreamAdversary {
    config: AdversaryConfig,
    rng: Xoshiro256PlusPlus,
}

impl StreamAdversary {
    pub fn config(&self) -> &AdversaryConfig {
        &self.config
    }

    /// Uniform on the 2⁻²⁰ grid of `[0, 1)`.
    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> (64 - GRID_BITS)) as f64 / grid_scale()
    }

    fn coin(&mut self) -> f64 {
        if self.rng.next_u64() >> 63 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    fn spread(&mut self, mut draw: impl FnMut(&mut Self) -> f64) -> Gradient {
        let d = self.config.dim;
        let per_coord = if d == 1 {
            self.config.scale
        } else {
            self.config.scale / (d as f64).sqrt()
        };
        Gradient::from_vec((0..d).map(|_| per_coord * draw(self)).collect())
    }

    /// The gradient for round `t` given the learner's point.
    pub fn next_grad_at(&mut self, t: usize, played: &Point) -> Gradient {
        let AdversaryConfig { kind, scale, dim, .. } = self.config;
        match kind {
            AdversaryKind::Constant => Gradient::axis(dim, scale),
            AdversaryKind::Alternating => {
                let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
                Gradient::axis(dim, sign * scale)
            }
            AdversaryKind::Growing { .. } | AdversaryKind::Spike { .. } => {
                Gradient::axis(dim, self.config.envelope(t))
            }
            AdversaryKind::SeededUniform => self.spread(|s| 2.0 * s.uniform() - 1.0),
            AdversaryKind::SeededSigns => self.spread(Self::coin),
            AdversaryKind::Zero => Gradient::zeros(dim),
            AdversaryKind::AdaptiveSign => {
                let sign = if played.first() < 0.0 { -1.0 } else { 1.0 };
                Gradient::axis(dim, sign * scale)
            }
        }
    }
}

impl Adversary for StreamAdversary {
    fn dim(&self) -> usize {
        self.config.dim
    }

    fn next_grad(&mut self, round: usize, _history: &RegretLedger, played: &Point) -> Gradient {
        self.next_grad_at(round, played)
    }

    fn envelope(&self, round: usize) -> Option<f64> {
        Some(self.config.envelope(round))
    }

    fn name(&self) -> &'static str {
        self.config.kind.label()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grad(kind: AdversaryKind, t: usize) -> f64 {
        let mut adv = AdversaryConfig::new(kind, 1).build().unwrap();
        let mut last = 0.0;
        for s in 1..=t {
            last = adv.next_grad_at(s, &Point::scalar(0.0)).first();
        }
        last
    }

    #[test]
    fn deterministic_examples() {
        assert_eq!(grad(AdversaryKind::Zero, 5), 0.0);
        assert_eq!(grad(AdversaryKind::Alternating, 3), -1.0);
        assert_eq!(grad(AdversaryKind::Alternating, 4), 1.0);
        assert_eq!(grad(AdversaryKind::Growing { rate: 0.5 }, 4), 2.0);
        let spike = AdversaryKind::Spike {
            period: 3,
            magnitude: 5.0,
        };
        assert_eq!(grad(spike, 2), 1.0);
        assert_eq!(grad(spike, 3), 5.0);
    }

    #[test]
    fn adaptive_sign_follows_the_learner() {
        let mut adv = AdversaryConfig::new(AdversaryKind::AdaptiveSign, 2)
            .scale(3.0)
            .build()
            .unwrap();
        let g = adv.next_grad_at(1, &Point::from_vec(vec![-0.1, 5.0]));
        assert_eq!(g.as_slice(), &[-3.0, 0.0]);
        let g = adv.next_grad_at(2, &Point::zeros(2));
        assert_eq!(g.as_slice(), &[3.0, 0.0]);
    }

    #[test]
    fn seeded_streams_reproduce_and_respect_envelope() {
        for kind in [AdversaryKind::SeededUniform, AdversaryKind::SeededSigns] {
            for dim in [1, 3] {
                let cfg = AdversaryConfig::new(kind, dim).scale(2.5).seed(42);
                let mut a = cfg.build().unwrap();
                let mut b = cfg.build().unwrap();
                for t in 1..=500 {
                    let ga = a.next_grad_at(t, &Point::zeros(dim));
                    let gb = b.next_grad_at(t, &Point::zeros(dim));
                    assert_eq!(ga, gb);
                    assert!(ga.norm() <= 2.5 * (1.0 + 1e-15));
                }
            }
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = AdversaryConfig::new(AdversaryKind::SeededUniform, 1).seed(1).build().unwrap();
        let mut b = AdversaryConfig::new(AdversaryKind::SeededUniform, 1).seed(2).build().unwrap();
        let sa: Vec<f64> = (1..=20).map(|t| a.next_grad_at(t, &0.0.into()).first()).collect();
        let sb: Vec<f64> = (1..=20).map(|t| b.next_grad_at(t, &0.0.into()).first()).collect();
        assert_ne!(sa, sb);
    }

    #[test]
    fn parse_round_trips() {
        for kind in AdversaryKind::all() {
            assert_eq!(kind.to_string().parse::<AdversaryKind>().unwrap(), kind);
        }
        assert_eq!(
            "growing".parse::<AdversaryKind>().unwrap(),
            AdversaryKind::Growing { rate: 0.5 }
        );
        assert!("sideways".parse::<AdversaryKind>().is_err());
        assert!("constant:3".parse::<AdversaryKind>().is_err());
        assert!("growing:x".parse::<AdversaryKind>().is_err());
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(AdversaryConfig::new(AdversaryKind::Constant, 1).scale(0.0).build().is_err());
        assert!(AdversaryConfig::new(AdversaryKind::Constant, 0).build().is_err());
        let spike = AdversaryKind::Spike {
            period: 0,
            magnitude: 1.0,
        };
        assert!(AdversaryConfig::new(spike, 1).build().is_err());
        let growing = AdversaryKind::Growing { rate: -1.0 };
        assert!(AdversaryConfig::new(growing, 1).build().is_err());
    }
}
