use crate::error::Result;
use crate::game::{HintedLearner, Learner, Probe};
use crate::vector::{Gradient, Point};

use super::truncate;

/// Runs a hint-consuming learner without hints.
///
/// The hint for round `t` is `max(𝔤, max_{i<t} ‖g_i‖)`, where `𝔤` is the
/// inner learner's first hint. Whenever a gradient overshoots its hint the
/// inner learner sees the truncated gradient instead, so its hint contract
/// always holds.
#[derive(Debug, Clone)]
pub struct Truncating<H> {
    inner: H,
    hint: f64,
}

impl<H: HintedLearner> Truncating<H> {
    pub fn new(inner: H) -> Self {
        let hint = inner.hint();
        Self { inner, hint }
    }

    pub fn hint(&self) -> f64 {
        self.hint
    }

    pub fn inner(&self) -> &H {
        &self.inner
    }

    pub fn into_inner(self) -> H {
        self.inner
    }
}

impl<H: HintedLearner> Learner for Truncating<H> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn predict(&mut self) -> Point {
        self.inner.predict()
    }

    fn update(&mut self, grad: &Gradient) -> Result<()> {
        grad.check_dim(self.dim())?;
        let truncated = truncate(grad, self.hint);
        let next = self.hint.max(grad.norm());
        self.inner.update(&truncated, next)?;
        self.hint = next;
        Ok(())
    }

    fn probe(&self) -> Probe {
        Probe {
            hint: Some(self.hint),
            ..self.inner.probe()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    /// Records what it is fed; plays the origin.
    struct Spy {
        hint: f64,
        seen: Vec<(f64, f64)>,
    }

    impl HintedLearner for Spy {
        fn dim(&self) -> usize {
            1
        }
        fn hint(&self) -> f64 {
            self.hint
        }
        fn predict(&mut self) -> Point {
            Point::scalar(0.0)
        }
        fn update(&mut self, grad: &Gradient, next_hint: f64) -> Result<()> {
            if grad.norm() > self.hint {
                return Err(Error::HintViolated {
                    grad: grad.norm(),
                    hint: self.hint,
                });
            }
            self.seen.push((grad.first(), next_hint));
            self.hint = next_hint;
            Ok(())
        }
    }

    fn feed(stream: &[f64]) -> (Vec<(f64, f64)>, f64) {
        let mut wrapped = Truncating::new(Spy {
            hint: 1.0,
            seen: vec![],
        });
        for &g in stream {
            wrapped.predict();
            wrapped.update(&g.into()).unwrap();
        }
        let hint = wrapped.hint();
        (wrapped.into_inner().seen, hint)
    }

    #[test]
    fn small_gradients_untouched() {
        let (seen, hint) = feed(&[1.0, 1.0, 1.0]);
        assert_eq!(seen, vec![(1.0, 1.0); 3]);
        assert_eq!(hint, 1.0);
    }

    #[test]
    fn overshoot_is_truncated_then_hint_catches_up() {
        let (seen, hint) = feed(&[2.0, 2.0]);
        assert_eq!(seen, vec![(1.0, 2.0), (2.0, 2.0)]);
        assert_eq!(hint, 2.0);
    }

    #[test]
    fn zero_gradient_passes() {
        let (seen, hint) = feed(&[0.0]);
        assert_eq!(seen, vec![(0.0, 1.0)]);
        assert_eq!(hint, 1.0);
    }
}
