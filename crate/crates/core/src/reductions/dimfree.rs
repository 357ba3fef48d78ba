use crate::coin_betting::OnsBettor;
use crate::error::Result;
use crate::game::{Learner, Probe};
use crate::unit_ball::AdaGradBall;
use crate::vector::{inner_product, Gradient, Point};

use super::{LeashParams, Leashed};

/// Lifts a one-dimensional magnitude learner to `ℝ^d`.
///
/// Plays `w_t = x_t y_t` where `x_t ∈ ℝ` comes from the magnitude learner and
/// `y_t` (with `‖y_t‖ ≤ 1`) from the direction learner. The direction learner
/// sees the full gradient; the magnitude learner sees `s_t = ⟨g_t, y_t⟩`,
/// which satisfies `|s_t| ≤ ‖g_t‖`.
#[derive(Debug, Clone)]
pub struct DimFree<S = Leashed<OnsBettor>> {
    magnitude: S,
    direction: AdaGradBall,
    split: Option<(f64, Vec<f64>)>,
}

impl<S: Learner> DimFree<S> {
    pub fn new(magnitude: S, dim: usize) -> Self {
        assert_eq!(magnitude.dim(), 1, "magnitude learner must be one-dimensional");
        Self {
            magnitude,
            direction: AdaGradBall::new(dim),
            split: None,
        }
    }

    /// `(x_t, y_t)` for the current round.
    pub fn split(&mut self) -> (f64, &[f64]) {
        if self.split.is_none() {
            let x = self.magnitude.predict().first();
            let y = self.direction.predict().into_vec();
            self.split = Some((x, y));
        }
        let (x, y) = self.split.as_ref().expect("split was just filled");
        (*x, y)
    }

    pub fn magnitude(&self) -> &S {
        &self.magnitude
    }

    pub fn direction(&self) -> &AdaGradBall {
        &self.direction
    }
}

impl DimFree<Leashed<OnsBettor>> {
    pub fn leashed(params: LeashParams, dim: usize) -> Result<Self> {
        Ok(Self::new(Leashed::ons(params)?, dim))
    }
}

impl<S: Learner> Learner for DimFree<S> {
    fn dim(&self) -> usize {
        self.direction.dim()
    }

    fn predict(&mut self) -> Point {
        let (x, y) = self.split();
        Point::from_vec(y.iter().map(|yi| x * yi).collect())
    }

    fn update(&mut self, grad: &Gradient) -> Result<()> {
        grad.check_dim(self.dim())?;
        self.split();
        let (_, y) = self.split.take().expect("split filled above");
        let s = inner_product(grad.as_slice(), &y);
        self.direction.update(grad)?;
        self.magnitude.update(&Gradient::scalar(s))
    }

    fn probe(&self) -> Probe {
        self.magnitude.probe()
    }
}
