//! Adaptive projected gradient descent on the Euclidean unit ball.
//!
//! Step size `η_t = λ / √(Σ_{i≤t} ‖g_i‖²)`, followed by projection back onto
//! the ball. With `λ = √2` the regret against any point of the ball is at
//! most `2^{3/2} √(Σ‖g_t‖²)`.

use std::f64::consts::SQRT_2;

use crate::error::{positive, Result};
use crate::game::Learner;
use crate::vector::{euclidean_norm, Gradient, Point};

#[derive(Debug, Clone)]
pub struct AdaGradBall {
    w: Vec<f64>,
    sum_sq: f64,
    lambda: f64,
}

impl AdaGradBall {
    /// Starts at the origin with `λ = √2`.
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "unit ball needs at least one dimension");
        Self {
            w: vec![0.0; dim],
            sum_sq: 0.0,
            lambda: SQRT_2,
        }
    }

    pub fn with_lambda(dim: usize, lambda: f64) -> Result<Self> {
        let mut ball = Self::new(dim);
        ball.lambda = positive("lambda", lambda)?;
        Ok(ball)
    }

    pub fn position(&self) -> &[f64] {
        &self.w
    }

    pub fn sum_sq(&self) -> f64 {
        self.sum_sq
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// One step on `g`. A zero gradient with no history leaves `w` alone, as
    /// `η` is undefined there.
    pub fn step(&mut self, g: &[f64]) {
        debug_assert_eq!(g.len(), self.w.len());
        let norm = euclidean_norm(g);
        self.sum_sq += norm * norm;
        if self.sum_sq <= 0.0 {
            return;
        }
        let eta = self.lambda / self.sum_sq.sqrt();
        for (w, g) in self.w.iter_mut().zip(g) {
            *w -= eta * g;
        }
        project_to_unit_ball(&mut self.w);
    }
}

/// Rescales `x` onto the unit sphere if it lies outside the ball. The result
/// always has norm at most 1, rounding included.
pub fn project_to_unit_ball(x: &mut [f64]) {
    let mut norm = euclidean_norm(x);
    while norm > 1.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
        norm = euclidean_norm(x);
    }
}

/// `2^{3/2} · √(Σ‖g_t‖²)`.
pub fn ball_regret_bound(sum_sq: f64) -> f64 {
    2f64.powf(1.5) * sum_sq.sqrt()
}

impl Learner for AdaGradBall {
    fn dim(&self) -> usize {
        self.w.len()
    }

    fn predict(&mut self) -> Point {
        Point::from_vec(self.w.clone())
    }

    fn update(&mut self, grad: &Gradient) -> Result<()> {
        grad.check_dim(self.w.len())?;
        self.step(grad.as_slice());
        Ok(())
    }
}
