//! Wrappers that turn the hint-consuming bettor into a learner for the plain
//! game.
//!
//! * [`Truncating`] fabricates hints from the largest gradient seen so far and
//!   shrinks any gradient that overshoots its hint.
//! * [`Leashed`] does the same and additionally confines its plays to a
//!   data-dependent interval `[−B_t, B_t]` that grows with `Σ|g_i| / G_t`.
//!   With a constant radius it becomes the bounded-diameter learner
//!   ([`fixed_diameter_wrap`]).
//! * [`DimFree`] lifts any one-dimensional learner to `ℝ^d` by pairing it with
//!   a unit-ball direction learner.

mod dimfree;
mod leashed;
mod truncation;

pub use dimfree::DimFree;
pub use leashed::{fixed_diameter_wrap, BarrierRule, LeashParams, Leashed};
pub use truncation::Truncating;

use crate::vector::{euclidean_norm, Gradient};

/// Shrinks `g` to norm `hint` when `‖g‖ ≥ hint`; smaller gradients pass
/// through. The result never has norm above `hint`.
pub fn truncate(g: &Gradient, hint: f64) -> Gradient {
    Gradient::from_vec(truncate_coords(g.as_slice(), hint))
}

pub fn truncate_scalar(g: f64, hint: f64) -> f64 {
    if g.abs() >= hint {
        hint.copysign(g)
    } else {
        g
    }
}

fn truncate_coords(g: &[f64], hint: f64) -> Vec<f64> {
    if let [x] = g {
        return vec![truncate_scalar(*x, hint)];
    }
    let norm = euclidean_norm(g);
    if norm < hint {
        return g.to_vec();
    }
    let mut scale = hint / norm;
    loop {
        let out: Vec<f64> = g.iter().map(|x| x * scale).collect();
        if euclidean_norm(&out) <= hint {
            return out;
        }
        // Rounding pushed the norm a hair above the hint.
        scale *= 1.0 - f64::EPSILON;
    }
}

/// Projects `w` onto `[−B, B]`. `sign(0)` is taken as 0.
pub fn leash_project(w: f64, barrier: f64) -> f64 {
    if w.abs() >= barrier {
        barrier * sign(w)
    } else {
        w
    }
}

/// A subgradient at `w` of `ℓ̃(x) = ½(g x + |g| max(0, |x| − B))`. At the
/// kink `|w| = B` the inactive side is taken, so `|result| ≤ |g|` always.
pub fn surrogate_grad(g_trunc: f64, w: f64, barrier: f64) -> f64 {
    let outside = if w.abs() > barrier { 1.0 } else { 0.0 };
    0.5 * (g_trunc + g_trunc.abs() * sign(w) * outside)
}

/// The surrogate loss itself.
pub fn surrogate_loss(g_trunc: f64, w: f64, barrier: f64) -> f64 {
    0.5 * (g_trunc * w + g_trunc.abs() * (w.abs() - barrier).max(0.0))
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}
