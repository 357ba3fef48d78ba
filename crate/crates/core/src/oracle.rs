//! Brute-force reference computations used to check the learners and bounds.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::coin_betting::BettingLossTrace;
use crate::vector::{Gradient, Point};

/// Default spacing of the betting-fraction grid.
pub const FRACTION_RESOLUTION: f64 = 1e-4;

/// Comparator magnitudes used by [`comparator_sweep`].
pub const SWEEP_MAGNITUDES: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

/// Random unit directions per magnitude in [`comparator_sweep`] for `d > 1`.
pub const RANDOM_DIRECTIONS: usize = 4;

/// The grid `{−r, −r + δ, …, r}` (endpoints always included) with
/// `r = 1/(2h)` as `(index → value, len)`.
fn fraction_grid(final_hint: f64, resolution: f64) -> (impl Fn(usize) -> f64, usize) {
    let r = 1.0 / (2.0 * final_hint);
    let steps = (2.0 * r / resolution).ceil() as usize;
    let value = move |i: usize| {
        if i >= steps {
            r
        } else {
            -r + i as f64 * resolution
        }
    };
    (value, steps + 1)
}

/// Whether the `(v, loss)` candidate `b` beats `a`; ties go to the smaller `|v|`.
fn better(a: (f64, f64), b: (f64, f64)) -> bool {
    b.1 < a.1 || (b.1 == a.1 && b.0.abs() < a.0.abs())
}

fn loss(trace: &BettingLossTrace, v: f64) -> f64 {
    trace.fixed_fraction_loss(v).unwrap_or(f64::INFINITY)
}

/// Minimizer of `Σ −ln(1 − g_t v)` over the grid of spacing `resolution` on
/// `[−1/(2h_T), 1/(2h_T)]`, scanning every grid point. Ties go to the
/// smallest `|v|`.
pub fn best_betting_fraction_exhaustive(trace: &BettingLossTrace, final_hint: f64, resolution: f64) -> f64 {
    let (value, len) = fraction_grid(final_hint, resolution);
    let mut best = (f64::NAN, f64::INFINITY);
    for i in 0..len {
        let v = value(i);
        let cand = (v, loss(trace, v));
        if best.0.is_nan() || better(best, cand) {
            best = cand;
        }
    }
    best.0
}

/// Same grid minimizer as [`best_betting_fraction_exhaustive`], found by
/// discrete ternary search. The loss is convex in `v`, so the search is exact
/// up to rounding in the loss evaluation; it costs `O(T log(1/δ))` instead of
/// `O(T/δ)`.
pub fn best_betting_fraction(trace: &BettingLossTrace, final_hint: f64, resolution: f64) -> f64 {
    let (value, len) = fraction_grid(final_hint, resolution);
    let f = |i: usize| loss(trace, value(i));
    let (mut lo, mut hi) = (0usize, len - 1);
    while hi - lo > 2 {
        let m1 = lo + (hi - lo) / 3;
        let m2 = hi - (hi - lo) / 3;
        let (f1, f2) = (f(m1), f(m2));
        if f1 < f2 {
            hi = m2 - 1;
        } else if f1 > f2 {
            lo = m1 + 1;
        } else {
            lo = m1;
            hi = m2;
        }
    }
    let mut best_idx = lo;
    let mut best = (value(lo), f(lo));
    for i in lo + 1..=hi {
        let cand = (value(i), f(i));
        if better(best, cand) {
            best = cand;
            best_idx = i;
        }
    }
    // The minimizers form an interval; walk it toward the origin.
    while best.0 != 0.0 {
        let next = if best.0 > 0.0 {
            best_idx.checked_sub(1)
        } else {
            Some(best_idx + 1).filter(|&i| i < len)
        };
        let Some(next) = next else { break };
        let v = value(next);
        if v.abs() >= best.0.abs() || f(next) != best.1 {
            break;
        }
        best = (v, best.1);
        best_idx = next;
    }
    best.0
}

/// Seeded uniform directions on the unit sphere of `ℝ^d` (Box–Muller over
/// xoshiro256++).
pub fn random_unit_vectors(dim: usize, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut uniform = || ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let coords: Vec<f64> = (0..dim)
            .map(|_| {
                let (u1, u2) = (uniform(), uniform());
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect();
        let p = Point::from_vec(coords);
        let n = p.norm();
        if n > 1e-12 {
            out.push(p.scaled(1.0 / n));
        }
    }
    out
}

/// The standard comparator set.
///
/// In one dimension: `0, ±0.1, ±1, ±10, ±100`. In `d > 1`: the origin, then
/// for each magnitude `m`, `±m` along `grad_sum/‖grad_sum‖` (along `e₁` when
/// the sum is zero) and `m` times [`RANDOM_DIRECTIONS`] seeded unit vectors.
pub fn comparator_sweep(dim: usize, grad_sum: &Gradient, seed: u64) -> Vec<Point> {
    let mut out = vec![Point::zeros(dim)];
    if dim == 1 {
        for m in SWEEP_MAGNITUDES {
            out.push(Point::scalar(m));
            out.push(Point::scalar(-m));
        }
        return out;
    }
    let n = grad_sum.norm();
    let axis = if n > 0.0 {
        Point::from_vec(grad_sum.as_slice().iter().map(|g| g / n).collect())
    } else {
        Point::axis(dim, 1.0)
    };
    let random = random_unit_vectors(dim, RANDOM_DIRECTIONS, seed);
    for m in SWEEP_MAGNITUDES {
        out.push(axis.scaled(m));
        out.push(axis.scaled(-m));
        out.extend(random.iter().map(|u| u.scaled(m)));
    }
    out
}

/// `sup_x (θx − f(x))` for a convex `f`, searched on `[−radius, radius]`.
///
/// A dense grid locates the best cell and golden-section search refines it;
/// the objective is concave, so the result is accurate to rounding. It is
/// always a value actually attained, hence a certified lower bound on the
/// true supremum.
pub fn conjugate<F: Fn(f64) -> f64>(f: F, theta: f64, radius: f64, grid: usize) -> f64 {
    let obj = |x: f64| theta * x - f(x);
    let step = 2.0 * radius / grid as f64;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=grid {
        let val = obj(-radius + i as f64 * step);
        if val > best {
            best = val;
            best_i = i;
        }
    }
    let mut lo = -radius + best_i.saturating_sub(1) as f64 * step;
    let mut hi = -radius + (best_i + 1).min(grid) as f64 * step;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        let (fa, fb) = (obj(a), obj(b));
        best = best.max(fa).max(fb);
        if fa < fb {
            lo = a;
        } else {
            hi = b;
        }
        if hi - lo <= f64::EPSILON * (1.0 + hi.abs()) {
            break;
        }
    }
    best
}

/// `a exp(b x²/(|x| + c))`, the potential behind the coin-betting bound.
pub fn exp_potential(a: f64, b: f64, c: f64, x: f64) -> f64 {
    if x == 0.0 {
        return a;
    }
    a * (b * x * x / (x.abs() + c)).exp()
}

/// The conjugate of [`exp_potential`] at `θ`, on a window wide enough to
/// contain the maximizer: beyond `R` we have `f(x) ≥ |θ||x| + a`, so the
/// objective is below its value at the origin.
pub fn exp_potential_conjugate(a: f64, b: f64, c: f64, theta: f64) -> f64 {
    let mut radius = 1.0;
    while exp_potential(a, b, c, radius) < theta.abs() * radius + a {
        radius *= 2.0;
    }
    conjugate(|x| exp_potential(a, b, c, x), theta, radius, 200_000)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
