//! Closed-form regret upper bounds, evaluated on the statistics of a played
//! stream.
//!
//! Every evaluator returns a value that a correct learner must never exceed
//! (except [`simplified_bound`], which drops all constants and logarithms and
//! is only meant for eyeballing growth rates). Logarithms of products are
//! expanded term by term so that huge arguments like `(Σg²)^{10}` never
//! overflow.
//!
//! The single-learner bound ([`thm1_bound`]) and the fully expanded Leashed
//! bound ([`cor1_bound`]) are transcribed from their own displays. The two
//! displays disagree slightly (the second log carries `e^{α/2h²}` in one and
//! `e^{α/4h²}` in the other, and the first arm subtracts `8h` versus `h`), so
//! [`cor1_bound`] is *not* `2 · thm1_bound + …`; it equals
//! [`thm3_bound`] applied to its own inner term, [`cor1_inner_bound`].

use crate::error::{positive, Error, Result};
use crate::game::RegretLedger;

/// User-facing parameters of the Leashed stack plus the grid of analysis
/// exponents `q` over which the comparator penalty is minimized.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub k: f64,
    pub p: f64,
    /// Initial hint `𝔤`.
    pub g0: f64,
    pub q_grid: Vec<f64>,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            alpha: 1.0,
            k: 1.0,
            p: 0.5,
            g0: 1.0,
            q_grid: default_q_grid(),
        }
    }
}

pub fn default_q_grid() -> Vec<f64> {
    vec![0.0, 1.0 / 3.0, 0.5, 1.0]
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        positive("epsilon", self.epsilon)?;
        positive("alpha", self.alpha)?;
        positive("k", self.k)?;
        positive("g0", self.g0)?;
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: self.p,
                reason: "must lie in (0, 1]",
            });
        }
        if self.q_grid.is_empty() {
            return Err(Error::InvalidParameter {
                name: "q",
                value: f64::NAN,
                reason: "grid must not be empty",
            });
        }
        if let Some(&q) = self.q_grid.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(())
    }

    /// Adds `q` to the grid if not already present.
    pub fn with_q(mut self, q: f64) -> Self {
        if !self.q_grid.contains(&q) {
            self.q_grid.push(q);
        }
        self
    }
}

/// Gradient statistics every bound is a function of.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamStats {
    pub rounds: usize,
    /// `Σ‖g_t‖²`
    pub sum_sq: f64,
    /// `Σ‖g_t‖`
    pub sum_abs: f64,
    /// `G = max_t ‖g_t‖`
    pub max_grad: f64,
    /// `h_T`; `max(𝔤, G)` for hint-fabricating stacks.
    pub final_hint: f64,
    /// `max_{t≤T} Σ_{i≤t}‖g_i‖ / G_t` over rounds with `G_t > 0`.
    pub max_ratio: f64,
}

impl StreamStats {
    /// Statistics of a stream of gradient norms, with `h_T = max(𝔤, G)`.
    pub fn from_norms<I>(norms: I, g0: f64) -> Self
    where
        I: IntoIterator<Item = f64>,
    {
        let mut stats = Self {
            rounds: 0,
            sum_sq: 0.0,
            sum_abs: 0.0,
            max_grad: 0.0,
            final_hint: g0,
            max_ratio: 0.0,
        };
        for n in norms {
            stats.rounds += 1;
            stats.sum_sq += n * n;
            stats.sum_abs += n;
            stats.max_grad = stats.max_grad.max(n);
            if stats.max_grad > 0.0 {
                stats.max_ratio = stats.max_ratio.max(stats.sum_abs / stats.max_grad);
            }
        }
        stats.final_hint = g0.max(stats.max_grad);
        stats
    }

    pub fn from_ledger(ledger: &RegretLedger, g0: f64) -> Self {
        Self::from_norms(ledger.rounds().iter().map(|r| r.grad.norm()), g0)
    }

    /// Overrides `h_T`, for games where the hints came from outside.
    pub fn with_final_hint(mut self, hint: f64) -> Self {
        self.final_hint = hint;
        self
    }
}

/// `ln(1 + e^x)` without overflow.
fn ln_1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln(16 |ẘ| h e^{α/4h²} (1 + S/α)^{4.5} / ε)`
fn wealth_log_term(params: &BoundParams, stats: &StreamStats, w_abs: f64) -> f64 {
    let h = stats.final_hint;
    16f64.ln() + w_abs.ln() + h.ln() + params.alpha / (4.0 * h * h)
        + 4.5 * (stats.sum_sq / params.alpha).ln_1p()
        - params.epsilon.ln()
}

/// `2 √(S · ln(4 S^{10} e^{x} ẘ² / ε² + 1))` with `x = α / (divisor · h²)`.
fn variance_arm(params: &BoundParams, stats: &StreamStats, w_abs: f64, divisor: f64) -> f64 {
    let s = stats.sum_sq;
    if s <= 0.0 {
        return 0.0;
    }
    let h = stats.final_hint;
    let log_arg = 4f64.ln() + 10.0 * s.ln() + params.alpha / (divisor * h * h) + 2.0 * w_abs.ln()
        - 2.0 * params.epsilon.ln();
    2.0 * (s * ln_1p_exp(log_arg)).sqrt()
}

/// Regret bound of the coin-betting learner with hints:
///
/// `ε + |ẘ| max(8h_T(ln(16|ẘ|h_T e^{α/4h_T²}(1+Σg²/α)^{4.5}/ε) − 1),
///              2√(Σg² ln(4(Σg²)^{10} e^{α/2h_T²} ẘ²/ε² + 1)))`
pub fn thm1_bound(params: &BoundParams, stats: &StreamStats, w_abs: f64) -> f64 {
    if w_abs == 0.0 {
        return params.epsilon;
    }
    let h = stats.final_hint;
    let arm1 = 8.0 * h * (wealth_log_term(params, stats, w_abs) - 1.0);
    let arm2 = variance_arm(params, stats, w_abs, 2.0);
    params.epsilon + w_abs * arm1.max(arm2)
}

/// The inner term of the expanded Leashed bound, i.e. half of its first two
/// summands: `ε + |ẘ| max(8h_T ln(…) − h_T, 2√(Σg² ln(4(Σg²)^{10} e^{α/4h_T²} ẘ²/ε² + 1)))`.
pub fn cor1_inner_bound(params: &BoundParams, stats: &StreamStats, w_abs: f64) -> f64 {
    if w_abs == 0.0 {
        return params.epsilon;
    }
    let h = stats.final_hint;
    let arm1 = 8.0 * h * wealth_log_term(params, stats, w_abs) - h;
    let arm2 = variance_arm(params, stats, w_abs, 4.0);
    params.epsilon + w_abs * arm1.max(arm2)
}

/// `G |ẘ|^{1+(1−q)/p} / k^{(1−q)/p} · (Σ|g|/G)^q`
pub fn comparator_penalty(params: &BoundParams, stats: &StreamStats, w_abs: f64, q: f64) -> f64 {
    let g = stats.max_grad;
    if w_abs == 0.0 || g == 0.0 {
        return 0.0;
    }
    let e = (1.0 - q) / params.p;
    let log = g.ln() + (1.0 + e) * w_abs.ln() - e * params.k.ln() + q * (stats.sum_abs / g).ln();
    log.exp()
}

/// The comparator penalty minimized over the `q` grid, with the minimizing `q`.
pub fn best_penalty(params: &BoundParams, stats: &StreamStats, w_abs: f64) -> (f64, f64) {
    params
        .q_grid
        .iter()
        .map(|&q| (comparator_penalty(params, stats, w_abs, q), q))
        .fold((f64::INFINITY, f64::NAN), |best, cur| if cur.0 < best.0 { cur } else { best })
}

/// Leashed regret given any valid inner regret bound `R^A`:
///
/// `2R^A + G k max_t(Σ_{i≤t}|g_i|/G_t)^p + 2G|ẘ| + min_q penalty(q)`
pub fn thm3_bound(params: &BoundParams, stats: &StreamStats, w_abs: f64, inner_bound: f64) -> f64 {
    let g = stats.max_grad;
    if g == 0.0 {
        return 2.0 * inner_bound;
    }
    2.0 * inner_bound
        + g * params.k * stats.max_ratio.powf(params.p)
        + 2.0 * g * w_abs
        + best_penalty(params, stats, w_abs).0
}

/// The expanded Leashed-over-coin-betting bound.
pub fn cor1_bound(params: &BoundParams, stats: &StreamStats, w_abs: f64) -> f64 {
    thm3_bound(params, stats, w_abs, cor1_inner_bound(params, stats, w_abs))
}

/// Truncation plus a constant radius `D`. For `|ẘ| ≤ D` the comparator never
/// leaves the constraint set, so the Leashed accounting reduces to
/// `2R^A + G(D + |ẘ|)` with `R^A` the coin-betting bound. A comparator
/// outside costs an extra `Σ|g_t| (|ẘ| − D)` over its projection.
pub fn fixed_diameter_bound(params: &BoundParams, stats: &StreamStats, w_abs: f64, diameter: f64) -> f64 {
    let inside = w_abs.min(diameter);
    2.0 * thm1_bound(params, stats, inside)
        + stats.max_grad * (diameter + inside)
        + stats.sum_abs * (w_abs - diameter).max(0.0)
}

/// Upper bound on the convex conjugate of `f(x) = a exp(b x²/(|x| + c))`:
///
/// `|θ| max((2/b)(ln(2|θ|/(ab)) − 1), √((c/b) ln(cθ²/(a²b) + 1)) − a)`
pub fn fenchel_bound(a: f64, b: f64, c: f64, theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let t = theta.abs();
    let arm1 = (2.0 / b) * ((2.0 * t / (a * b)).ln() - 1.0);
    let arm2 = ((c / b) * (c * t * t / (a * a * b)).ln_1p()).sqrt() - a;
    t * arm1.max(arm2)
}

/// The two highlighted parameter settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setting {
    /// `p = 1/2, q = 0`
    HalfZero,
    /// `p = q = 1/3`
    Thirds,
}

/// Big-O shape of the bound with every constant and logarithm set to 1.
/// Not a rigorous bound; use it for growth exponents only.
///
/// * `HalfZero`: `(|ẘ| + k) G √T + G|ẘ|³/k²`
/// * `Thirds`: `|ẘ| G √T + G|ẘ| + (|ẘ|³/k² + k) G T^{1/3}`
pub fn simplified_bound(setting: Setting, stats: &StreamStats, w_abs: f64, k: f64) -> f64 {
    let g = stats.max_grad;
    let t = stats.rounds as f64;
    match setting {
        Setting::HalfZero => (w_abs + k) * g * t.sqrt() + g * w_abs.powi(3) / (k * k),
        Setting::Thirds => {
            w_abs * g * t.sqrt() + g * w_abs + (w_abs.powi(3) / (k * k) + k) * g * t.cbrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(sum_sq: f64, final_hint: f64) -> StreamStats {
        StreamStats {
            rounds: 0,
            sum_sq,
            sum_abs: 0.0,
            max_grad: 0.0,
            final_hint,
            max_ratio: 0.0,
        }
    }

    #[test]
    fn thm1_at_origin_is_epsilon() {
        let mut p = BoundParams::default();
        let s = stats(17.0, 3.0);
        assert_eq!(thm1_bound(&p, &s, 0.0), 1.0);
        p.epsilon = 2.0;
        assert_eq!(thm1_bound(&p, &s, 0.0), 2.0);
    }

    #[test]
    fn thm1_by_hand() {
        let p = BoundParams::default();
        let b = thm1_bound(&p, &stats(0.0, 1.0), 1.0);
        let expected = 1.0 + 8.0 * (16f64.ln() + 0.25 - 1.0);
        assert!((b - expected).abs() < 1e-12);
        assert!((b - 17.1807).abs() < 1e-4);
    }

    #[test]
    fn thm1_direct_formula_agrees() {
        // Evaluate the display literally where nothing overflows.
        let p = BoundParams {
            epsilon: 0.7,
            alpha: 1.3,
            ..BoundParams::default()
        };
        for &(s, h, w) in &[(2.0, 1.5, 0.3), (5.0, 2.0, 4.0), (0.5, 1.0, 20.0)] {
            let arm1 = 8.0
                * h
                * ((16.0 * w * h * (p.alpha / (4.0 * h * h)).exp() * (1.0 + s / p.alpha).powf(4.5)
                    / p.epsilon)
                    .ln()
                    - 1.0);
            let arm2 = 2.0
                * (s * (4.0 * s.powi(10) * (p.alpha / (2.0 * h * h)).exp() * w * w
                    / (p.epsilon * p.epsilon)
                    + 1.0)
                    .ln())
                .sqrt();
            let direct = p.epsilon + w * arm1.max(arm2);
            let b = thm1_bound(&p, &stats(s, h), w);
            assert!((b - direct).abs() <= 1e-12 * direct.abs().max(1.0), "{b} vs {direct}");
        }
    }

    #[test]
    fn thm3_examples() {
        let p = BoundParams::default();
        let zero = StreamStats::from_norms(vec![0.0; 10], 1.0);
        assert_eq!(thm3_bound(&p, &zero, 3.0, 1.0), 2.0);

        let ones = StreamStats::from_norms(vec![1.0; 100], 1.0);
        let at_origin = thm3_bound(&p, &ones, 0.0, 1.0);
        assert!((at_origin - (2.0 + 10.0)).abs() < 1e-12);

        // q = 0 arm at |ẘ| = 2: |ẘ|^{1+2}/k² = 8.
        assert!((comparator_penalty(&p, &ones, 2.0, 0.0) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn cor1_examples() {
        let p = BoundParams::default();
        let zero = StreamStats::from_norms(vec![0.0; 5], 1.0);
        assert_eq!(cor1_bound(&p, &zero, 0.0), 2.0);

        let s = StreamStats::from_norms((1..=50).map(|t| (t as f64).sqrt() / 3.0), 1.0);
        let mut prev = f64::NEG_INFINITY;
        for w in [0.0, 1.0, 2.0, 4.0] {
            let b = cor1_bound(&p, &s, w);
            assert!(b >= prev);
            prev = b;
            let composed = thm3_bound(&p, &s, w, cor1_inner_bound(&p, &s, w));
            assert!((b - composed).abs() <= 1e-9 * b);
        }
    }

    #[test]
    fn fenchel_examples() {
        assert_eq!(fenchel_bound(1.0, 1.0, 0.0, 0.0), 0.0);
        let e = std::f64::consts::E;
        assert!(fenchel_bound(1.0, 1.0, 0.0, e / 2.0).abs() < 1e-15);
    }

    #[test]
    fn simplified_examples() {
        let s = StreamStats {
            rounds: 100,
            max_grad: 1.0,
            ..stats(0.0, 1.0)
        };
        assert_eq!(simplified_bound(Setting::HalfZero, &s, 0.0, 1.0), 10.0);

        let s = StreamStats { rounds: 1000, ..s };
        let v = simplified_bound(Setting::Thirds, &s, 1.0, 1.0);
        assert!((v - (1000f64.sqrt() + 1.0 + 2.0 * 10.0)).abs() < 1e-9);
        assert!((simplified_bound(Setting::Thirds, &s, 0.0, 1.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn stream_stats_by_hand() {
        let s = StreamStats::from_norms([0.0, 1.0, 2.0, 0.5], 1.5);
        assert_eq!(s.rounds, 4);
        assert_eq!(s.sum_sq, 5.25);
        assert_eq!(s.sum_abs, 3.5);
        assert_eq!(s.max_grad, 2.0);
        assert_eq!(s.final_hint, 2.0);
        // ratios: t=2: 1/1, t=3: 3/2, t=4: 3.5/2
        assert_eq!(s.max_ratio, 1.75);
    }

    #[test]
    fn params_validation() {
        assert!(BoundParams::default().validate().is_ok());
        let bad = BoundParams {
            q_grid: vec![0.0, 1.5],
            ..BoundParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = BoundParams {
            p: 0.0,
            ..BoundParams::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(BoundParams::default().with_q(0.25).q_grid.len(), 5);
        assert_eq!(BoundParams::default().with_q(0.5).q_grid.len(), 4);
    }
}
