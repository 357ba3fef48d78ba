//! Extended-range reals for sums whose terms leave the `f64` range.
//!
//! A coin bettor that keeps winning multiplies its wealth by up to 3/2 per
//! round, so after a few thousand rounds its plays are far beyond `f64::MAX`.
//! The regret of such a run is still a perfectly good real number (hugely
//! negative), and [`Wide`] lets us compute it and compare it against a bound
//! without rounding it to `-inf` first.

use std::cmp::Ordering;
use std::ops::{Add, Neg, Sub};

/// `m · e^s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wide {
    m: f64,
    s: f64,
}

const RENORMALIZE_ABOVE: f64 = 1e150;

impl Wide {
    pub const ZERO: Wide = Wide { m: 0.0, s: 0.0 };

    /// `coef · e^{log_scale}`. Both arguments must be finite.
    pub fn from_parts(coef: f64, log_scale: f64) -> Self {
        Wide {
            m: coef,
            s: log_scale,
        }
        .normalized()
    }

    fn normalized(self) -> Self {
        if self.m == 0.0 {
            return Wide::ZERO;
        }
        if self.m.abs() > RENORMALIZE_ABOVE || self.s < 0.0 {
            let shift = self.m.abs().ln().max(-self.s);
            return Wide {
                m: self.m * (-shift).exp(),
                s: self.s + shift,
            };
        }
        self
    }

    /// Nearest `f64`; `±inf` when out of range.
    pub fn to_f64(self) -> f64 {
        if self.m == 0.0 {
            0.0
        } else {
            self.m * self.s.exp()
        }
    }

    /// `ln|x|`, finite for any nonzero value.
    pub fn ln_abs(self) -> f64 {
        self.m.abs().ln() + self.s
    }

    pub fn signum(self) -> f64 {
        if self.m == 0.0 {
            0.0
        } else {
            self.m.signum()
        }
    }

    pub fn abs(self) -> Self {
        Wide {
            m: self.m.abs(),
            s: self.s,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Wide::from_parts(self.m * c, self.s)
    }

    pub fn max(self, other: Wide) -> Wide {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for Wide {
    fn from(x: f64) -> Self {
        Wide::from_parts(x, 0.0)
    }
}

impl Add for Wide {
    type Output = Wide;

    fn add(self, other: Wide) -> Wide {
        if self.m == 0.0 {
            return other;
        }
        if other.m == 0.0 {
            return self;
        }
        let s = self.s.max(other.s);
        Wide::from_parts(
            self.m * (self.s - s).exp() + other.m * (other.s - s).exp(),
            s,
        )
    }
}

impl Neg for Wide {
    type Output = Wide;

    fn neg(self) -> Wide {
        Wide {
            m: -self.m,
            s: self.s,
        }
    }
}

impl Sub for Wide {
    type Output = Wide;

    fn sub(self, other: Wide) -> Wide {
        self + (-other)
    }
}

impl PartialOrd for Wide {
    fn partial_cmp(&self, other: &Wide) -> Option<Ordering> {
        (*self - *other).m.partial_cmp(&0.0)
    }
}

impl std::iter::Sum for Wide {
    fn sum<I: Iterator<Item = Wide>>(iter: I) -> Wide {
        iter.fold(Wide::ZERO, Add::add)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values_round_trip() {
        for x in [0.0, 1.0, -2.5, 1e-300, 3e300, -7e-5] {
            let w = Wide::from(x);
            assert!((w.to_f64() - x).abs() <= 1e-15 * x.abs(), "{x}");
        }
    }

    #[test]
    fn arithmetic_matches_f64_in_range() {
        let a = Wide::from(3.0) + Wide::from(-1.25);
        assert!((a.to_f64() - 1.75).abs() < 1e-15);
        assert!((Wide::from(2.0) - Wide::from(5.0)).to_f64() + 3.0 < 1e-15);
        assert!(Wide::from(1.0) < Wide::from(2.0));
        assert!(Wide::from(-1.0) < Wide::ZERO);
    }

    #[test]
    fn beyond_f64() {
        let huge = Wide::from_parts(1.0, 5000.0);
        assert_eq!(huge.to_f64(), f64::INFINITY);
        assert!((huge.ln_abs() - 5000.0).abs() < 1e-12);
        let diff = huge - huge.scale(0.5);
        assert!((diff.ln_abs() - (5000.0 + 0.5f64.ln())).abs() < 1e-12);
        assert!(-huge < Wide::from(-1e300));
        assert!(Wide::from(1e300) < huge);
        let total: Wide = (0..1000).map(|i| Wide::from_parts(1.0, i as f64)).sum();
        assert!((total.ln_abs() - 999.0 - (1.0 / (1.0 - (-1f64).exp())).ln()).abs() < 1e-9);
    }
}
