//! Points played by learners and gradients emitted by adversaries.
//!
//! Both are finite-dimensional real vectors under the Euclidean norm. The
//! Euclidean norm is self-dual, so the same norm measures points and
//! gradients.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// Euclidean norm of a coordinate slice.
///
/// One-dimensional inputs return `|x|` directly so that scalar code paths
/// never see a rounding difference between `‖g‖` and `|g|`.
pub fn euclidean_norm(coords: &[f64]) -> f64 {
    match coords {
        [x] => x.abs(),
        _ => coords.iter().map(|x| x * x).sum::<f64>().sqrt(),
    }
}

pub fn inner_product(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

macro_rules! real_vector {
    ($(#[$meta:meta])* $name:ident, $what:literal) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Default)]
        pub struct $name(Vec<f64>);

        impl $name {
            /// Wraps `coords`, rejecting empty or non-finite input.
            pub fn new(coords: Vec<f64>) -> Result<Self> {
                if coords.is_empty() {
                    return Err(Error::DimensionMismatch { expected: 1, got: 0 });
                }
                if coords.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite { what: $what, round: 0 });
                }
                Ok(Self(coords))
            }

            /// Wraps `coords` without validation. Callers check finiteness
            /// where it matters (the game loop does).
            pub fn from_vec(coords: Vec<f64>) -> Self {
                Self(coords)
            }

            pub fn zeros(dim: usize) -> Self {
                Self(vec![0.0; dim])
            }

            pub fn scalar(x: f64) -> Self {
                Self(vec![x])
            }

            /// `x · e₁` in `dim` dimensions.
            pub fn axis(dim: usize, x: f64) -> Self {
                let mut coords = vec![0.0; dim];
                coords[0] = x;
                Self(coords)
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn into_vec(self) -> Vec<f64> {
                self.0
            }

            pub fn norm(&self) -> f64 {
                euclidean_norm(&self.0)
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|x| x.is_finite())
            }

            /// First coordinate; the value itself for one-dimensional vectors.
            pub fn first(&self) -> f64 {
                self.0[0]
            }

            pub fn scaled(&self, c: f64) -> Self {
                Self(self.0.iter().map(|x| c * x).collect())
            }

            pub fn check_dim(&self, expected: usize) -> Result<()> {
                if self.dim() == expected {
                    Ok(())
                } else {
                    Err(Error::DimensionMismatch {
                        expected,
                        got: self.dim(),
                    })
                }
            }
        }

        impl Index<usize> for $name {
            type Output = f64;

            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}{:?}", stringify!($name), self.0)
            }
        }

        impl From<f64> for $name {
            fn from(x: f64) -> Self {
                Self::scalar(x)
            }
        }
    };
}

real_vector!(
    /// A point `w_t` played by a learner, or a comparator `ẘ`.
    Point,
    "point"
);

real_vector!(
    /// A (sub)gradient `g_t` of the round's loss at the played point.
    Gradient,
    "gradient"
);

impl Point {
    pub fn dot(&self, g: &Gradient) -> f64 {
        inner_product(&self.0, &g.0)
    }
}

impl Gradient {
    pub fn dot(&self, w: &Point) -> f64 {
        inner_product(&self.0, &w.0)
    }
}

/// The dual norm of a gradient. In the Euclidean setting this is the
/// Euclidean norm itself.
pub fn dual_norm(g: &Gradient) -> f64 {
    g.norm()
}
