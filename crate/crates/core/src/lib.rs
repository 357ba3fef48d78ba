//! Parameter-free online linear optimization.
//!
//! The learners here need no Lipschitz constant and no bound on the
//! comparator norm. The building blocks, from the bottom up:
//!
//! * [`coin_betting::OnsBettor`]: one-dimensional coin betting whose betting
//!   fraction is chosen by Online Newton Step, for the game where a bound
//!   `h_t ≥ |g_t|` is revealed before each round.
//! * [`reductions::Truncating`]: removes the need for those hints by
//!   truncating any gradient that overshoots the running maximum.
//! * [`reductions::Leashed`]: adds an artificial, growing constraint
//!   `|w| ≤ B_t` so the regret stays controlled even when the first
//!   gradients are tiny compared with later ones.
//! * [`reductions::DimFree`]: lifts any one-dimensional learner to `ℝ^d`
//!   using [`unit_ball::AdaGradBall`] for the direction.
//!
//! [`bounds`] evaluates the matching regret guarantees, [`oracle`] holds
//! brute-force reference computations, and [`verify`] runs the acceptance
//! checks that tie them together.

pub mod adversary;
pub mod bettor_game;
pub mod bounds;
pub mod coin_betting;
pub mod error;
pub mod game;
pub mod oracle;
pub mod reductions;
pub mod stacks;
pub mod unit_ball;
pub mod vector;
pub mod verify;
pub mod wide;

pub use adversary::{AdversaryConfig, AdversaryKind, StreamAdversary};
pub use coin_betting::OnsBettor;
pub use error::{Error, Result};
pub use game::{run_game, run_hinted_game, Adversary, HintedLearner, Learner, RegretLedger};
pub use reductions::{DimFree, LeashParams, Leashed, Truncating};
pub use stacks::{Algo, StackConfig};
pub use unit_ball::AdaGradBall;
pub use vector::{Gradient, Point};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/coin-betting.md")]
    mod coin_betting {}
    #[doc = include_str!("../../../book/src/truncation.md")]
    mod truncation {}
    #[doc = include_str!("../../../book/src/leashed.md")]
    mod leashed {}
    #[doc = include_str!("../../../book/src/dimension-free.md")]
    mod dimension_free {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
