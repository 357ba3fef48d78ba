use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {what} at round {round}")]
    NonFinite { what: &'static str, round: usize },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("hint contract violated: |g| = {grad} exceeds hint {hint}")]
    HintViolated { grad: f64, hint: f64 },

    #[error("hints must be nondecreasing: next hint {next} < current hint {current}")]
    HintDecreased { current: f64, next: f64 },

    #[error("comparator fraction {v} leaves the domain of -ln(1 - g v) for g = {g}")]
    OutsideDomain { v: f64, g: f64 },

    #[error("game length must be at least 1")]
    EmptyGame,

    #[error("adversary {0} does not declare a gradient envelope, so it cannot supply hints")]
    NoEnvelope(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}
