use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("mode ({j},{k}) is outside the retained cut {mx}x{my}")]
    ModeOutOfRange { j: usize, k: usize, mx: usize, my: usize },

    #[error("fields live on different domains")]
    DomainMismatch,

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The integrator produced a nonfinite state or crossed the norm guard.
    #[error("numerical blow-up at t = {t} (step {step}, sample row {sample}): {reason}")]
    BlowUp {
        t: f64,
        step: usize,
        sample: usize,
        reason: String,
    },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("set is empty")]
    EmptySet,
}

pub type Result<T> = std::result::Result<T, Error>;
