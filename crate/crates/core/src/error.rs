use alloc::string::String;

use crate::scalar::Mode;

/// Errors surfaced by the kernel. Numerical failures inside the certifier are
/// reported through verdicts, not through this type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point outside the {mode} domain: {reason}")]
    Domain { mode: Mode, reason: &'static str },
    #[error("operation expects a {expected}-mode input")]
    ModeMismatch { expected: Mode },
    #[error("unsupported denominator factor `{0}`")]
    UnsupportedDenominator(String),
    #[error("division by an expression that is identically zero")]
    DivisionByZero,
    #[error("too many transcendental atoms in one expression (limit {0})")]
    TooManyAtoms(usize),
    #[error("polynomial parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown proof step `{0}`")]
    UnknownStep(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("interval argument leaves the domain of {0}")]
    IntervalDomain(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
