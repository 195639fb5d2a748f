//! Crate-wide error type.

use thiserror::Error;

use crate::validate::ValidationReport;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parameter validation failed at check `{}`", .0.failed_first.as_deref().unwrap_or("?"))]
    Validation(ValidationReport),

    #[error("precision of {requested} bits is below the minimum of {min}")]
    PrecisionTooLow { requested: u32, min: u32 },

    #[error("invalid subsequence query: {0}")]
    InvalidQuery(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("sequence term W_{index} is zero; the series hypothesis fails")]
    ZeroTerm { index: u64 },

    #[error("term cap of {cap} terms exceeded before reaching the requested bound")]
    TermCapExceeded { cap: u64 },

    #[error("dominance not reached at k={k}: |c2/c1|*|beta/alpha|^(mk+l) must be < 1/4")]
    DominanceNotReached { k: u64 },

    #[error("truncation bound too large relative to the tail value; cannot certify the reciprocal")]
    BoundTooLarge,

    #[error("degree d={d} outside the named-constant range 1..=4")]
    UnsupportedDegree { d: u32 },

    #[error("estimator family mismatch: {0}")]
    WrongFamily(&'static str),

    #[error("specialization violated: {0}")]
    SpecializationRequired(String),

    #[error("argument outside domain: {0}")]
    DomainViolation(String),

    #[error("not a valid number: {0}")]
    InvalidNumber(String),

    #[error("too few usable rows for a fit: have {have}, need {need}")]
    TooFewRows { have: usize, need: usize },

    #[error("unknown cross-check case `{0}`")]
    UnknownCase(String),

    #[error("unknown variant tag `{0}`")]
    UnknownVariant(String),

    #[error("need at least two candidate variants to resolve")]
    NothingToResolve,

    #[error("no candidate variant converges; evidence: {0}")]
    NoConvergentVariant(String),
}
