use std::path::PathBuf;

use thiserror::Error;

use crate::rational::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("divisor is not a unit and the dividend valuation does not allow exact cancellation")]
    NonUnitDivisor,

    #[error("bad constant term {0}")]
    BadConstantTerm(Rational),

    #[error("insufficient order: need {needed}, have {available}")]
    InsufficientOrder { needed: usize, available: usize },

    #[error("no Gaussian weight for variable {0}")]
    MissingWeight(u16),

    #[error("double factorial needs an odd argument >= -1, got {0}")]
    BadParity(i64),

    #[error("degenerate phase: the t^2 coefficient vanishes")]
    DegeneratePhase,

    #[error("phase invariant violated: {0}")]
    BadPhase(String),

    #[error("Hadamard evaluation is not an integer: {0}")]
    NonIntegerResult(String),

    #[error("Hadamard evaluation has a nonzero imaginary part: {0}")]
    NonRealResult(String),

    #[error("brute-force enumeration limited to n <= {limit}, asked for n = {n}")]
    LimitExceeded { n: u32, limit: u32 },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("declared offset {declared} but first index is {found}")]
    OffsetMismatch { declared: u32, found: u32 },

    #[error("missing count for k = {k}, n = {n}")]
    MissingCount { k: u32, n: u32 },

    #[error("count mismatch for k = {k}, n = {n}: formula gives {formula}, enumeration gives {brute}")]
    CountMismatch { k: u32, n: u32, formula: String, brute: String },

    #[error("count table invariant violated at k = {k}, n = {n}: {msg}")]
    CountInvariant { k: u32, n: u32, msg: String },

    #[error("series has valuation {found}, expected at least {expected}")]
    ValuationViolation { expected: usize, found: usize },

    #[error("interpolated polynomial failed held-out check at k = {k}")]
    DegreeOverflow { k: u32 },

    #[error("prefactor (k!/k^(k/2))^j is irrational for k = {k}, j = {j}")]
    IrrationalPrefactor { k: u32, j: u32 },

    #[error("bad growth scale: {0}")]
    BadScale(String),

    #[error("valuation gap mismatch for k = {k}: expected {expected}, found {found:?}")]
    GapMismatch { k: u32, expected: usize, found: Option<usize> },

    #[error("cancellation consumed {lost} bits at precision {precision}")]
    PrecisionUnderflow { lost: i64, precision: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
