use thiserror::Error;

use crate::functions::SqrtReason;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    InvalidPrime(u64),

    #[error("expansions over different primes ({0} and {1})")]
    PrimeMismatch(u32, u32),

    #[error("invalid rational literal `{0}`")]
    InvalidRational(String),

    #[error("input must be nonzero")]
    ZeroInput,

    #[error("division by zero")]
    DivisionByZero,

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("no square root in Q_p: {0:?}")]
    NoSquareRoot(SqrtReason),

    #[error("argument outside the convergence domain of {function}: {detail}")]
    OutsideDomain {
        function: &'static str,
        detail: String,
    },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("theta = {theta} is not in E_{p} (valuation of theta-1 is {valuation}, need at least {required})")]
    ThetaOutOfDomain {
        p: u32,
        theta: String,
        valuation: String,
        required: i64,
    },

    #[error("classification is only available for k = 2 (got k = {0})")]
    UnsupportedOrder(u32),

    #[error("m = {m} is outside 1..={max}")]
    InvalidM { m: u32, max: u32 },

    #[error("pole: denominator vanishes at the given input")]
    PoleAtInput,

    #[error("no classification case matched: {0}")]
    UnmatchedCase(String),

    #[error("rule-based and direct classifications disagree: {0}")]
    RuleDirectMismatch(String),

    #[error("closed-form count disagrees with the computed count: {0}")]
    ClosedFormMismatch(String),

    #[error("search space of {candidates} candidates exceeds the limit of {limit}")]
    SearchSpaceTooLarge { candidates: u128, limit: u128 },

    #[error("odd valuation: the square-root question is settled without enumeration")]
    OddValuationShortcut,

    #[error("result does not fit in 128 bits")]
    Overflow,
}
