//! Exact rationals with p-adic valuations, and truncated canonical p-adic
//! expansions with precision tracking.

mod expansion;
mod rational;

pub(crate) use expansion::mod_inverse;
pub use expansion::{arith, expand, ArithOp, Operand, PadicExpansion, DEFAULT_PRECISION};
pub(crate) use rational::residue;
pub use rational::{
    int, is_prime, norm, parse_rational, prime_power, ratio, rational_sqrt, render_rational,
    unit_part, valuation, valuation_int, NormExponent, Prime, Rational, Valuation,
};
