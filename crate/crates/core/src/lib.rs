//! Exact p-adic arithmetic and the classification of translation-invariant
//! p-adic Gibbs measures for the q-state Potts model on the Cayley tree of
//! order two.
//!
//! The crate is layered bottom-up:
//!
//! * [`padic`]: rationals, valuations, norms and truncated expansions.
//! * [`functions`]: square roots, `exp_p` and `log_p`.
//! * [`potts`]: the boundary-field recursion, the reduced map `f_m` and its
//!   quadratic.
//! * [`classifier`]: norm-comparison rules, measure counting and boundedness.
//! * [`oracle`]: brute-force residue enumeration used to cross-check the rest.
//! * [`report`]: the serialized report schema used by the command line tool.

pub mod classifier;
pub mod error;
pub mod functions;
pub mod oracle;
pub mod padic;
pub mod potts;
pub mod report;

pub use error::{Error, Result};
