use thiserror::Error;

use crate::ring::Valuation;

/// Errors raised by ring construction, residue enumeration, and the engine.
///
/// An unresolved Waring number (lower bound below upper bound) is *not* an
/// error; it is reported as a [`crate::engine::WaringResult`] carrying both
/// bounds.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} is not prime")]
    NotPrime(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot divide by w^{shift}: element has valuation {valuation}")]
    DivisionByOmega { valuation: Valuation, shift: u32 },

    #[error("precision {given} is below the Hensel bound {required} = 2*e*v_p(k) + 1")]
    PrecisionTooLow { given: u32, required: u32 },

    #[error("ring size {p}^{n} exceeds the dense-set cap of 2^{cap} classes")]
    RingTooLarge { p: u32, n: u32, cap: u32 },

    #[error("p = {p} divides k = {k}: the unramified shortcut does not apply")]
    NotApplicable { p: u32, k: u32 },

    #[error("malformed record: {0}")]
    BadRecord(String),
}
