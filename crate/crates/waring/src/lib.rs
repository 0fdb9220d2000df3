//! Exact Waring numbers of the totally ramified p-adic rings Z_p[p^(1/e)].
//!
//! For a prime p and positive integers e and k, let R = Z_p[w] with
//! w^e = p, and let R^k be the additive semigroup generated by the k-th
//! powers of R. The Waring number g_{p,e}(k) is the least n such that every
//! element of R^k is a sum of at most n k-th powers. This crate computes
//! g_{p,e}(k) exactly, with machine-checkable certificates for both sides:
//!
//! - [`ring`]: exact digit-vector arithmetic in the quotient Z_p[w]/(w^N).
//! - [`powers`]: the Hensel precision M = 2*e*v_p(k) + 1 and brute-force
//!   enumeration of the k-th power residues at any precision >= M.
//! - [`engine`]: anchored sumset dynamic programming for upper bounds,
//!   exhaustive extended-precision non-representability search for lower
//!   bounds, decomposition tables, and the p = 2 comparison scan.
//! - [`prime_field`]: mod-p Waring data (g_0) and the unramified shortcut
//!   for p not dividing k.
//! - [`cache`]: append-only JSON-lines result records.
//! - [`cli`]: the command surface behind the `waring` binary.
//!
//! Start from [`engine::waring_number`]; see the `examples/` directory for
//! one runnable example per capability.

pub mod cache;
pub mod cli;
pub mod engine;
pub mod error;
pub mod powers;
pub mod prime_field;
pub mod ring;
mod sumset;

pub use engine::{
    waring_number, waring_number_direct, Decomposition, LowerBoundCertificate, Options,
    WaringResult,
};
pub use error::Error;
pub use powers::{hensel_precision, PowerResidues, DENSE_SET_CAP};
pub use ring::{Element, RingSpec, Valuation};
