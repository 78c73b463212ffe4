//! Exact counting of primitive subsets of `{1..n}` (no element divides
//! another) and of their k-core relatives, plus rigorous two-sided
//! enclosures of the growth constants those counts obey.
//!
//! Modules:
//! - [`arith`]: prime bases, smooth/rough factorization, smooth enumeration,
//!   exact coprime counting.
//! - [`antichain`]: the counting engines (exhaustive oracle, branching
//!   counter, exponent-grid sweep).
//! - [`limits`]: the rough-part product decomposition, growth-constant
//!   enclosures with rigorous tails, and the inequality verifier.
//! - [`cli`]: the `primlim` binary's subcommands, record formats and cache.

pub mod antichain;
pub mod arith;
pub mod cli;
pub mod error;
pub mod limits;
pub(crate) mod numeric;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
