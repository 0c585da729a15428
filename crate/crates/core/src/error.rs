//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller supplied parameters outside an operation's domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Extra automorphisms were requested for j not in {0, 1728}.
    #[error("curve has no extra automorphisms (j not in {{0, 1728}})")]
    NoExtraAutomorphisms,
    /// Analytic coefficient recognition failed at the given precision.
    #[error("coefficient recognition failed at {0} bits")]
    Precision(usize),
    /// No model with good reduction at the requested prime could be found.
    #[error("no good-reduction model at {0}")]
    BadReduction(u64),
    /// The differential normalization of a reduced endomorphism failed.
    #[error("endomorphism normalization failed: {0}")]
    Normalization(String),
    /// Two objects being compared live over incompatible structures.
    #[error("mismatch: {0}")]
    Mismatch(String),
    /// A closed-form table lookup matched no row.
    #[error("no table row matches: {0}")]
    NoRow(String),
    /// An internal consistency check failed.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    /// Input data could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;
