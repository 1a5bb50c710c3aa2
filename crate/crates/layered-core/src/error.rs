//! Error type shared across the crate.
//!
//! Undefined results of the partial operation are *not* errors; they are
//! first-class `None` values. Errors mean the request itself was ill-formed
//! (mixed semigroups, kind mismatches, oversized fragments, unparsable text).

use alloc::string::String;

/// Everything that can go wrong outside of ordinary partiality.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Two elements from different semigroups were combined.
    #[error("elements belong to different semigroups")]
    MixedSemigroups,

    /// A map was applied to (or verified against) a semigroup of the wrong kind.
    #[error("map kind does not act on this semigroup: {0}")]
    KindMismatch(String),

    /// An invalid semigroup or statement configuration.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A fragment, span, or search space exceeds the configured cap.
    #[error("fragment too large: needs {needed} items, cap is {cap}")]
    FragmentTooLarge { needed: u128, cap: u128 },

    /// Text input failed to parse; `line` is 1-based, 0 when unknown.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An element failed canonical-form validation.
    #[error("invalid element: {0}")]
    InvalidElement(String),

    /// A map descriptor failed its structural invariants.
    #[error("invalid map descriptor: {0}")]
    InvalidMap(String),

    /// A colouring does not cover the statement's domain.
    #[error("colouring is not total on the domain: missing {0}")]
    ColoringNotTotal(String),

    /// A node-count budget ran out; the checkpoint text resumes the run.
    #[error("search budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64, checkpoint: String },
}

impl Error {
    /// Attach a 1-based line number to a parse-ish error coming from a file.
    pub fn at_line(self, line: usize) -> Error {
        match self {
            Error::Parse { msg, .. } => Error::Parse { line, msg },
            Error::InvalidElement(msg) | Error::InvalidMap(msg) => Error::Parse { line, msg },
            other => other,
        }
    }
}
