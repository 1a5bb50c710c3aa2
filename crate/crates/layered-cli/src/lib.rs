//! Library surface of the `layered` CLI: argument/file loading helpers,
//! output formatting, and the multi-threaded bound scanner. The binary in
//! `main.rs` is a thin dispatcher over these pieces; integration tests reuse
//! them directly (notably [`parallel::scan_parallel`]).

pub mod args;
pub mod emit;
pub mod parallel;

use layered_core::Error;

/// A diagnostic destined for stderr plus the process exit code.
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub fn new(code: u8, msg: impl Into<String>) -> Failure {
        Failure { code, msg: msg.into() }
    }

    /// Usage and input errors exit 2.
    pub fn usage(e: impl std::fmt::Display) -> Failure {
        Failure::new(2, e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::BudgetExceeded { nodes, .. } => {
                Failure::new(3, format!("budget exceeded after {nodes} nodes"))
            }
            other => Failure::usage(other),
        }
    }
}
