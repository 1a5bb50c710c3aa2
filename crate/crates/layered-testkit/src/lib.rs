//! Deliberately naive reference implementations and seeded random generators.
//!
//! Nothing here is shared with the production code paths: the span
//! enumerator, the witness searcher and the bound searcher are independent
//! re-implementations used as oracles by the test suites.

pub mod gen;
pub mod mutate;
pub mod naive;
