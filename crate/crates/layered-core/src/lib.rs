//! Layered partial semigroups and exhaustive Ramsey search kernels.
//!
//! A *layered semigroup* is a (possibly partial) semigroup `S` equipped with a
//! layering map `l: S -> N` satisfying `l(s + t) = max(l(s), l(t))` whenever
//! `s + t` is defined. This crate ships:
//!
//! * a zoo of concrete layered semigroups ([`Semigroup`]): finitely supported
//!   functions `FIN`, parameter words `W`, located words `L`, eventually-zero
//!   token sequences `FINA`, and finite sets `FINSETS`;
//! * finitely presented regressive maps ([`maps`]): tetris tables,
//!   substitutions, strong maps, and the identity, with a fragment verifier
//!   for the four regressivity conditions;
//! * block-sequence checking and combination-span enumeration ([`span`]),
//!   including m-tuple spans;
//! * finite Ramsey statements ([`statement`]), witness search, minimal-bound
//!   computation over all colourings, and machine-checkable certificates
//!   ([`search`], [`cert`]).
//!
//! Everything is pure and deterministic: identical inputs produce identical
//! outputs, element enumeration follows a canonical text order, and search
//! results carry enough data to be re-verified independently.
//!
//! The crate is `no_std` (with `alloc`); IO, parallelism and the command-line
//! front end live in the companion `layered-cli` crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod cert;
pub mod color;
pub mod element;
pub mod error;
pub mod laws;
pub mod maps;
pub mod search;
pub mod semigroup;
pub mod span;
pub mod statement;
pub mod zoo;

pub use element::{Element, Layer, Payload, Token};
pub use error::Error;
pub use semigroup::{Semigroup, SemigroupKind};
pub use zoo::{FragmentSpec, Limits};
