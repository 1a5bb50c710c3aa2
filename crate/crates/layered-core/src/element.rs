//! Canonical elements of the concrete layered semigroups.
//!
//! An [`Element`] owns a per-kind payload in canonical form together with its
//! cached layer. Canonical text encodings (one line per element) are the
//! exchange format used by the CLI, colouring files and certificates:
//!
//! * `FIN {0:1,2:2}` — finitely supported function, positions ascending,
//!   values >= 1;
//! * `FINSETS {1,2,3}` — nonempty finite set, ascending;
//! * `W |a x1 x1 x2 b|` — parameter word, space-separated tokens;
//! * `L {5:a,9:x1}` — located word, positions ascending;
//! * `FINA |x2 b x1|` — eventually-`x0` token sequence, trailing `x0` trimmed.
//!
//! Parsers are strict: non-canonical text (unsorted positions, variables out
//! of first-appearance order, zero values, trailing `x0`) is rejected.
//! The *canonical order* on elements used throughout the crate is the
//! lexicographic order on this text encoding.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::Error;
use crate::semigroup::SgId;

/// Layer index (0-based). Fragments bound it; the library never materialises
/// layers beyond a fragment's declared maximum.
pub type Layer = u32;

/// One symbol of a word-like payload: an alphabet letter or a variable `x<k>`.
///
/// `Var(0)` is the padding symbol `x0` of `FINA`; parameter and located words
/// use variables starting at `x1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Token {
    Letter(char),
    Var(u32),
}

impl Token {
    /// Render the token as text (`a`, `x0`, `x3`, ...).
    pub fn write_to(&self, out: &mut String) {
        match self {
            Token::Letter(c) => out.push(*c),
            Token::Var(k) => {
                let _ = write!(out, "x{k}");
            }
        }
    }

    /// Parse a single token. `x` followed by digits is a variable; any other
    /// single character is a letter (so a bare `x` is the letter `x`).
    pub fn parse(text: &str) -> Result<Token, Error> {
        let mut chars = text.chars();
        match (chars.next(), text.len()) {
            (None, _) => Err(Error::InvalidElement("empty token".into())),
            (Some(c), n) if n == c.len_utf8() => Ok(Token::Letter(c)),
            (Some('x'), _) => {
                let digits = &text[1..];
                if digits.bytes().all(|b| b.is_ascii_digit()) {
                    digits
                        .parse::<u32>()
                        .map(Token::Var)
                        .map_err(|_| Error::InvalidElement(alloc::format!("variable index out of range: {text}")))
                } else {
                    Err(Error::InvalidElement(alloc::format!("bad token: {text}")))
                }
            }
            _ => Err(Error::InvalidElement(alloc::format!("bad token: {text}"))),
        }
    }

    /// Variable index if this is a variable, else `None`.
    pub fn var(&self) -> Option<u32> {
        match self {
            Token::Var(k) => Some(*k),
            Token::Letter(_) => None,
        }
    }
}

/// Per-kind canonical payload.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Payload {
    /// Sorted `(position, value)` pairs, values >= 1. Empty = the internal
    /// zero element (identity), which never appears in fragments.
    Fin(Vec<(u32, u32)>),
    /// Sorted, nonempty set of naturals.
    FinSets(Vec<u32>),
    /// Parameter word: tokens over the alphabet and `x1..xk`; every variable
    /// occurs and first occurrences are strictly increasing. Empty = the
    /// layer-0 empty word.
    Word(Vec<Token>),
    /// Located word: sorted `(position, token)` entries with the same
    /// variable discipline as `Word`. Empty = internal zero.
    Located(Vec<(u32, Token)>),
    /// Eventually-`x0` sequence with the trailing `x0` run trimmed; no
    /// ordering constraint on variables. Empty = internal zero (all `x0`).
    FinA(Vec<Token>),
}

impl Payload {
    /// Kind prefix used in the text encoding.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Payload::Fin(_) => "FIN",
            Payload::FinSets(_) => "FINSETS",
            Payload::Word(_) => "W",
            Payload::Located(_) => "L",
            Payload::FinA(_) => "FINA",
        }
    }
}

/// A canonical element of one concrete semigroup, layer cached.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    pub(crate) sg: SgId,
    pub(crate) payload: Payload,
    pub(crate) layer: Layer,
}

impl Element {
    /// Identifier of the owning semigroup.
    pub fn semigroup_id(&self) -> SgId {
        self.sg
    }

    /// The cached layer; always equal to the layering map of the payload.
    pub fn layer(&self) -> Layer {
        self.layer
    }

    /// Borrow the canonical payload.
    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    /// True for the internal zero element (empty support / all-`x0`).
    ///
    /// Zero elements act as identities where the operation is defined, are
    /// parseable and printable, but are excluded from fragment enumeration
    /// and statement domains.
    pub fn is_zero(&self) -> bool {
        match &self.payload {
            Payload::Fin(s) => s.is_empty(),
            Payload::FinSets(s) => s.is_empty(),
            Payload::Word(t) => t.is_empty(),
            Payload::Located(e) => e.is_empty(),
            Payload::FinA(t) => t.is_empty(),
        }
    }

    /// Canonical text encoding; `parse` of the result round-trips.
    pub fn encode(&self) -> String {
        let mut out = String::new();
        out.push_str(self.payload.kind_name());
        out.push(' ');
        match &self.payload {
            Payload::Fin(support) => {
                out.push('{');
                for (i, (p, v)) in support.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "{p}:{v}");
                }
                out.push('}');
            }
            Payload::FinSets(set) => {
                out.push('{');
                for (i, p) in set.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "{p}");
                }
                out.push('}');
            }
            Payload::Word(tokens) | Payload::FinA(tokens) => {
                out.push('|');
                for (i, t) in tokens.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    t.write_to(&mut out);
                }
                out.push('|');
            }
            Payload::Located(entries) => {
                out.push('{');
                for (i, (p, t)) in entries.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "{p}:");
                    t.write_to(&mut out);
                }
                out.push('}');
            }
        }
        out
    }

    /// Support bitmask over positions `0..64`: which positions are occupied
    /// (for `FINA`, which indices hold a non-`x0` token). `None` when a
    /// position exceeds 63 or the kind is total (`W`).
    ///
    /// Two mask-carrying elements of the same partial kind combine (in the
    /// unordered variant) exactly when their masks are disjoint, which is the
    /// fast path of the law checkers and search kernels.
    pub fn support_mask(&self) -> Option<u64> {
        let mut mask = 0u64;
        let mut put = |p: u32| -> bool {
            if p >= 64 {
                return false;
            }
            mask |= 1u64 << p;
            true
        };
        let ok = match &self.payload {
            Payload::Fin(s) => s.iter().all(|(p, _)| put(*p)),
            Payload::FinSets(s) => s.iter().copied().all(&mut put),
            Payload::Located(e) => e.iter().all(|(p, _)| put(*p)),
            Payload::FinA(t) => t
                .iter()
                .enumerate()
                .filter(|(_, tok)| **tok != Token::Var(0))
                .all(|(i, _)| put(i as u32)),
            Payload::Word(_) => return None,
        };
        ok.then_some(mask)
    }

    /// Smallest and largest occupied position, `None` for the zero element.
    pub fn support_range(&self) -> Option<(u32, u32)> {
        let (min, max) = match &self.payload {
            Payload::Fin(s) => (s.first()?.0, s.last()?.0),
            Payload::FinSets(s) => (*s.first()?, *s.last()?),
            Payload::Located(e) => (e.first()?.0, e.last()?.0),
            Payload::FinA(t) => {
                let mut occupied = t
                    .iter()
                    .enumerate()
                    .filter(|(_, tok)| **tok != Token::Var(0))
                    .map(|(i, _)| i as u32);
                let first = occupied.next()?;
                (first, occupied.last().unwrap_or(first))
            }
            Payload::Word(_) => return None,
        };
        Some((min, max))
    }
}

/// Compute the layer of a canonical payload.
pub(crate) fn layer_of(payload: &Payload) -> Layer {
    match payload {
        Payload::Fin(s) => s.iter().map(|(_, v)| *v).max().unwrap_or(0),
        Payload::FinSets(_) => 0,
        Payload::Word(t) | Payload::FinA(t) => {
            t.iter().filter_map(Token::var).max().unwrap_or(0)
        }
        Payload::Located(e) => e.iter().filter_map(|(_, t)| t.var()).max().unwrap_or(0),
    }
}

/// Split `text` into the kind prefix and the body, e.g. `FIN {0:1}`.
pub(crate) fn split_kind(text: &str) -> Result<(&str, &str), Error> {
    let text = text.trim();
    let (kind, body) = text
        .split_once(' ')
        .ok_or_else(|| Error::InvalidElement(alloc::format!("missing payload: {text}")))?;
    Ok((kind, body.trim()))
}

/// Parse the inside of a `{...}` body into comma-separated raw items.
pub(crate) fn brace_items(body: &str) -> Result<Vec<&str>, Error> {
    let inner = body
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or_else(|| Error::InvalidElement(alloc::format!("expected {{...}}: {body}")))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    Ok(inner.split(',').collect())
}

/// Parse the inside of a `|...|` body into space-separated tokens.
pub(crate) fn bar_tokens(body: &str) -> Result<Vec<Token>, Error> {
    let inner = body
        .strip_prefix('|')
        .and_then(|b| b.strip_suffix('|'))
        .ok_or_else(|| Error::InvalidElement(alloc::format!("expected |...|: {body}")))?;
    let inner = inner.trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner.split_whitespace().map(Token::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_round_trip() {
        for text in ["a", "b", "x", "x0", "x1", "x12"] {
            let tok = Token::parse(text).unwrap();
            let mut out = String::new();
            tok.write_to(&mut out);
            assert_eq!(out, text);
        }
        assert_eq!(Token::parse("x").unwrap(), Token::Letter('x'));
        assert_eq!(Token::parse("x7").unwrap(), Token::Var(7));
        assert!(Token::parse("ab").is_err());
        assert!(Token::parse("x1a").is_err());
        assert!(Token::parse("").is_err());
    }

    #[test]
    fn layer_of_examples() {
        // FIN {0:2,3:1} has layer 2 (max value).
        assert_eq!(layer_of(&Payload::Fin(alloc::vec![(0, 2), (3, 1)])), 2);
        // A letters-only word sits in layer 0.
        assert_eq!(
            layer_of(&Payload::Word(alloc::vec![
                Token::Letter('a'),
                Token::Letter('b')
            ])),
            0
        );
        // L {5:a,9:x1} has layer 1.
        assert_eq!(
            layer_of(&Payload::Located(alloc::vec![
                (5, Token::Letter('a')),
                (9, Token::Var(1))
            ])),
            1
        );
    }
}
