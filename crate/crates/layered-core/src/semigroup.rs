//! Concrete layered semigroups: construction, validation, and the partial
//! binary operation.
//!
//! One [`Semigroup`] value is a descriptor bundling the kind, the alphabet
//! (for word-like kinds), and the optional order flag. All operations are
//! pure; [`Semigroup::combine`] returns `Ok(None)` where the partial
//! operation is undefined — undefinedness is a normal result, never an error.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::element::{bar_tokens, brace_items, layer_of, split_kind, Element, Layer, Payload, Token};
use crate::error::Error;

/// The five concrete kinds.
///
/// * `Fin` — finitely supported functions `N -> N` (values >= 1), sum defined
///   on disjoint supports, layer = max value;
/// * `W` — parameter words over an alphabet, total under concatenation,
///   layer = number of variables;
/// * `L` — located words (finite partial functions `N -> alphabet + vars`),
///   union of disjoint domains, layer = max variable index;
/// * `FinA` — sequences over `alphabet + {x0,x1,...}` that are eventually
///   `x0`, pointwise sum defined when supports are disjoint, commutative,
///   layer = max variable index;
/// * `FinSets` — nonempty finite subsets of `N` under disjoint union,
///   layered trivially at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemigroupKind {
    Fin,
    W,
    L,
    FinA,
    FinSets,
}

impl SemigroupKind {
    pub fn name(&self) -> &'static str {
        match self {
            SemigroupKind::Fin => "FIN",
            SemigroupKind::W => "W",
            SemigroupKind::L => "L",
            SemigroupKind::FinA => "FINA",
            SemigroupKind::FinSets => "FINSETS",
        }
    }

    pub fn parse(text: &str) -> Result<SemigroupKind, Error> {
        match text {
            "FIN" => Ok(SemigroupKind::Fin),
            "W" => Ok(SemigroupKind::W),
            "L" => Ok(SemigroupKind::L),
            "FINA" => Ok(SemigroupKind::FinA),
            "FINSETS" => Ok(SemigroupKind::FinSets),
            other => Err(Error::InvalidConfig(format!("unknown semigroup kind: {other}"))),
        }
    }

    /// Does this kind carry an alphabet?
    pub fn has_alphabet(&self) -> bool {
        matches!(self, SemigroupKind::W | SemigroupKind::L | SemigroupKind::FinA)
    }

    /// Is the operation total?
    pub fn is_total(&self) -> bool {
        matches!(self, SemigroupKind::W)
    }

    /// May the ordered variant (`max(supp s) < min(supp t)`) be requested?
    pub fn supports_order(&self) -> bool {
        matches!(self, SemigroupKind::Fin | SemigroupKind::L | SemigroupKind::FinA)
    }
}

/// Opaque identifier of a semigroup descriptor; equal descriptors get equal
/// ids. Elements carry it so cross-semigroup mixing is caught.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SgId(pub(crate) u64);

fn fnv1a(text: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// A concrete layered semigroup descriptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Semigroup {
    kind: SemigroupKind,
    alphabet: Vec<char>,
    ordered: bool,
    id: SgId,
}

impl Semigroup {
    /// Build a descriptor.
    ///
    /// `alphabet` is required (possibly empty) for `W`, `L` and `FinA` and
    /// must be absent for `Fin` and `FinSets`. `ordered` requests the
    /// ordered variant and is invalid on `W` (total, no supports) and
    /// `FinSets` (the classical statements never use it).
    pub fn new(
        kind: SemigroupKind,
        alphabet: Option<&[char]>,
        ordered: bool,
    ) -> Result<Semigroup, Error> {
        let alphabet = match (kind.has_alphabet(), alphabet) {
            (true, Some(a)) => {
                let mut a: Vec<char> = a.to_vec();
                a.sort_unstable();
                a.dedup();
                for c in &a {
                    if !c.is_ascii_alphanumeric() {
                        return Err(Error::InvalidConfig(format!(
                            "alphabet symbols must be ASCII alphanumeric, got {c:?}"
                        )));
                    }
                }
                a
            }
            (true, None) => {
                return Err(Error::InvalidConfig(format!(
                    "{} requires an alphabet (possibly empty)",
                    kind.name()
                )))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidConfig(format!(
                    "{} does not take an alphabet",
                    kind.name()
                )))
            }
            (false, None) => Vec::new(),
        };
        if ordered && !kind.supports_order() {
            return Err(Error::InvalidConfig(format!(
                "order flag is not applicable to {}",
                kind.name()
            )));
        }
        let mut descriptor = String::from(kind.name());
        if kind.has_alphabet() {
            descriptor.push_str(" {");
            descriptor.extend(alphabet.iter());
            descriptor.push('}');
        }
        if ordered {
            descriptor.push_str(" ordered");
        }
        Ok(Semigroup {
            kind,
            alphabet,
            ordered,
            id: SgId(fnv1a(&descriptor)),
        })
    }

    pub fn kind(&self) -> SemigroupKind {
        self.kind
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn ordered(&self) -> bool {
        self.ordered
    }

    pub fn id(&self) -> SgId {
        self.id
    }

    pub fn is_total(&self) -> bool {
        self.kind.is_total()
    }

    /// The internal zero element (identity), if the kind has one.
    ///
    /// Zeros exist so that regressive maps are total (a tetris table may
    /// collapse every value to 0); they are excluded from fragments and
    /// statement domains.
    pub fn zero(&self) -> Option<Element> {
        let payload = match self.kind {
            SemigroupKind::Fin => Payload::Fin(Vec::new()),
            SemigroupKind::W => Payload::Word(Vec::new()),
            SemigroupKind::L => Payload::Located(Vec::new()),
            SemigroupKind::FinA => Payload::FinA(Vec::new()),
            SemigroupKind::FinSets => return None,
        };
        Some(Element {
            sg: self.id,
            payload,
            layer: 0,
        })
    }

    // ---- element construction ----

    /// Validate a payload against this semigroup and wrap it as an element.
    pub fn element_from_payload(&self, payload: Payload) -> Result<Element, Error> {
        self.validate_payload(&payload)?;
        Ok(Element {
            sg: self.id,
            layer: layer_of(&payload),
            payload,
        })
    }

    pub(crate) fn element_unchecked(&self, payload: Payload) -> Element {
        debug_assert!(self.validate_payload(&payload).is_ok(), "non-canonical payload");
        Element {
            sg: self.id,
            layer: layer_of(&payload),
            payload,
        }
    }

    fn letter_ok(&self, c: char) -> bool {
        self.alphabet.binary_search(&c).is_ok()
    }

    pub(crate) fn validate_payload(&self, payload: &Payload) -> Result<(), Error> {
        match (self.kind, payload) {
            (SemigroupKind::Fin, Payload::Fin(support)) => {
                check_ascending(support.iter().map(|(p, _)| *p))?;
                if support.iter().any(|(_, v)| *v == 0) {
                    return Err(Error::InvalidElement("FIN values must be >= 1".into()));
                }
                Ok(())
            }
            (SemigroupKind::FinSets, Payload::FinSets(set)) => {
                if set.is_empty() {
                    return Err(Error::InvalidElement("FINSETS elements are nonempty".into()));
                }
                check_ascending(set.iter().copied())
            }
            (SemigroupKind::W, Payload::Word(tokens)) => {
                self.check_word_tokens(tokens.iter().copied(), false)
            }
            (SemigroupKind::L, Payload::Located(entries)) => {
                check_ascending(entries.iter().map(|(p, _)| *p))?;
                self.check_word_tokens(entries.iter().map(|(_, t)| *t), false)
            }
            (SemigroupKind::FinA, Payload::FinA(tokens)) => {
                if tokens.last() == Some(&Token::Var(0)) {
                    return Err(Error::InvalidElement(
                        "FINA sequences must not end in x0".into(),
                    ));
                }
                self.check_word_tokens(tokens.iter().copied(), true)
            }
            (kind, payload) => Err(Error::InvalidElement(format!(
                "{} payload does not belong to {}",
                payload.kind_name(),
                kind.name()
            ))),
        }
    }

    /// Shared token discipline. For `W`/`L` (`fina = false`): variables start
    /// at `x1`, a new variable must be exactly one past the largest seen, so
    /// first appearances are strictly increasing and gap-free. For `FinA`
    /// (`fina = true`): any variables, `x0` included.
    fn check_word_tokens(
        &self,
        tokens: impl Iterator<Item = Token>,
        fina: bool,
    ) -> Result<(), Error> {
        let mut max_seen = 0u32;
        for tok in tokens {
            match tok {
                Token::Letter(c) => {
                    if !self.letter_ok(c) {
                        return Err(Error::InvalidElement(format!(
                            "letter {c:?} is not in the alphabet"
                        )));
                    }
                }
                Token::Var(0) if fina => {}
                Token::Var(0) => {
                    return Err(Error::InvalidElement("x0 is only valid in FINA".into()))
                }
                Token::Var(k) if fina => max_seen = max_seen.max(k),
                Token::Var(k) => {
                    if k > max_seen + 1 {
                        return Err(Error::InvalidElement(format!(
                            "variable x{k} appears before x{}",
                            k - 1
                        )));
                    }
                    max_seen = max_seen.max(k);
                }
            }
        }
        Ok(())
    }

    // ---- text codec ----

    /// Parse one canonical element line, e.g. `FIN {0:1,2:2}`.
    pub fn parse_element(&self, text: &str) -> Result<Element, Error> {
        let (kind, body) = split_kind(text)?;
        if kind != self.kind.name() {
            return Err(Error::InvalidElement(format!(
                "expected a {} element, got {kind}",
                self.kind.name()
            )));
        }
        let payload = match self.kind {
            SemigroupKind::Fin => {
                let mut support = Vec::new();
                for item in brace_items(body)? {
                    let (p, v) = item.split_once(':').ok_or_else(|| {
                        Error::InvalidElement(format!("expected pos:value, got {item}"))
                    })?;
                    support.push((parse_nat(p)?, parse_nat(v)?));
                }
                Payload::Fin(support)
            }
            SemigroupKind::FinSets => {
                let set = brace_items(body)?
                    .into_iter()
                    .map(parse_nat)
                    .collect::<Result<Vec<_>, _>>()?;
                Payload::FinSets(set)
            }
            SemigroupKind::W => Payload::Word(bar_tokens(body)?),
            SemigroupKind::FinA => Payload::FinA(bar_tokens(body)?),
            SemigroupKind::L => {
                let mut entries = Vec::new();
                for item in brace_items(body)? {
                    let (p, t) = item.split_once(':').ok_or_else(|| {
                        Error::InvalidElement(format!("expected pos:token, got {item}"))
                    })?;
                    entries.push((parse_nat(p)?, Token::parse(t)?));
                }
                Payload::Located(entries)
            }
        };
        self.element_from_payload(payload)
    }

    // ---- the partial operation ----

    /// Layering map (same as the cached layer; here for interface symmetry).
    pub fn layer(&self, s: &Element) -> Layer {
        debug_assert_eq!(s.sg, self.id);
        s.layer
    }

    /// The partial sum. `Ok(None)` = undefined; errors only for mixed ids.
    pub fn combine(&self, s: &Element, t: &Element) -> Result<Option<Element>, Error> {
        if s.sg != self.id || t.sg != self.id {
            return Err(Error::MixedSemigroups);
        }
        if self.ordered && !ordered_apart(s, t) {
            return Ok(None);
        }
        let payload = match (&s.payload, &t.payload) {
            (Payload::Fin(a), Payload::Fin(b)) => {
                match merge_disjoint(a, b, |x| x.0, |x| *x) {
                    Some(merged) => Payload::Fin(merged),
                    None => return Ok(None),
                }
            }
            (Payload::FinSets(a), Payload::FinSets(b)) => {
                match merge_disjoint(a, b, |x| *x, |x| *x) {
                    Some(merged) => Payload::FinSets(merged),
                    None => return Ok(None),
                }
            }
            (Payload::Word(a), Payload::Word(b)) => {
                let mut tokens = a.clone();
                tokens.extend_from_slice(b);
                Payload::Word(tokens)
            }
            (Payload::Located(a), Payload::Located(b)) => {
                match merge_disjoint(a, b, |x| x.0, |x| *x) {
                    Some(merged) => Payload::Located(merged),
                    None => return Ok(None),
                }
            }
            (Payload::FinA(a), Payload::FinA(b)) => {
                let mut tokens = Vec::with_capacity(a.len().max(b.len()));
                for i in 0..a.len().max(b.len()) {
                    let x = a.get(i).copied().unwrap_or(Token::Var(0));
                    let y = b.get(i).copied().unwrap_or(Token::Var(0));
                    let merged = match (x, y) {
                        (Token::Var(0), other) => other,
                        (other, Token::Var(0)) => other,
                        _ => return Ok(None),
                    };
                    tokens.push(merged);
                }
                Payload::FinA(tokens)
            }
            _ => return Err(Error::MixedSemigroups),
        };
        Ok(Some(self.element_unchecked(payload)))
    }
}

/// Ordered-variant definedness: every position of `s` precedes every position
/// of `t`. Vacuously true when either support is empty.
fn ordered_apart(s: &Element, t: &Element) -> bool {
    match (s.support_range(), t.support_range()) {
        (Some((_, s_max)), Some((t_min, _))) => s_max < t_min,
        _ => true,
    }
}

/// Merge two position-sorted slices, failing on any shared position.
fn merge_disjoint<T: Clone, K: Ord + Copy>(
    a: &[T],
    b: &[T],
    key: impl Fn(&T) -> K,
    clone: impl Fn(&T) -> T,
) -> Option<Vec<T>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match key(&a[i]).cmp(&key(&b[j])) {
            core::cmp::Ordering::Less => {
                out.push(clone(&a[i]));
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(clone(&b[j]));
                j += 1;
            }
            core::cmp::Ordering::Equal => return None,
        }
    }
    out.extend(a[i..].iter().map(&clone));
    out.extend(b[j..].iter().map(&clone));
    Some(out)
}

fn check_ascending(values: impl Iterator<Item = u32>) -> Result<(), Error> {
    let mut prev: Option<u32> = None;
    for v in values {
        if let Some(p) = prev {
            if p >= v {
                return Err(Error::InvalidElement(
                    "positions must be strictly ascending".into(),
                ));
            }
        }
        prev = Some(v);
    }
    Ok(())
}

fn parse_nat(text: &str) -> Result<u32, Error> {
    let text = text.trim();
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::InvalidElement(format!("expected a natural number, got {text:?}")));
    }
    text.parse::<u32>()
        .map_err(|_| Error::InvalidElement(format!("number out of range: {text}")))
}
