//! Fragment enumeration and the cross-kind identifications.
//!
//! Fragments are the finite stand-ins for the infinite semigroups: a
//! [`FragmentSpec`] bounds the layer and the spatial size (max support
//! position for `FIN`/`FINSETS`/`L`, word length for `W`/`FINA`).
//!
//! For the partial kinds the bounds are inclusive upper bounds. For `W` a
//! fragment is one *stratum*: words of exactly `size_bound` letters-plus-
//! variables in exactly layer `max_layer` — concatenation adds lengths, so
//! word statements always work stratum by stratum. Use
//! [`enumerate_fragment_upto`] for the union of all strata below the bounds
//! (law checking, adequacy, map verification).

use alloc::vec::Vec;

use crate::element::{Element, Layer, Payload, Token};
use crate::error::Error;
use crate::semigroup::{Semigroup, SemigroupKind};

/// Bounds of a finite fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragmentSpec {
    /// Largest layer in the fragment (exact layer for `W`).
    pub max_layer: Layer,
    /// Largest support position (`FIN`, `FINSETS`, `L`) or word length
    /// (`W` exact, `FINA` upper bound).
    pub size_bound: u32,
}

impl FragmentSpec {
    pub fn new(max_layer: Layer, size_bound: u32) -> FragmentSpec {
        FragmentSpec { max_layer, size_bound }
    }
}

/// Enumeration and search caps.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Cap on elements produced by one fragment enumeration.
    pub max_elements: u64,
    /// Cap on terms visited by one span/law/adequacy sweep.
    pub max_terms: u64,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            max_elements: 1_000_000,
            max_terms: 10_000_000,
        }
    }
}

/// Exact number of elements [`enumerate_fragment`] would return.
pub fn fragment_count(sg: &Semigroup, frag: &FragmentSpec) -> u128 {
    let a = sg.alphabet().len() as u128;
    let m = frag.max_layer as u128;
    let s = frag.size_bound as u128;
    match sg.kind() {
        SemigroupKind::Fin => pow_u128(m + 1, s + 1).saturating_sub(1),
        SemigroupKind::FinSets => pow_u128(2, s + 1).saturating_sub(1),
        SemigroupKind::W => count_words_exact(a, frag.max_layer, frag.size_bound),
        SemigroupKind::L => {
            // DP over positions; state = largest variable introduced so far.
            let mut by_var = alloc::vec![0u128; frag.max_layer as usize + 1];
            by_var[0] = 1;
            for _ in 0..=s {
                let mut next = alloc::vec![0u128; by_var.len()];
                for (seen, count) in by_var.iter().enumerate() {
                    if *count == 0 {
                        continue;
                    }
                    // absent, or a letter, or a variable <= seen
                    next[seen] += count * (1 + a + seen as u128);
                    if seen < frag.max_layer as usize {
                        next[seen + 1] += count; // introduce the next variable
                    }
                }
                by_var = next;
            }
            by_var.iter().sum::<u128>().saturating_sub(1)
        }
        SemigroupKind::FinA => {
            // Sequences of length 1..=s whose final token is not x0.
            let t = a + m + 1;
            let mut total = 0u128;
            for len in 1..=s {
                total += pow_u128(t, len - 1) * (t - 1);
            }
            total
        }
    }
}

fn count_words_exact(a: u128, layer: Layer, len: u32) -> u128 {
    // DP over positions; state = largest variable introduced so far.
    let mut by_var = alloc::vec![0u128; layer as usize + 1];
    by_var[0] = 1;
    for _ in 0..len {
        let mut next = alloc::vec![0u128; by_var.len()];
        for (seen, count) in by_var.iter().enumerate() {
            if *count == 0 {
                continue;
            }
            next[seen] += count * (a + seen as u128);
            if seen < layer as usize {
                next[seen + 1] += count;
            }
        }
        by_var = next;
    }
    by_var[layer as usize]
}

pub(crate) fn pow_u128(base: u128, exp: u128) -> u128 {
    let mut out = 1u128;
    for _ in 0..exp {
        out = out.saturating_mul(base);
    }
    out
}

/// Enumerate the fragment, duplicate-free, in canonical (text) order.
///
/// Internal zero elements (empty support) are never produced.
pub fn enumerate_fragment(
    sg: &Semigroup,
    frag: &FragmentSpec,
    limits: &Limits,
) -> Result<Vec<Element>, Error> {
    let needed = fragment_count(sg, frag);
    if needed > limits.max_elements as u128 {
        return Err(Error::FragmentTooLarge {
            needed,
            cap: limits.max_elements as u128,
        });
    }
    let mut out = match sg.kind() {
        SemigroupKind::Fin => enum_fin(sg, frag),
        SemigroupKind::FinSets => enum_finsets(sg, frag),
        SemigroupKind::W => enum_words(sg, frag.max_layer, frag.size_bound, true),
        SemigroupKind::L => enum_located(sg, frag),
        SemigroupKind::FinA => enum_fina(sg, frag),
    };
    debug_assert_eq!(out.len() as u128, needed);
    out.sort_by_cached_key(Element::encode);
    Ok(out)
}

/// Union of fragments below the bounds. Identical to [`enumerate_fragment`]
/// except for `W`, where all strata `length <= size_bound`,
/// `layer <= max_layer` are merged.
pub fn enumerate_fragment_upto(
    sg: &Semigroup,
    frag: &FragmentSpec,
    limits: &Limits,
) -> Result<Vec<Element>, Error> {
    if sg.kind() != SemigroupKind::W {
        return enumerate_fragment(sg, frag, limits);
    }
    let mut needed = 0u128;
    for len in 0..=frag.size_bound {
        for layer in 0..=frag.max_layer {
            needed += count_words_exact(sg.alphabet().len() as u128, layer, len);
        }
    }
    if needed > limits.max_elements as u128 {
        return Err(Error::FragmentTooLarge {
            needed,
            cap: limits.max_elements as u128,
        });
    }
    let mut out = Vec::new();
    for len in 0..=frag.size_bound {
        for layer in 0..=frag.max_layer {
            out.extend(enum_words(sg, layer, len, true));
        }
    }
    out.sort_by_cached_key(Element::encode);
    Ok(out)
}

fn enum_fin(sg: &Semigroup, frag: &FragmentSpec) -> Vec<Element> {
    let mut out = Vec::new();
    let mut support: Vec<(u32, u32)> = Vec::new();
    fn rec(
        sg: &Semigroup,
        pos: u32,
        last_pos: u32,
        max_val: u32,
        support: &mut Vec<(u32, u32)>,
        out: &mut Vec<Element>,
    ) {
        if pos > last_pos {
            if !support.is_empty() {
                out.push(sg.element_unchecked(Payload::Fin(support.clone())));
            }
            return;
        }
        rec(sg, pos + 1, last_pos, max_val, support, out);
        for v in 1..=max_val {
            support.push((pos, v));
            rec(sg, pos + 1, last_pos, max_val, support, out);
            support.pop();
        }
    }
    if frag.max_layer > 0 {
        rec(sg, 0, frag.size_bound, frag.max_layer, &mut support, &mut out);
    }
    out
}

fn enum_finsets(sg: &Semigroup, frag: &FragmentSpec) -> Vec<Element> {
    let n = frag.size_bound + 1;
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let set: Vec<u32> = (0..n).filter(|p| mask & (1 << p) != 0).collect();
        out.push(sg.element_unchecked(Payload::FinSets(set)));
    }
    out
}

/// All canonical words of exactly `len` tokens; `exact_layer` fixes the
/// variable count, otherwise anything `<= layer` is kept.
fn enum_words(sg: &Semigroup, layer: Layer, len: u32, exact_layer: bool) -> Vec<Element> {
    let mut out = Vec::new();
    let mut tokens: Vec<Token> = Vec::new();
    fn rec(
        sg: &Semigroup,
        len: u32,
        layer: Layer,
        exact: bool,
        seen: u32,
        tokens: &mut Vec<Token>,
        out: &mut Vec<Element>,
    ) {
        if tokens.len() as u32 == len {
            if !exact || seen == layer {
                out.push(sg.element_unchecked(Payload::Word(tokens.clone())));
            }
            return;
        }
        for &c in sg.alphabet() {
            tokens.push(Token::Letter(c));
            rec(sg, len, layer, exact, seen, tokens, out);
            tokens.pop();
        }
        for k in 1..=seen.saturating_add(1).min(layer) {
            tokens.push(Token::Var(k));
            rec(sg, len, layer, exact, seen.max(k), tokens, out);
            tokens.pop();
        }
    }
    rec(sg, len, layer, exact_layer, 0, &mut tokens, &mut out);
    out
}

fn enum_located(sg: &Semigroup, frag: &FragmentSpec) -> Vec<Element> {
    let mut out = Vec::new();
    let mut entries: Vec<(u32, Token)> = Vec::new();
    fn rec(
        sg: &Semigroup,
        pos: u32,
        last_pos: u32,
        max_var: u32,
        seen: u32,
        entries: &mut Vec<(u32, Token)>,
        out: &mut Vec<Element>,
    ) {
        if pos > last_pos {
            if !entries.is_empty() {
                out.push(sg.element_unchecked(Payload::Located(entries.clone())));
            }
            return;
        }
        rec(sg, pos + 1, last_pos, max_var, seen, entries, out);
        for &c in sg.alphabet() {
            entries.push((pos, Token::Letter(c)));
            rec(sg, pos + 1, last_pos, max_var, seen, entries, out);
            entries.pop();
        }
        for k in 1..=seen.saturating_add(1).min(max_var) {
            entries.push((pos, Token::Var(k)));
            rec(sg, pos + 1, last_pos, max_var, seen.max(k), entries, out);
            entries.pop();
        }
    }
    rec(sg, 0, frag.size_bound, frag.max_layer, 0, &mut entries, &mut out);
    out
}

fn enum_fina(sg: &Semigroup, frag: &FragmentSpec) -> Vec<Element> {
    let mut out = Vec::new();
    let mut tokens: Vec<Token> = Vec::new();
    fn rec(sg: &Semigroup, left: u32, max_var: u32, tokens: &mut Vec<Token>, out: &mut Vec<Element>) {
        if tokens.last().map_or(false, |t| *t != Token::Var(0)) {
            out.push(sg.element_unchecked(Payload::FinA(tokens.clone())));
        }
        if left == 0 {
            return;
        }
        for k in 0..=max_var {
            tokens.push(Token::Var(k));
            rec(sg, left - 1, max_var, tokens, out);
            tokens.pop();
        }
        for &c in sg.alphabet() {
            tokens.push(Token::Letter(c));
            rec(sg, left - 1, max_var, tokens, out);
            tokens.pop();
        }
    }
    rec(sg, frag.size_bound, frag.max_layer, &mut tokens, &mut out);
    out
}

// ---- identifications between kinds ----

/// Identify a parameter word with a located word on positions `0..len`.
/// Layer is preserved; the empty word maps to the internal `L` zero.
pub fn embed_w_in_l(w_sg: &Semigroup, l_sg: &Semigroup, u: &Element) -> Result<Element, Error> {
    if w_sg.kind() != SemigroupKind::W || l_sg.kind() != SemigroupKind::L {
        return Err(Error::KindMismatch("embed_w_in_l expects W and L".into()));
    }
    let Payload::Word(tokens) = u.payload() else {
        return Err(Error::KindMismatch("not a W element".into()));
    };
    let entries: Vec<(u32, Token)> = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (i as u32, *t))
        .collect();
    l_sg.element_from_payload(Payload::Located(entries))
}

/// `FINSETS` is `FIN_1` (all values 1) viewed as sets.
pub fn finsets_to_fin(fin_sg: &Semigroup, s: &Element) -> Result<Element, Error> {
    let Payload::FinSets(set) = s.payload() else {
        return Err(Error::KindMismatch("not a FINSETS element".into()));
    };
    let support: Vec<(u32, u32)> = set.iter().map(|p| (*p, 1)).collect();
    fin_sg.element_from_payload(Payload::Fin(support))
}

/// Inverse of [`finsets_to_fin`]; requires a layer-1 `FIN` element.
pub fn fin_to_finsets(sets_sg: &Semigroup, f: &Element) -> Result<Element, Error> {
    let Payload::Fin(support) = f.payload() else {
        return Err(Error::KindMismatch("not a FIN element".into()));
    };
    if support.iter().any(|(_, v)| *v != 1) {
        return Err(Error::InvalidElement("only FIN_1 elements are finite sets".into()));
    }
    let set: Vec<u32> = support.iter().map(|(p, _)| *p).collect();
    sets_sg.element_from_payload(Payload::FinSets(set))
}

/// `FINA` over the empty alphabet is `FIN`: read each `x_k` as the value `k`.
pub fn fina_to_fin(fin_sg: &Semigroup, s: &Element) -> Result<Element, Error> {
    let Payload::FinA(tokens) = s.payload() else {
        return Err(Error::KindMismatch("not a FINA element".into()));
    };
    let mut support = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        match t {
            Token::Var(0) => {}
            Token::Var(k) => support.push((i as u32, *k)),
            Token::Letter(c) => {
                return Err(Error::InvalidElement(alloc::format!(
                    "letter {c:?} has no FIN reading"
                )))
            }
        }
    }
    fin_sg.element_from_payload(Payload::Fin(support))
}

/// Inverse of [`fina_to_fin`].
pub fn fin_to_fina(fina_sg: &Semigroup, f: &Element) -> Result<Element, Error> {
    let Payload::Fin(support) = f.payload() else {
        return Err(Error::KindMismatch("not a FIN element".into()));
    };
    let len = support.last().map_or(0, |(p, _)| p + 1);
    let mut tokens = alloc::vec![Token::Var(0); len as usize];
    for (p, v) in support {
        tokens[*p as usize] = Token::Var(*v);
    }
    fina_sg.element_from_payload(Payload::FinA(tokens))
}
