//! Finitely presented regressive maps and their families.
//!
//! Every map is a finite table plus a deterministic tail rule, so an
//! application only ever reads finitely many entries:
//!
//! * **tetris** — a nondecreasing surjection `F: [0,K] -> [0,J]` with
//!   `F(0) = 0`, extended by `F(K+n) = J+n`; acts on `FIN` values.
//! * **substitution** — a prefix of an infinite parameter word `w~` over
//!   `A ∪ {x1,x2,...}` (first appearances increasing), extended by fresh
//!   variables in increasing order; acts on `W`/`L` by sending each `x_i`
//!   to the `i`-th entry of `w~` (letters pass through).
//! * **strong** — a prefix of `F: N -> A ∪ X` with `F(0) = x0` and variable
//!   values increasing without gaps, extended by fresh variables; acts on
//!   `FIN^A` by sending `x_k` to `F(k)` (letters pass through).
//!
//! Tables are kept in canonical trimmed form: trailing entries that repeat
//! the tail rule are dropped, so descriptor equality is extensional equality
//! of the presented maps.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::element::{Element, Layer, Payload, Token};
use crate::error::Error;
use crate::semigroup::{Semigroup, SemigroupKind};
use crate::zoo::{enumerate_fragment_upto, FragmentSpec, Limits};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapDescriptor {
    Identity,
    /// Canonical tetris table `F(0..=K)`; tail `F(K+n) = F(K)+n`.
    Tetris(Vec<u32>),
    /// Canonical substitution prefix `w~(1..=len)`; tail continues variables.
    Subst(Vec<Token>),
    /// Canonical strong-map prefix `F(0..=K)`; tail continues variables.
    Strong(Vec<Token>),
}

impl MapDescriptor {
    pub fn identity() -> MapDescriptor {
        MapDescriptor::Identity
    }

    /// Validating tetris constructor; trims the table to canonical form.
    pub fn tetris(table: &[u32]) -> Result<MapDescriptor, Error> {
        if table.is_empty() {
            return Err(Error::InvalidMap("tetris table must be nonempty".into()));
        }
        if table[0] != 0 {
            return Err(Error::InvalidMap("tetris table must start at 0".into()));
        }
        for w in table.windows(2) {
            if w[1] != w[0] && w[1] != w[0] + 1 {
                return Err(Error::InvalidMap(format!(
                    "tetris table must be a nondecreasing surjection onto an initial segment; step {}..{} is not",
                    w[0], w[1]
                )));
            }
        }
        let mut table = table.to_vec();
        while table.len() >= 2 && table[table.len() - 1] == table[table.len() - 2] + 1 {
            table.pop();
        }
        Ok(MapDescriptor::Tetris(table))
    }

    /// Unvalidated table, for constructing deliberate negative controls.
    pub fn tetris_unchecked(table: Vec<u32>) -> MapDescriptor {
        MapDescriptor::Tetris(table)
    }

    /// Validating substitution constructor; trims to canonical form.
    pub fn subst(prefix: &[Token]) -> Result<MapDescriptor, Error> {
        let mut max_var = 0u32;
        for t in prefix {
            match t {
                Token::Letter(_) => {}
                Token::Var(0) => {
                    return Err(Error::InvalidMap("substitution prefixes use x1,x2,...".into()))
                }
                Token::Var(v) => {
                    if *v > max_var + 1 {
                        return Err(Error::InvalidMap(format!(
                            "substitution prefix: x{v} appears before x{}",
                            max_var + 1
                        )));
                    }
                    max_var = max_var.max(*v);
                }
            }
        }
        let mut prefix = prefix.to_vec();
        loop {
            let Some(&last) = prefix.last() else { break };
            let rest_max = prefix[..prefix.len() - 1]
                .iter()
                .filter_map(Token::var)
                .max()
                .unwrap_or(0);
            if last == Token::Var(rest_max + 1) {
                prefix.pop();
            } else {
                break;
            }
        }
        Ok(MapDescriptor::Subst(prefix))
    }

    /// Validating strong-map constructor; trims to canonical form.
    pub fn strong(prefix: &[Token]) -> Result<MapDescriptor, Error> {
        if prefix.first() != Some(&Token::Var(0)) {
            return Err(Error::InvalidMap("strong map requires F(0) = x0".into()));
        }
        let mut level = 0u32;
        for t in &prefix[1..] {
            match t {
                Token::Letter(_) => {
                    if level > 0 {
                        return Err(Error::InvalidMap(
                            "strong map: letters may not follow variables above x0".into(),
                        ));
                    }
                }
                Token::Var(v) => {
                    if *v != level && *v != level + 1 {
                        return Err(Error::InvalidMap(format!(
                            "strong map: variable values must increase without gaps; got x{v} at level {level}"
                        )));
                    }
                    level = *v;
                }
            }
        }
        let mut prefix = prefix.to_vec();
        while prefix.len() >= 2 {
            let last = *prefix.last().unwrap();
            let rest_level = prefix[..prefix.len() - 1]
                .iter()
                .filter_map(Token::var)
                .max()
                .unwrap_or(0);
            if last == Token::Var(rest_level + 1) {
                prefix.pop();
            } else {
                break;
            }
        }
        Ok(MapDescriptor::Strong(prefix))
    }

    /// Kinds of element this map can act on.
    pub fn compatible_with(&self, kind: SemigroupKind) -> bool {
        match self {
            MapDescriptor::Identity => true,
            MapDescriptor::Tetris(_) => kind == SemigroupKind::Fin,
            MapDescriptor::Subst(_) => matches!(kind, SemigroupKind::W | SemigroupKind::L),
            MapDescriptor::Strong(_) => kind == SemigroupKind::FinA,
        }
    }

    /// Canonical descriptor text: `id`, `tetris 0,0,1`, `subst b|tail`,
    /// `strong x0,a,x1|tail`.
    pub fn encode(&self) -> String {
        let mut out = String::new();
        match self {
            MapDescriptor::Identity => out.push_str("id"),
            MapDescriptor::Tetris(table) => {
                out.push_str("tetris ");
                for (i, v) in table.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&format!("{v}"));
                }
            }
            MapDescriptor::Subst(prefix) => {
                out.push_str("subst ");
                push_tokens(&mut out, prefix);
                out.push_str("|tail");
            }
            MapDescriptor::Strong(prefix) => {
                out.push_str("strong ");
                push_tokens(&mut out, prefix);
                out.push_str("|tail");
            }
        }
        out
    }

    /// Parse descriptor text; the result is validated and canonical.
    pub fn parse(text: &str) -> Result<MapDescriptor, Error> {
        if text == "id" {
            return Ok(MapDescriptor::Identity);
        }
        let (kind, rest) = text
            .split_once(' ')
            .ok_or_else(|| Error::InvalidMap(format!("unknown map descriptor `{text}`")))?;
        match kind {
            "tetris" => {
                let mut table = Vec::new();
                for part in rest.split(',') {
                    let v: u32 = part
                        .trim()
                        .parse()
                        .map_err(|_| Error::InvalidMap(format!("bad tetris entry `{part}`")))?;
                    table.push(v);
                }
                MapDescriptor::tetris(&table)
            }
            "subst" => MapDescriptor::subst(&parse_prefix(rest)?),
            "strong" => MapDescriptor::strong(&parse_prefix(rest)?),
            _ => Err(Error::InvalidMap(format!("unknown map kind `{kind}`"))),
        }
    }

    /// Tetris table value at `v`, following the tail rule past the table.
    fn tetris_at(table: &[u32], v: u32) -> u32 {
        let k = (table.len() - 1) as u32;
        if v <= k {
            table[v as usize]
        } else {
            table[k as usize] + (v - k)
        }
    }

    /// Substitution entry `w~(i)` for `i >= 1`.
    fn subst_at(prefix: &[Token], i: u32) -> Token {
        if i as usize <= prefix.len() {
            prefix[i as usize - 1]
        } else {
            let max_var = prefix.iter().filter_map(Token::var).max().unwrap_or(0);
            Token::Var(max_var + (i - prefix.len() as u32))
        }
    }

    /// Strong-map value `F(k)` for `k >= 0`.
    fn strong_at(prefix: &[Token], k: u32) -> Token {
        if (k as usize) < prefix.len() {
            prefix[k as usize]
        } else {
            let level = prefix.iter().filter_map(Token::var).max().unwrap_or(0);
            Token::Var(level + (k + 1 - prefix.len() as u32))
        }
    }
}

fn push_tokens(out: &mut String, tokens: &[Token]) {
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        t.write_to(out);
    }
}

fn parse_prefix(text: &str) -> Result<Vec<Token>, Error> {
    let body = text
        .strip_suffix("|tail")
        .ok_or_else(|| Error::InvalidMap(format!("missing |tail in `{text}`")))?;
    let body = body.trim_end();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',').map(|p| Token::parse(p.trim())).collect()
}

/// Apply a map to an element of `sg`.
pub fn apply(m: &MapDescriptor, sg: &Semigroup, s: &Element) -> Result<Element, Error> {
    if s.semigroup_id() != sg.id() {
        return Err(Error::MixedSemigroups);
    }
    if !m.compatible_with(sg.kind()) {
        return Err(Error::KindMismatch(format!(
            "map `{}` does not act on {} elements",
            m.encode(),
            sg.kind().name()
        )));
    }
    let payload = match (m, s.payload()) {
        (MapDescriptor::Identity, _) => return Ok(s.clone()),
        (MapDescriptor::Tetris(table), Payload::Fin(entries)) => {
            let mut out: Vec<(u32, u32)> = Vec::with_capacity(entries.len());
            for &(p, v) in entries {
                let image = MapDescriptor::tetris_at(table, v);
                if image > 0 {
                    out.push((p, image));
                }
            }
            Payload::Fin(out)
        }
        (MapDescriptor::Subst(prefix), Payload::Word(tokens)) => Payload::Word(
            tokens
                .iter()
                .map(|t| match t.var() {
                    Some(i) => MapDescriptor::subst_at(prefix, i),
                    None => *t,
                })
                .collect(),
        ),
        (MapDescriptor::Subst(prefix), Payload::Located(entries)) => Payload::Located(
            entries
                .iter()
                .map(|(p, t)| {
                    let image = match t.var() {
                        Some(i) => MapDescriptor::subst_at(prefix, i),
                        None => *t,
                    };
                    (*p, image)
                })
                .collect(),
        ),
        (MapDescriptor::Strong(prefix), Payload::FinA(tokens)) => {
            let mut out: Vec<Token> = tokens
                .iter()
                .map(|t| match t.var() {
                    Some(k) => MapDescriptor::strong_at(prefix, k),
                    None => *t,
                })
                .collect();
            while out.last() == Some(&Token::Var(0)) {
                out.pop();
            }
            Payload::FinA(out)
        }
        _ => {
            return Err(Error::KindMismatch(format!(
                "map `{}` does not act on {} payloads",
                m.encode(),
                s.payload().kind_name()
            )))
        }
    };
    let out = sg.element_unchecked(payload);
    debug_assert!(sg.validate_payload(out.payload()).is_ok() || out.is_zero());
    Ok(out)
}

/// Composition: `apply(compose(m1, m2), s) = apply(m1, apply(m2, s))`.
pub fn compose(m1: &MapDescriptor, m2: &MapDescriptor) -> Result<MapDescriptor, Error> {
    match (m1, m2) {
        (MapDescriptor::Identity, m) | (m, MapDescriptor::Identity) => Ok(m.clone()),
        (MapDescriptor::Tetris(t1), MapDescriptor::Tetris(t2)) => {
            let k1 = (t1.len() - 1) as u32;
            let k2 = (t2.len() - 1) as u32;
            let j2 = t2[t2.len() - 1];
            let k = k2 + k1.saturating_sub(j2);
            let table: Vec<u32> = (0..=k)
                .map(|v| MapDescriptor::tetris_at(t1, MapDescriptor::tetris_at(t2, v)))
                .collect();
            MapDescriptor::tetris(&table)
        }
        (MapDescriptor::Subst(p1), MapDescriptor::Subst(p2)) => {
            let len = (p1.len() + p2.len()).max(1) as u32;
            let prefix: Vec<Token> = (1..=len)
                .map(|i| {
                    let mid = MapDescriptor::subst_at(p2, i);
                    match mid.var() {
                        Some(j) => MapDescriptor::subst_at(p1, j),
                        None => mid,
                    }
                })
                .collect();
            MapDescriptor::subst(&prefix)
        }
        (MapDescriptor::Strong(p1), MapDescriptor::Strong(p2)) => {
            let len = (p1.len() + p2.len()).max(1) as u32;
            let prefix: Vec<Token> = (0..len)
                .map(|k| {
                    let mid = MapDescriptor::strong_at(p2, k);
                    match mid.var() {
                        Some(j) => MapDescriptor::strong_at(p1, j),
                        None => mid,
                    }
                })
                .collect();
            MapDescriptor::strong(&prefix)
        }
        _ => Err(Error::KindMismatch(format!(
            "cannot compose `{}` with `{}`",
            m1.encode(),
            m2.encode()
        ))),
    }
}

/// Which defining condition a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegressiveViolationKind {
    /// (i) `f(s+t) != f(s)+f(t)` on a pair where both sides are defined.
    Homomorphism,
    /// (ii) `l(f(s)) > l(s)`.
    LayerDecrease,
    /// (iii) `l(s) <= l(t)` but `l(f(s)) > l(f(t))`.
    Monotone,
    /// (iv) `|l(f(s)) - l(f(t))| > |l(s) - l(t)|`.
    Lipschitz,
}

#[derive(Debug, Clone)]
pub struct RegressiveViolation {
    pub kind: RegressiveViolationKind,
    pub elements: Vec<Element>,
}

/// Report from [`verify_regressive`]. `passed()` tolerates warnings: pairs
/// where `s+t` is defined but the images fail to combine are surfaced as a
/// distinct class, since the defining conditions leave that case open.
#[derive(Debug, Clone)]
pub struct RegressiveReport {
    pub elements: u64,
    pub pairs_checked: u64,
    pub violations: Vec<RegressiveViolation>,
    pub undefined_image_pairs: Vec<(Element, Element)>,
}

impl RegressiveReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustively check conditions (i)–(iv) for a map over a fragment.
pub fn verify_regressive(
    m: &MapDescriptor,
    sg: &Semigroup,
    frag: &FragmentSpec,
    limits: &Limits,
) -> Result<RegressiveReport, Error> {
    let elems = enumerate_fragment_upto(sg, frag, limits)?;
    let images: Vec<Element> = elems
        .iter()
        .map(|e| apply(m, sg, e))
        .collect::<Result<_, _>>()?;

    let mut report = RegressiveReport {
        elements: elems.len() as u64,
        pairs_checked: 0,
        violations: Vec::new(),
        undefined_image_pairs: Vec::new(),
    };

    // (ii) per element.
    for (e, fe) in elems.iter().zip(&images) {
        if fe.layer() > e.layer() {
            report.violations.push(RegressiveViolation {
                kind: RegressiveViolationKind::LayerDecrease,
                elements: alloc::vec![e.clone(), fe.clone()],
            });
        }
    }

    // (iii)/(iv) depend only on layers, so they are checked on the distinct
    // (layer, image-layer) pairs with a first witness kept for each.
    let mut layer_map: BTreeMap<Layer, BTreeMap<Layer, usize>> = BTreeMap::new();
    for (i, (e, fe)) in elems.iter().zip(&images).enumerate() {
        layer_map
            .entry(e.layer())
            .or_default()
            .entry(fe.layer())
            .or_insert(i);
    }
    let layers: Vec<(Layer, &BTreeMap<Layer, usize>)> =
        layer_map.iter().map(|(l, m)| (*l, m)).collect();
    for (a, &(la, imgs_a)) in layers.iter().enumerate() {
        // Same layer, different image layers: (iii) fails both ways; report
        // once with the larger-image element first.
        if imgs_a.len() > 1 {
            let (_, &wmin) = imgs_a.iter().next().unwrap();
            let (_, &wmax) = imgs_a.iter().next_back().unwrap();
            report.violations.push(RegressiveViolation {
                kind: RegressiveViolationKind::Monotone,
                elements: alloc::vec![elems[wmax].clone(), elems[wmin].clone()],
            });
        }
        for &(lb, imgs_b) in &layers[a + 1..] {
            // la < lb by BTreeMap order.
            for (&ia, &wa) in imgs_a {
                for (&ib, &wb) in imgs_b {
                    if ia > ib {
                        report.violations.push(RegressiveViolation {
                            kind: RegressiveViolationKind::Monotone,
                            elements: alloc::vec![elems[wa].clone(), elems[wb].clone()],
                        });
                    }
                    if ib.abs_diff(ia) > lb.abs_diff(la) {
                        report.violations.push(RegressiveViolation {
                            kind: RegressiveViolationKind::Lipschitz,
                            elements: alloc::vec![elems[wa].clone(), elems[wb].clone()],
                        });
                    }
                }
            }
        }
    }

    // (i) on every defined pair.
    let masks: Option<Vec<u64>> = elems.iter().map(Element::support_mask).collect();
    let pair_indices: Vec<(usize, usize)> = match &masks {
        Some(masks) => {
            let mut buckets: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            for (i, m) in masks.iter().enumerate() {
                buckets.entry(*m).or_default().push(i);
            }
            let mut pairs = Vec::new();
            for (ma, va) in &buckets {
                for (mb, vb) in &buckets {
                    if ma & mb != 0 {
                        continue;
                    }
                    if pairs.len() as u128 + (va.len() * vb.len()) as u128
                        > limits.max_terms as u128
                    {
                        return Err(Error::FragmentTooLarge {
                            needed: (va.len() * vb.len()) as u128 + pairs.len() as u128,
                            cap: limits.max_terms as u128,
                        });
                    }
                    for &i in va {
                        for &j in vb {
                            pairs.push((i, j));
                        }
                    }
                }
            }
            pairs
        }
        None => {
            let n = elems.len() as u128;
            if n * n > limits.max_terms as u128 {
                return Err(Error::FragmentTooLarge {
                    needed: n * n,
                    cap: limits.max_terms as u128,
                });
            }
            (0..elems.len())
                .flat_map(|i| (0..elems.len()).map(move |j| (i, j)))
                .collect()
        }
    };
    for (i, j) in pair_indices {
        let (s, t) = (&elems[i], &elems[j]);
        let Some(st) = sg.combine(s, t)? else { continue };
        report.pairs_checked += 1;
        let fst = apply(m, sg, &st)?;
        match sg.combine(&images[i], &images[j])? {
            None => {
                if report.undefined_image_pairs.len() < 64 {
                    report.undefined_image_pairs.push((s.clone(), t.clone()));
                }
            }
            Some(sum) => {
                if sum != fst {
                    report.violations.push(RegressiveViolation {
                        kind: RegressiveViolationKind::Homomorphism,
                        elements: alloc::vec![s.clone(), t.clone()],
                    });
                }
            }
        }
    }

    report
        .violations
        .sort_by_cached_key(|v| v.elements.iter().map(Element::encode).collect::<Vec<_>>());
    Ok(report)
}

/// A finite family of maps over one semigroup kind.
#[derive(Debug, Clone)]
pub struct MapFamily {
    pub members: Vec<MapDescriptor>,
    pub closed_under_composition: bool,
}

impl MapFamily {
    /// Deduplicate and sort members by descriptor text.
    pub fn new(mut members: Vec<MapDescriptor>, closed_under_composition: bool) -> MapFamily {
        members.sort_by_cached_key(MapDescriptor::encode);
        members.dedup();
        MapFamily {
            members,
            closed_under_composition,
        }
    }

    pub fn identity_only() -> MapFamily {
        MapFamily::new(alloc::vec![MapDescriptor::Identity], true)
    }

    /// All canonical tetris tables on domains `[0,K]` with `K <= max_k`.
    pub fn all_tetris(max_k: u32) -> MapFamily {
        let mut members = Vec::new();
        let mut table = alloc::vec![0u32];
        fn rec(table: &mut Vec<u32>, max_len: usize, members: &mut Vec<MapDescriptor>) {
            members.push(MapDescriptor::tetris(table).unwrap());
            if table.len() == max_len {
                return;
            }
            let last = *table.last().unwrap();
            for next in [last, last + 1] {
                table.push(next);
                rec(table, max_len, members);
                table.pop();
            }
        }
        rec(&mut table, max_k as usize + 1, &mut members);
        MapFamily::new(members, true)
    }

    /// `{T^m : 0 <= m <= max_m}` where `T(n) = max(n-1, 0)`; `T^0` is `id`.
    pub fn iterated_tetris(max_m: u32) -> MapFamily {
        let mut members = alloc::vec![MapDescriptor::Identity];
        for m in 1..=max_m {
            members.push(MapDescriptor::tetris(&alloc::vec![0; m as usize + 1]).unwrap());
        }
        MapFamily::new(members, true)
    }

    /// Substitutions given by every length-`len` word over `alphabet` whose
    /// tokens are all letters.
    pub fn letter_word_substitutions(alphabet: &[char], len: u32) -> MapFamily {
        let mut members = Vec::new();
        let mut word: Vec<Token> = Vec::new();
        fn rec(
            alphabet: &[char],
            len: usize,
            word: &mut Vec<Token>,
            members: &mut Vec<MapDescriptor>,
        ) {
            if word.len() == len {
                members.push(MapDescriptor::subst(word).unwrap());
                return;
            }
            for &c in alphabet {
                word.push(Token::Letter(c));
                rec(alphabet, len, word, members);
                word.pop();
            }
        }
        rec(alphabet, len as usize, &mut word, &mut members);
        MapFamily::new(members, true)
    }

    /// Substitutions whose prefix is a length-`m` parameter word of layer
    /// `k` over the alphabet of `sg` (which must be a `W` semigroup).
    pub fn parameter_word_substitutions(
        sg: &Semigroup,
        k: Layer,
        m: u32,
    ) -> Result<MapFamily, Error> {
        if sg.kind() != SemigroupKind::W {
            return Err(Error::KindMismatch(
                "substitution prefixes are enumerated from a W semigroup".into(),
            ));
        }
        let words = crate::zoo::enumerate_fragment(
            sg,
            &FragmentSpec::new(k, m),
            &Limits::default(),
        )?;
        let members = words
            .iter()
            .map(|w| match w.payload() {
                Payload::Word(tokens) => MapDescriptor::subst(tokens),
                _ => Err(Error::KindMismatch("expected parameter words".into())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MapFamily::new(members, false))
    }

    /// Every valid strong-map prefix over `alphabet` with length <= max_len.
    pub fn strong_prefixes(alphabet: &[char], max_len: u32) -> MapFamily {
        let mut members = Vec::new();
        let mut prefix = alloc::vec![Token::Var(0)];
        fn rec(
            alphabet: &[char],
            max_len: usize,
            level: u32,
            prefix: &mut Vec<Token>,
            members: &mut Vec<MapDescriptor>,
        ) {
            members.push(MapDescriptor::strong(prefix).unwrap());
            if prefix.len() == max_len {
                return;
            }
            let mut nexts: Vec<(Token, u32)> = Vec::new();
            if level == 0 {
                for &c in alphabet {
                    nexts.push((Token::Letter(c), 0));
                }
            }
            nexts.push((Token::Var(level), level));
            nexts.push((Token::Var(level + 1), level + 1));
            for (t, new_level) in nexts {
                prefix.push(t);
                rec(alphabet, max_len, new_level, prefix, members);
                prefix.pop();
            }
        }
        rec(alphabet, max_len as usize, 0, &mut prefix, &mut members);
        MapFamily::new(members, false)
    }

    pub fn contains(&self, m: &MapDescriptor) -> bool {
        self.members.contains(m)
    }
}

/// One behaviour class of a family restricted to the layer-`<= i` part of a
/// fragment.
#[derive(Debug, Clone)]
pub struct RestrictionClass {
    /// Member with the least descriptor text.
    pub representative: MapDescriptor,
    pub members: Vec<MapDescriptor>,
}

/// Group family members by their action on the layer-`<= i` fragment part.
pub fn local_restrictions(
    fam: &MapFamily,
    sg: &Semigroup,
    frag: &FragmentSpec,
    i: Layer,
    limits: &Limits,
) -> Result<Vec<RestrictionClass>, Error> {
    let elems: Vec<Element> = enumerate_fragment_upto(sg, frag, limits)?
        .into_iter()
        .filter(|e| e.layer() <= i)
        .collect();
    let work = (elems.len() as u128) * (fam.members.len() as u128);
    if work > limits.max_terms as u128 {
        return Err(Error::FragmentTooLarge {
            needed: work,
            cap: limits.max_terms as u128,
        });
    }
    let mut classes: BTreeMap<Vec<String>, Vec<MapDescriptor>> = BTreeMap::new();
    for m in &fam.members {
        let signature: Vec<String> = elems
            .iter()
            .map(|e| apply(m, sg, e).map(|img| img.encode()))
            .collect::<Result<_, _>>()?;
        classes.entry(signature).or_default().push(m.clone());
    }
    let mut out: Vec<RestrictionClass> = classes
        .into_values()
        .map(|mut members| {
            members.sort_by_cached_key(MapDescriptor::encode);
            RestrictionClass {
                representative: members[0].clone(),
                members,
            }
        })
        .collect();
    out.sort_by_cached_key(|c| c.representative.encode());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin() -> Semigroup {
        Semigroup::new(SemigroupKind::Fin, None, false).unwrap()
    }

    fn w_ab() -> Semigroup {
        Semigroup::new(SemigroupKind::W, Some(&['a', 'b']), false).unwrap()
    }

    fn fina_ab() -> Semigroup {
        Semigroup::new(SemigroupKind::FinA, Some(&['a', 'b']), false).unwrap()
    }

    #[test]
    fn descriptor_text_round_trip() {
        for text in ["id", "tetris 0,0,1,1", "subst b|tail", "strong x0,a|tail"] {
            let m = MapDescriptor::parse(text).unwrap();
            assert_eq!(m.encode(), text);
            assert_eq!(MapDescriptor::parse(&m.encode()).unwrap(), m);
        }
    }

    #[test]
    fn canonical_trimming() {
        // Entries repeating the tail rule are dropped.
        assert_eq!(MapDescriptor::parse("tetris 0,1").unwrap().encode(), "tetris 0");
        assert_eq!(
            MapDescriptor::parse("subst b,x1|tail").unwrap().encode(),
            "subst b|tail"
        );
        assert_eq!(MapDescriptor::parse("subst x1|tail").unwrap().encode(), "subst |tail");
        assert_eq!(
            MapDescriptor::parse("strong x0,x1|tail").unwrap().encode(),
            "strong x0|tail"
        );
        assert!(MapDescriptor::parse("tetris 0,2").is_err());
        assert!(MapDescriptor::parse("tetris 1").is_err());
        assert!(MapDescriptor::parse("strong a|tail").is_err());
        assert!(MapDescriptor::parse("subst x2|tail").is_err());
    }

    #[test]
    fn tetris_apply_example() {
        let sg = fin();
        let t = MapDescriptor::parse("tetris 0,0").unwrap();
        let s = sg.parse_element("FIN {0:2,3:1}").unwrap();
        assert_eq!(apply(&t, &sg, &s).unwrap().encode(), "FIN {0:1}");
    }

    #[test]
    fn subst_apply_example() {
        let sg = w_ab();
        let m = MapDescriptor::parse("subst b|tail").unwrap();
        let s = sg.parse_element("W |x1 a x2|").unwrap();
        assert_eq!(apply(&m, &sg, &s).unwrap().encode(), "W |b a x1|");
    }

    #[test]
    fn strong_apply_example() {
        let sg = fina_ab();
        let m = MapDescriptor::parse("strong x0,a,x1|tail").unwrap();
        let s = sg.parse_element("FINA |x2 b x1|").unwrap();
        assert_eq!(apply(&m, &sg, &s).unwrap().encode(), "FINA |x1 b a|");
    }

    #[test]
    fn compose_tetris_example() {
        let t = MapDescriptor::parse("tetris 0,0").unwrap();
        let tt = compose(&t, &t).unwrap();
        assert_eq!(tt.encode(), "tetris 0,0,0");
        let table: Vec<u32> = (0..=3)
            .map(|v| match &tt {
                MapDescriptor::Tetris(t) => MapDescriptor::tetris_at(t, v),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(table, [0, 0, 0, 1]);
    }

    #[test]
    fn compose_identity_law() {
        let m = MapDescriptor::parse("tetris 0,0,1").unwrap();
        assert_eq!(compose(&MapDescriptor::Identity, &m).unwrap(), m);
        assert_eq!(compose(&m, &MapDescriptor::Identity).unwrap(), m);
    }

    #[test]
    fn compose_subst_agrees_with_sequential_application() {
        let sg = w_ab();
        let m1 = MapDescriptor::parse("subst a,x1|tail").unwrap();
        let m2 = MapDescriptor::parse("subst x1,b,x1|tail").unwrap();
        let composed = compose(&m1, &m2).unwrap();
        let words =
            enumerate_fragment_upto(&sg, &FragmentSpec::new(3, 3), &Limits::default()).unwrap();
        assert!(!words.is_empty());
        for w in &words {
            let sequential = apply(&m1, &sg, &apply(&m2, &sg, w).unwrap()).unwrap();
            assert_eq!(apply(&composed, &sg, w).unwrap(), sequential);
        }
    }

    #[test]
    fn compose_strong_agrees_with_sequential_application() {
        let sg = fina_ab();
        let m1 = MapDescriptor::parse("strong x0,a,x1,x1|tail").unwrap();
        let m2 = MapDescriptor::parse("strong x0,x0,x1,x2,x2|tail").unwrap();
        let composed = compose(&m1, &m2).unwrap();
        let elems =
            enumerate_fragment_upto(&sg, &FragmentSpec::new(3, 4), &Limits::default()).unwrap();
        for e in &elems {
            let sequential = apply(&m1, &sg, &apply(&m2, &sg, e).unwrap()).unwrap();
            assert_eq!(apply(&composed, &sg, e).unwrap(), sequential);
        }
    }

    #[test]
    fn verify_generalised_tetris_passes() {
        let sg = fin();
        let m = MapDescriptor::parse("tetris 0,0,1").unwrap();
        let report =
            verify_regressive(&m, &sg, &FragmentSpec::new(2, 3), &Limits::default()).unwrap();
        assert!(report.passed());
        assert!(report.undefined_image_pairs.is_empty());
        assert!(report.pairs_checked > 0);
    }

    #[test]
    fn verify_identity_passes() {
        let sg = w_ab();
        let report = verify_regressive(
            &MapDescriptor::Identity,
            &sg,
            &FragmentSpec::new(2, 3),
            &Limits::default(),
        )
        .unwrap();
        assert!(report.passed());
    }

    #[test]
    fn non_monotone_table_violates_condition_iii() {
        let sg = fin();
        let m = MapDescriptor::tetris_unchecked(alloc::vec![0, 2, 1]);
        let report =
            verify_regressive(&m, &sg, &FragmentSpec::new(2, 3), &Limits::default()).unwrap();
        assert!(!report.passed());
        let monotone: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.kind == RegressiveViolationKind::Monotone)
            .collect();
        assert!(!monotone.is_empty());
        // Every reported pair is a genuine witness: l(s) <= l(t) yet the
        // images invert.
        for v in &monotone {
            let (s, t) = (&v.elements[0], &v.elements[1]);
            assert!(s.layer() <= t.layer());
            let fs = apply(&m, &sg, s).unwrap();
            let ft = apply(&m, &sg, t).unwrap();
            assert!(fs.layer() > ft.layer());
        }
        // Including the layer-1 vs layer-2 inversion.
        assert!(monotone
            .iter()
            .any(|v| v.elements[0].layer() == 1 && v.elements[1].layer() == 2));
    }

    #[test]
    fn eight_canonical_tetris_tables_on_0_3() {
        let fam = MapFamily::all_tetris(3);
        let texts: Vec<String> = fam.members.iter().map(MapDescriptor::encode).collect();
        assert_eq!(texts.len(), 8);
        // Extensionally minimal tables: e.g. (0,0,1) repeats the tail rule
        // of (0,0), so only the latter appears.
        assert_eq!(
            texts,
            [
                "tetris 0",
                "tetris 0,0",
                "tetris 0,0,0",
                "tetris 0,0,0,0",
                "tetris 0,0,1,1",
                "tetris 0,1,1",
                "tetris 0,1,1,1",
                "tetris 0,1,2,2",
            ]
        );
    }

    #[test]
    fn tetris_restrictions_at_layer_one() {
        let sg = fin();
        let classes = local_restrictions(
            &MapFamily::all_tetris(3),
            &sg,
            &FragmentSpec::new(2, 2),
            1,
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].representative.encode(), "tetris 0");
        assert_eq!(classes[1].representative.encode(), "tetris 0,0");
        assert_eq!(classes[0].members.len(), 4);
        assert_eq!(classes[1].members.len(), 4);
    }

    #[test]
    fn iterated_tetris_restrictions_at_layer_two() {
        let sg = fin();
        let classes = local_restrictions(
            &MapFamily::iterated_tetris(4),
            &sg,
            &FragmentSpec::new(2, 2),
            2,
            &Limits::default(),
        )
        .unwrap();
        // T^0, T^1, and the collapsed T^{>=2}.
        assert_eq!(classes.len(), 3);
        let sizes: Vec<usize> = classes.iter().map(|c| c.members.len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 5);
        assert!(sizes.contains(&3));
    }

    #[test]
    fn identity_family_restriction_is_single_class() {
        let sg = fin();
        let classes = local_restrictions(
            &MapFamily::identity_only(),
            &sg,
            &FragmentSpec::new(2, 2),
            2,
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].representative, MapDescriptor::Identity);
    }

    #[test]
    fn subst_preserves_word_length() {
        let sg = w_ab();
        let words =
            enumerate_fragment_upto(&sg, &FragmentSpec::new(2, 3), &Limits::default()).unwrap();
        let m = MapDescriptor::parse("subst a,x1,b,x1|tail").unwrap();
        for w in &words {
            let img = apply(&m, &sg, w).unwrap();
            let (Payload::Word(src), Payload::Word(dst)) = (w.payload(), img.payload()) else {
                panic!("expected words");
            };
            assert_eq!(src.len(), dst.len());
        }
    }

    #[test]
    fn strong_maps_over_empty_alphabet_mirror_tetris() {
        // With no letters, a strong prefix is exactly a tetris table read on
        // variable indices.
        let fam = MapFamily::strong_prefixes(&[], 4);
        let tetris = MapFamily::all_tetris(3);
        assert_eq!(fam.members.len(), tetris.members.len());
    }
}
