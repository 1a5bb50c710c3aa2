//! Witness certificates: serialised, independently re-checkable proofs.
//!
//! A certificate names a statement, the colouring it was searched against
//! (by digest), a block sequence, and per target layer the full span with
//! one witness term per value and the common colour:
//!
//! ```text
//! CERTIFICATE v1
//! statement fu m=2 N=2
//! colors 2
//! digest sha256:...
//! SEQUENCE
//! FINSETS {0}
//! FINSETS {1}
//! SPANS layer=0 color=0
//! FINSETS {0}<TAB>[1] id
//! FINSETS {0,1}<TAB>[1,2] id ; id
//! FINSETS {1}<TAB>[2] id
//! END
//! ```
//!
//! Tuple statements prepend the cut points to the term (`[cuts] [indices]
//! maps`); the arithmetic-progression statement stores the progression
//! start and difference as the sequence and bare integers as values.
//!
//! [`verify_certificate`] re-derives everything from the statement text
//! using only the semigroup, map, and span primitives — never the searcher —
//! and reports the first failure by a fixed category precedence: malformed,
//! digest-mismatch, coloring-not-total, sequence-invalid,
//! not-block-sequence, then per value line map-not-in-family,
//! term-mismatch, wrong-layer, color-mismatch, and finally incomplete.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::color::Coloring;
use crate::element::{Element, Layer};
use crate::error::Error;
use crate::maps::MapDescriptor;
use crate::span::{enumerate_span, enumerate_tuple_span, evaluate_term, is_block_sequence};
use crate::statement::{Realization, SpanInstance, Statement, TupleInstance, VdwInstance};
use crate::zoo::Limits;

/// One `value<TAB>term` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueLine {
    /// Canonical point text (element, tuple, or bare integer).
    pub value: String,
    /// Cut points, tuple statements only.
    pub cuts: Option<Vec<u32>>,
    /// 1-based sequence indices; empty for integer statements.
    pub indices: Vec<u32>,
    /// Map descriptor texts, one per index.
    pub maps: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanSection {
    pub layer: Layer,
    pub color: u32,
    pub lines: Vec<ValueLine>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub statement: Statement,
    pub r: u32,
    pub digest: String,
    /// Element texts; for the integer statement, the start and difference.
    pub sequence: Vec<String>,
    pub sections: Vec<SpanSection>,
}

impl Certificate {
    pub fn render(&self) -> String {
        let mut out = String::from("CERTIFICATE v1\n");
        out.push_str(&self.statement.encode());
        out.push('\n');
        out.push_str(&alloc::format!("colors {}\n", self.r));
        out.push_str(&alloc::format!("digest {}\n", self.digest));
        out.push_str("SEQUENCE\n");
        for s in &self.sequence {
            out.push_str(s);
            out.push('\n');
        }
        for sec in &self.sections {
            out.push_str(&alloc::format!(
                "SPANS layer={} color={}\n",
                sec.layer, sec.color
            ));
            for line in &sec.lines {
                out.push_str(&line.value);
                if !line.indices.is_empty() {
                    out.push('\t');
                    if let Some(cuts) = &line.cuts {
                        push_bracketed(&mut out, cuts);
                        out.push(' ');
                    }
                    push_bracketed(&mut out, &line.indices);
                    out.push(' ');
                    for (i, m) in line.maps.iter().enumerate() {
                        if i > 0 {
                            out.push_str(" ; ");
                        }
                        out.push_str(m);
                    }
                }
                out.push('\n');
            }
        }
        out.push_str("END\n");
        out
    }

    /// Strict structural parse; element-level checks happen in
    /// [`verify_certificate`].
    pub fn parse(text: &str) -> Result<Certificate, Error> {
        let mut lines = text.lines().enumerate().peekable();
        let mut expect = |want: &str| -> Result<(), Error> {
            match lines.next() {
                Some((_, l)) if l == want => Ok(()),
                Some((i, l)) => Err(Error::Parse {
                    line: i + 1,
                    msg: alloc::format!("expected `{want}`, found `{l}`"),
                }),
                None => Err(Error::Parse {
                    line: 0,
                    msg: alloc::format!("expected `{want}`, found end of file"),
                }),
            }
        };
        expect("CERTIFICATE v1")?;
        let mut lines = text.lines().enumerate().skip(1).peekable();
        let (i, statement_line) = lines.next().ok_or(Error::Parse {
            line: 2,
            msg: "missing statement line".into(),
        })?;
        let statement =
            Statement::parse(statement_line).map_err(|e| e.at_line(i + 1))?;
        let (i, colors_line) = lines.next().ok_or(Error::Parse {
            line: 3,
            msg: "missing colors line".into(),
        })?;
        let r: u32 = colors_line
            .strip_prefix("colors ")
            .and_then(|v| v.parse().ok())
            .ok_or(Error::Parse {
                line: i + 1,
                msg: alloc::format!("expected `colors r`, found `{colors_line}`"),
            })?;
        let (i, digest_line) = lines.next().ok_or(Error::Parse {
            line: 4,
            msg: "missing digest line".into(),
        })?;
        let digest = digest_line
            .strip_prefix("digest ")
            .ok_or(Error::Parse {
                line: i + 1,
                msg: alloc::format!("expected `digest ...`, found `{digest_line}`"),
            })?
            .into();
        match lines.next() {
            Some((_, "SEQUENCE")) => {}
            Some((i, l)) => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: alloc::format!("expected `SEQUENCE`, found `{l}`"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 5,
                    msg: "missing SEQUENCE section".into(),
                })
            }
        }
        let mut sequence = Vec::new();
        while let Some((_, l)) = lines.peek() {
            if l.starts_with("SPANS ") || *l == "END" {
                break;
            }
            sequence.push(String::from(lines.next().unwrap().1));
        }
        let mut sections = Vec::new();
        let mut ended = false;
        while let Some((i, l)) = lines.next() {
            if l == "END" {
                ended = true;
                if let Some((j, extra)) = lines.next() {
                    if !extra.is_empty() {
                        return Err(Error::Parse {
                            line: j + 1,
                            msg: alloc::format!("unexpected content after END: `{extra}`"),
                        });
                    }
                }
                break;
            }
            let header = l.strip_prefix("SPANS ").ok_or(Error::Parse {
                line: i + 1,
                msg: alloc::format!("expected `SPANS layer=k color=c` or `END`, found `{l}`"),
            })?;
            let (layer, color) = parse_section_header(header).ok_or(Error::Parse {
                line: i + 1,
                msg: alloc::format!("bad section header `{l}`"),
            })?;
            let mut section = SpanSection {
                layer,
                color,
                lines: Vec::new(),
            };
            while let Some((_, l)) = lines.peek() {
                if l.starts_with("SPANS ") || *l == "END" {
                    break;
                }
                let (j, l) = lines.next().unwrap();
                section.lines.push(parse_value_line(l).map_err(|e| e.at_line(j + 1))?);
            }
            sections.push(section);
        }
        if !ended {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: "missing END".into(),
            });
        }
        Ok(Certificate {
            statement,
            r,
            digest,
            sequence,
            sections,
        })
    }
}

fn push_bracketed(out: &mut String, nums: &[u32]) {
    out.push('[');
    for (i, n) in nums.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&alloc::format!("{n}"));
    }
    out.push(']');
}

fn parse_section_header(header: &str) -> Option<(Layer, u32)> {
    let (layer_part, color_part) = header.split_once(' ')?;
    let layer = layer_part.strip_prefix("layer=")?.parse().ok()?;
    let color = color_part.strip_prefix("color=")?.parse().ok()?;
    Some((layer, color))
}

fn parse_bracketed(text: &str) -> Option<(Vec<u32>, &str)> {
    let rest = text.strip_prefix('[')?;
    let close = rest.find(']')?;
    let nums = rest[..close]
        .split(',')
        .map(|p| p.parse::<u32>().ok())
        .collect::<Option<Vec<_>>>()?;
    Some((nums, &rest[close + 1..]))
}

fn parse_value_line(line: &str) -> Result<ValueLine, Error> {
    let Some((value, term)) = line.split_once('\t') else {
        return Ok(ValueLine {
            value: line.into(),
            cuts: None,
            indices: Vec::new(),
            maps: Vec::new(),
        });
    };
    let bad = || Error::Parse {
        line: 0,
        msg: alloc::format!("bad term `{term}`"),
    };
    let (first, rest) = parse_bracketed(term).ok_or_else(bad)?;
    let (cuts, indices, rest) = match rest.strip_prefix(" [") {
        Some(_) => {
            let (second, rest2) = parse_bracketed(&rest[1..]).ok_or_else(bad)?;
            (Some(first), second, rest2)
        }
        None => (None, first, rest),
    };
    let maps_text = rest.strip_prefix(' ').ok_or_else(bad)?;
    if maps_text.is_empty() {
        return Err(bad());
    }
    let maps: Vec<String> = maps_text.split(" ; ").map(String::from).collect();
    Ok(ValueLine {
        value: value.into(),
        cuts,
        indices,
        maps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyFailureKind {
    Malformed,
    DigestMismatch,
    ColoringNotTotal,
    SequenceInvalid,
    NotBlockSequence,
    MapNotInFamily,
    TermMismatch,
    WrongLayer,
    ColorMismatch,
    Incomplete,
}

impl VerifyFailureKind {
    pub fn name(&self) -> &'static str {
        match self {
            VerifyFailureKind::Malformed => "malformed",
            VerifyFailureKind::DigestMismatch => "digest-mismatch",
            VerifyFailureKind::ColoringNotTotal => "coloring-not-total",
            VerifyFailureKind::SequenceInvalid => "sequence-invalid",
            VerifyFailureKind::NotBlockSequence => "not-block-sequence",
            VerifyFailureKind::MapNotInFamily => "map-not-in-family",
            VerifyFailureKind::TermMismatch => "term-mismatch",
            VerifyFailureKind::WrongLayer => "wrong-layer",
            VerifyFailureKind::ColorMismatch => "color-mismatch",
            VerifyFailureKind::Incomplete => "incomplete",
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyFailure {
    pub kind: VerifyFailureKind,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub enum VerifyOutcome {
    Valid,
    Invalid(VerifyFailure),
}

impl VerifyOutcome {
    pub fn ok(&self) -> bool {
        matches!(self, VerifyOutcome::Valid)
    }

    pub fn failure(&self) -> Option<&VerifyFailure> {
        match self {
            VerifyOutcome::Valid => None,
            VerifyOutcome::Invalid(f) => Some(f),
        }
    }
}

fn fail(kind: VerifyFailureKind, detail: String) -> VerifyFailure {
    VerifyFailure { kind, detail }
}

/// Re-check a certificate against a colouring from first principles.
pub fn verify_certificate(text: &str, col: &Coloring, limits: &Limits) -> VerifyOutcome {
    match verify_inner(text, col, limits) {
        Ok(()) => VerifyOutcome::Valid,
        Err(f) => VerifyOutcome::Invalid(f),
    }
}

fn verify_inner(text: &str, col: &Coloring, limits: &Limits) -> Result<(), VerifyFailure> {
    use VerifyFailureKind as K;

    // Malformed: structure, statement, headers.
    let cert = Certificate::parse(text)
        .map_err(|e| fail(K::Malformed, alloc::format!("{e}")))?;
    let realization = cert
        .statement
        .realize(limits)
        .map_err(|e| fail(K::Malformed, alloc::format!("{e}")))?;
    if cert.r != col.r() {
        return Err(fail(
            K::Malformed,
            alloc::format!("certificate colors {} but colouring has r={}", cert.r, col.r()),
        ));
    }
    let k_set: Vec<Layer> = match &realization {
        Realization::Span(i) => i.k_set.clone(),
        Realization::Tuple(i) => alloc::vec![i.k],
        Realization::Vdw(_) => alloc::vec![0],
    };
    let mut seen_layers = BTreeSet::new();
    for sec in &cert.sections {
        if !k_set.contains(&sec.layer) {
            return Err(fail(
                K::Malformed,
                alloc::format!("section layer {} is not a target layer", sec.layer),
            ));
        }
        if !seen_layers.insert(sec.layer) {
            return Err(fail(
                K::Malformed,
                alloc::format!("duplicate section for layer {}", sec.layer),
            ));
        }
        if sec.color >= cert.r {
            return Err(fail(
                K::Malformed,
                alloc::format!("section colour {} out of range", sec.color),
            ));
        }
    }

    // DigestMismatch.
    if cert.digest != col.digest() {
        return Err(fail(
            K::DigestMismatch,
            alloc::format!("certificate names {}, colouring is {}", cert.digest, col.digest()),
        ));
    }

    // ColoringNotTotal over the statement's domain.
    if let Some(p) = col.first_uncovered(realization.domain().iter()) {
        return Err(fail(
            K::ColoringNotTotal,
            alloc::format!("domain point `{}` is uncoloured", p.encode()),
        ));
    }

    match &realization {
        Realization::Span(inst) => verify_span(&cert, inst, col, limits),
        Realization::Tuple(inst) => verify_tuple(&cert, inst, col, limits),
        Realization::Vdw(inst) => verify_vdw(&cert, inst, col),
    }
}

fn parse_sequence(
    cert: &Certificate,
    sg: &crate::semigroup::Semigroup,
    candidates: &[Element],
    block_len: u32,
) -> Result<Vec<Element>, VerifyFailure> {
    use VerifyFailureKind as K;
    if cert.sequence.len() != block_len as usize {
        return Err(fail(
            K::SequenceInvalid,
            alloc::format!(
                "sequence has {} entries, statement needs {block_len}",
                cert.sequence.len()
            ),
        ));
    }
    let pool: BTreeSet<String> = candidates.iter().map(Element::encode).collect();
    let mut xs = Vec::with_capacity(cert.sequence.len());
    for line in &cert.sequence {
        let e = sg
            .parse_element(line)
            .map_err(|_| fail(K::SequenceInvalid, alloc::format!("unparseable element `{line}`")))?;
        if !pool.contains(line) {
            return Err(fail(
                K::SequenceInvalid,
                alloc::format!("`{line}` is not a candidate for this statement"),
            ));
        }
        xs.push(e);
    }
    Ok(xs)
}

fn check_line_maps(
    line: &ValueLine,
    family: &crate::maps::MapFamily,
) -> Result<Vec<MapDescriptor>, VerifyFailure> {
    use VerifyFailureKind as K;
    let mut maps = Vec::with_capacity(line.maps.len());
    for text in &line.maps {
        let m = MapDescriptor::parse(text)
            .map_err(|_| fail(K::MapNotInFamily, alloc::format!("unparseable map `{text}`")))?;
        if !family.contains(&m) {
            return Err(fail(
                K::MapNotInFamily,
                alloc::format!("map `{text}` is not in the statement family"),
            ));
        }
        maps.push(m);
    }
    Ok(maps)
}

fn section_colors(
    cert: &Certificate,
) -> BTreeMap<Layer, (u32, &[ValueLine])> {
    cert.sections
        .iter()
        .map(|s| (s.layer, (s.color, s.lines.as_slice())))
        .collect()
}

fn verify_span(
    cert: &Certificate,
    inst: &SpanInstance,
    col: &Coloring,
    limits: &Limits,
) -> Result<(), VerifyFailure> {
    use VerifyFailureKind as K;
    let xs = parse_sequence(cert, &inst.sg, &inst.candidates, inst.block_len)?;

    let check = is_block_sequence(&inst.sg, &xs, &inst.family, inst.block_len, limits)
        .map_err(|e| fail(K::Malformed, alloc::format!("{e}")))?;
    if let Some((indices, maps)) = check.counterexample {
        let maps: Vec<String> = maps.iter().map(MapDescriptor::encode).collect();
        return Err(fail(
            K::NotBlockSequence,
            alloc::format!("term at indices {indices:?} with maps {maps:?} is undefined"),
        ));
    }

    for sec in &cert.sections {
        for line in &sec.lines {
            let maps = check_line_maps(line, &inst.family)?;
            if line.cuts.is_some() {
                return Err(fail(
                    K::TermMismatch,
                    alloc::format!("unexpected cut points on `{}`", line.value),
                ));
            }
            let value = evaluate_term(&inst.sg, &xs, &line.indices, &maps)
                .ok()
                .flatten()
                .ok_or_else(|| {
                    fail(
                        K::TermMismatch,
                        alloc::format!("term for `{}` does not evaluate", line.value),
                    )
                })?;
            if value.encode() != line.value {
                return Err(fail(
                    K::TermMismatch,
                    alloc::format!("term evaluates to `{}`, line says `{}`", value.encode(), line.value),
                ));
            }
            if value.layer() != sec.layer {
                return Err(fail(
                    K::WrongLayer,
                    alloc::format!("`{}` has layer {}, section says {}", line.value, value.layer(), sec.layer),
                ));
            }
            match col.color_of_text(&line.value) {
                Some(c) if c == sec.color => {}
                Some(c) => {
                    return Err(fail(
                        K::ColorMismatch,
                        alloc::format!("`{}` has colour {c}, section says {}", line.value, sec.color),
                    ))
                }
                None => {
                    return Err(fail(
                        K::ColorMismatch,
                        alloc::format!("`{}` is uncoloured", line.value),
                    ))
                }
            }
        }
    }

    // Incomplete: every target layer needs a section listing the full span.
    let sections = section_colors(cert);
    for &k in &inst.k_set {
        let Some((_, lines)) = sections.get(&k) else {
            return Err(fail(
                K::Incomplete,
                alloc::format!("missing section for layer {k}"),
            ));
        };
        let listed: BTreeSet<&str> = lines.iter().map(|l| l.value.as_str()).collect();
        let span = enumerate_span(&inst.sg, &xs, &inst.family, k, inst.block_len, limits)
            .map_err(|e| fail(K::Malformed, alloc::format!("{e}")))?;
        for term in &span {
            let text = term.value.encode();
            if !listed.contains(text.as_str()) {
                return Err(fail(
                    K::Incomplete,
                    alloc::format!("layer-{k} span value `{text}` is missing"),
                ));
            }
        }
    }
    Ok(())
}

fn verify_tuple(
    cert: &Certificate,
    inst: &TupleInstance,
    col: &Coloring,
    limits: &Limits,
) -> Result<(), VerifyFailure> {
    use VerifyFailureKind as K;
    let xs = parse_sequence(cert, &inst.sg, &inst.candidates, inst.block_len)?;

    let check = is_block_sequence(&inst.sg, &xs, &inst.family, inst.block_len, limits)
        .map_err(|e| fail(K::Malformed, alloc::format!("{e}")))?;
    if !check.is_block {
        return Err(fail(
            K::NotBlockSequence,
            "an index/map choice over the sequence is undefined".into(),
        ));
    }

    for sec in &cert.sections {
        for line in &sec.lines {
            let maps = check_line_maps(line, &inst.family)?;
            let bad_term = |msg: String| fail(K::TermMismatch, msg);
            let Some(cuts) = &line.cuts else {
                return Err(bad_term(alloc::format!("missing cut points on `{}`", line.value)));
            };
            if cuts.len() != inst.m as usize
                || cuts.windows(2).any(|w| w[0] >= w[1])
                || cuts.first().is_some_and(|&c| c == 0)
                || cuts.last() != Some(&(line.indices.len() as u32))
            {
                return Err(bad_term(alloc::format!("bad cut points on `{}`", line.value)));
            }
            let mut values = Vec::new();
            let mut start = 0usize;
            for &cut in cuts {
                let end = cut as usize;
                let v = evaluate_term(&inst.sg, &xs, &line.indices[start..end], &maps[start..end])
                    .ok()
                    .flatten()
                    .ok_or_else(|| {
                        bad_term(alloc::format!("term for `{}` does not evaluate", line.value))
                    })?;
                values.push(v);
                start = end;
            }
            let text = crate::color::Point::Tuple(values.clone()).encode();
            if text != line.value {
                return Err(bad_term(alloc::format!(
                    "term evaluates to `{text}`, line says `{}`",
                    line.value
                )));
            }
            if let Some(v) = values.iter().find(|v| v.layer() != sec.layer) {
                return Err(fail(
                    K::WrongLayer,
                    alloc::format!("component `{}` has layer {}, section says {}", v.encode(), v.layer(), sec.layer),
                ));
            }
            let tuple_check = is_block_sequence(&inst.sg, &values, &inst.family, inst.m, limits)
                .map_err(|e| fail(K::Malformed, alloc::format!("{e}")))?;
            if !tuple_check.is_block {
                return Err(fail(
                    K::NotBlockSequence,
                    alloc::format!("tuple `{}` is not itself a block sequence", line.value),
                ));
            }
            match col.color_of_text(&line.value) {
                Some(c) if c == sec.color => {}
                Some(c) => {
                    return Err(fail(
                        K::ColorMismatch,
                        alloc::format!("`{}` has colour {c}, section says {}", line.value, sec.color),
                    ))
                }
                None => {
                    return Err(fail(
                        K::ColorMismatch,
                        alloc::format!("`{}` is uncoloured", line.value),
                    ))
                }
            }
        }
    }

    let sections = section_colors(cert);
    let Some((_, lines)) = sections.get(&inst.k) else {
        return Err(fail(
            K::Incomplete,
            alloc::format!("missing section for layer {}", inst.k),
        ));
    };
    let listed: BTreeSet<&str> = lines.iter().map(|l| l.value.as_str()).collect();
    let tuples = enumerate_tuple_span(
        &inst.sg,
        &xs,
        &inst.family,
        inst.m,
        inst.k,
        inst.block_len,
        limits,
    )
    .map_err(|e| fail(K::Malformed, alloc::format!("{e}")))?;
    for t in &tuples {
        let text = crate::color::Point::Tuple(t.values.clone()).encode();
        if !listed.contains(text.as_str()) {
            return Err(fail(
                K::Incomplete,
                alloc::format!("tuple-span value `{text}` is missing"),
            ));
        }
    }
    Ok(())
}

fn verify_vdw(
    cert: &Certificate,
    inst: &VdwInstance,
    col: &Coloring,
) -> Result<(), VerifyFailure> {
    use VerifyFailureKind as K;
    let nums: Option<Vec<u64>> = cert
        .sequence
        .iter()
        .map(|s| s.parse::<u64>().ok())
        .collect();
    let bad_seq = |msg: String| fail(K::SequenceInvalid, msg);
    let Some(nums) = nums else {
        return Err(bad_seq("sequence entries must be integers".into()));
    };
    let [a, d] = nums[..] else {
        return Err(bad_seq(
            "sequence must hold the progression start and difference".into(),
        ));
    };
    if a < 1 || d < 1 {
        return Err(bad_seq(alloc::format!("start {a} and difference {d} must be >= 1")));
    }
    let last = a + (inst.k as u64 - 1) * d;
    if last > inst.n as u64 {
        return Err(bad_seq(alloc::format!(
            "progression endpoint {last} exceeds N={}",
            inst.n
        )));
    }
    let expected: Vec<u64> = (0..inst.k as u64).map(|j| a + j * d).collect();

    for sec in &cert.sections {
        for line in &sec.lines {
            if !line.indices.is_empty() || line.cuts.is_some() {
                return Err(fail(
                    K::TermMismatch,
                    alloc::format!("unexpected term data on `{}`", line.value),
                ));
            }
            let v: u64 = line.value.parse().map_err(|_| {
                fail(K::TermMismatch, alloc::format!("bad integer value `{}`", line.value))
            })?;
            if !expected.contains(&v) {
                return Err(fail(
                    K::TermMismatch,
                    alloc::format!("{v} is not on the progression"),
                ));
            }
            match col.color_of_text(&line.value) {
                Some(c) if c == sec.color => {}
                Some(c) => {
                    return Err(fail(
                        K::ColorMismatch,
                        alloc::format!("`{}` has colour {c}, section says {}", line.value, sec.color),
                    ))
                }
                None => {
                    return Err(fail(
                        K::ColorMismatch,
                        alloc::format!("`{}` is uncoloured", line.value),
                    ))
                }
            }
        }
    }

    let sections = section_colors(cert);
    let Some((_, lines)) = sections.get(&0) else {
        return Err(fail(K::Incomplete, "missing section for layer 0".into()));
    };
    let listed: BTreeSet<&str> = lines.iter().map(|l| l.value.as_str()).collect();
    for v in &expected {
        let text = alloc::format!("{v}");
        if !listed.contains(text.as_str()) {
            return Err(fail(
                K::Incomplete,
                alloc::format!("progression point {text} is missing"),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Point;

    fn fu_setup() -> (String, Coloring) {
        // fu m=2 N=2: sequence ({0}, {1}); span {0}, {0,1}, {1}; all colour 0.
        let st = Statement::parse("statement fu m=2 N=2").unwrap();
        let Realization::Span(inst) = st.realize(&Limits::default()).unwrap() else {
            unreachable!()
        };
        let col = Coloring::new(
            2,
            inst.domain.iter().map(|p| (p.clone(), 0)).collect(),
        )
        .unwrap();
        let cert = Certificate {
            statement: st,
            r: 2,
            digest: col.digest().into(),
            sequence: alloc::vec!["FINSETS {0}".into(), "FINSETS {1}".into()],
            sections: alloc::vec![SpanSection {
                layer: 0,
                color: 0,
                lines: alloc::vec![
                    ValueLine {
                        value: "FINSETS {0,1}".into(),
                        cuts: None,
                        indices: alloc::vec![1, 2],
                        maps: alloc::vec!["id".into(), "id".into()],
                    },
                    ValueLine {
                        value: "FINSETS {0}".into(),
                        cuts: None,
                        indices: alloc::vec![1],
                        maps: alloc::vec!["id".into()],
                    },
                    ValueLine {
                        value: "FINSETS {1}".into(),
                        cuts: None,
                        indices: alloc::vec![2],
                        maps: alloc::vec!["id".into()],
                    },
                ],
            }],
        };
        (cert.render(), col)
    }

    #[test]
    fn round_trip_and_verify() {
        let (text, col) = fu_setup();
        let cert = Certificate::parse(&text).unwrap();
        assert_eq!(cert.render(), text);
        let outcome = verify_certificate(&text, &col, &Limits::default());
        assert!(outcome.ok(), "{:?}", outcome.failure());
    }

    #[test]
    fn mutation_categories() {
        use VerifyFailureKind as K;
        let (text, col) = fu_setup();
        let limits = Limits::default();
        let expect = |mutated: String, kind: K| {
            let outcome = verify_certificate(&mutated, &col, &limits);
            let failure = outcome.failure().unwrap_or_else(|| {
                panic!("mutation should fail with {kind:?}:\n{mutated}")
            });
            assert_eq!(failure.kind, kind, "{}", failure.detail);
        };

        // Digest character flipped.
        let pos = text.find("sha256:").unwrap() + "sha256:".len();
        let mut flipped = text.clone();
        let old = flipped.as_bytes()[pos];
        let new = if old == b'0' { '1' } else { '0' };
        flipped.replace_range(pos..pos + 1, &new.to_string());
        expect(flipped, K::DigestMismatch);

        // Section colour altered.
        expect(text.replace("color=0", "color=1"), K::ColorMismatch);

        // Value text altered (still parseable, no longer re-evaluates).
        expect(text.replace("FINSETS {0}\t", "FINSETS {1}\t"), K::TermMismatch);

        // Map replaced by a valid descriptor outside the family.
        expect(
            text.replacen("[1] id", "[1] tetris 0,0", 1),
            K::MapNotInFamily,
        );

        // A span value line deleted.
        expect(text.replace("FINSETS {1}\t[2] id\n", ""), K::Incomplete);

        // Section layer altered to a non-target layer.
        expect(text.replace("layer=0", "layer=1"), K::Malformed);

        // Sequence element replaced by a non-candidate.
        expect(text.replace("SEQUENCE\nFINSETS {0}", "SEQUENCE\nFINSETS {7}"), K::SequenceInvalid);

        // Sequence entry duplicated (still candidates; overlapping supports).
        expect(
            text.replace("SEQUENCE\nFINSETS {0}\nFINSETS {1}", "SEQUENCE\nFINSETS {0}\nFINSETS {0}"),
            K::NotBlockSequence,
        );

        // Statement enlarged: colouring no longer covers the domain.
        expect(text.replace("fu m=2 N=2", "fu m=2 N=3"), K::ColoringNotTotal);

        // Structure broken.
        expect(text.replace("CERTIFICATE v1", "CERTIFICATE v2"), K::Malformed);
        expect(text.replace("colors 2", "colors 3"), K::Malformed);
    }

    #[test]
    fn wrong_layer_detected_between_sections() {
        // gowers n=2 kset=1,2: move a layer-1 line under the layer-2 header.
        let st =
            Statement::parse("statement gowers n=2 kset=1,2 family=full block=1 ordered=false N=2")
                .unwrap();
        let Realization::Span(inst) = st.realize(&Limits::default()).unwrap() else {
            unreachable!()
        };
        let col = Coloring::new(
            2,
            inst.domain.iter().map(|p| (p.clone(), 0)).collect(),
        )
        .unwrap();
        let xs = alloc::vec![inst.sg.parse_element("FIN {0:2}").unwrap()];
        let mut sections = Vec::new();
        for k in [1u32, 2] {
            let span = enumerate_span(&inst.sg, &xs, &inst.family, k, 1, &Limits::default())
                .unwrap();
            sections.push(SpanSection {
                layer: k,
                color: 0,
                lines: span
                    .iter()
                    .map(|t| ValueLine {
                        value: t.value.encode(),
                        cuts: None,
                        indices: t.indices.clone(),
                        maps: t.maps.iter().map(MapDescriptor::encode).collect(),
                    })
                    .collect(),
            });
        }
        let cert = Certificate {
            statement: st,
            r: 2,
            digest: col.digest().into(),
            sequence: alloc::vec!["FIN {0:2}".into()],
            sections,
        };
        let good = cert.render();
        assert!(verify_certificate(&good, &col, &Limits::default()).ok());

        let mut moved = cert.clone();
        let line = moved.sections[0].lines.remove(0);
        moved.sections[1].lines.push(line);
        // Restore the layer-1 section's completeness by re-adding the line
        // under the wrong section only.
        moved.sections[0].lines = cert.sections[0].lines.clone();
        let outcome = verify_certificate(&moved.render(), &col, &Limits::default());
        assert_eq!(
            outcome.failure().unwrap().kind,
            VerifyFailureKind::WrongLayer
        );
    }

    #[test]
    fn vdw_certificate_verifies() {
        let st = Statement::parse("statement vdw k=3 N=9").unwrap();
        let col = Coloring::new(
            2,
            (1..=9u64).map(|i| (Point::Int(i), 0)).collect(),
        )
        .unwrap();
        let cert = Certificate {
            statement: st,
            r: 2,
            digest: col.digest().into(),
            sequence: alloc::vec!["2".into(), "3".into()],
            sections: alloc::vec![SpanSection {
                layer: 0,
                color: 0,
                lines: ["2", "5", "8"]
                    .iter()
                    .map(|v| ValueLine {
                        value: (*v).into(),
                        cuts: None,
                        indices: alloc::vec![],
                        maps: alloc::vec![],
                    })
                    .collect(),
            }],
        };
        let text = cert.render();
        assert!(verify_certificate(&text, &col, &Limits::default()).ok());
        assert_eq!(Certificate::parse(&text).unwrap().render(), text);

        // Progression escaping the interval.
        let bad = text.replace("SEQUENCE\n2\n3", "SEQUENCE\n2\n4");
        let outcome = verify_certificate(&bad, &col, &Limits::default());
        assert_eq!(
            outcome.failure().unwrap().kind,
            VerifyFailureKind::SequenceInvalid
        );
    }
}
