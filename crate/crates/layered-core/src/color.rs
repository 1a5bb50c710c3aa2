//! Colourings of finite statement domains.
//!
//! A domain point is an element, a bare integer (arithmetic-progression
//! statements), or a tuple of elements (tuple-span statements). Colouring
//! files are plain text — a `colors r` header followed by
//! `point<TAB>color` lines — and are tracked by a SHA-256 digest of the
//! exact bytes so certificates can name the colouring they were searched
//! against. Programmatic colourings are digested over their canonical text.

use alloc::string::String;
use alloc::vec::Vec;

use sha2::{Digest, Sha256};

use crate::element::Element;
use crate::error::Error;
use crate::semigroup::Semigroup;

/// One colourable point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Point {
    Int(u64),
    Elem(Element),
    Tuple(Vec<Element>),
}

/// How to parse and interpret points for a given statement.
#[derive(Debug, Clone, Copy)]
pub enum PointShape<'a> {
    Int,
    Elem(&'a Semigroup),
    Tuple(&'a Semigroup),
}

impl Point {
    pub fn encode(&self) -> String {
        match self {
            Point::Int(n) => alloc::format!("{n}"),
            Point::Elem(e) => e.encode(),
            Point::Tuple(es) => {
                let mut out = String::new();
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" ; ");
                    }
                    out.push_str(&e.encode());
                }
                out
            }
        }
    }

    pub fn parse(shape: PointShape, text: &str) -> Result<Point, Error> {
        match shape {
            PointShape::Int => text
                .parse::<u64>()
                .map(Point::Int)
                .map_err(|_| Error::InvalidElement(alloc::format!("bad integer point `{text}`"))),
            PointShape::Elem(sg) => sg.parse_element(text).map(Point::Elem),
            PointShape::Tuple(sg) => {
                let parts: Vec<&str> = text.split(" ; ").collect();
                if parts.is_empty() || parts.iter().any(|p| p.is_empty()) {
                    return Err(Error::InvalidElement(alloc::format!(
                        "bad tuple point `{text}`"
                    )));
                }
                parts
                    .iter()
                    .map(|p| sg.parse_element(p))
                    .collect::<Result<Vec<_>, _>>()
                    .map(Point::Tuple)
            }
        }
    }

    /// Integer points sort numerically; everything else by canonical text.
    pub fn sort_key(&self) -> (u64, String) {
        match self {
            Point::Int(n) => (*n, String::new()),
            _ => (u64::MAX, self.encode()),
        }
    }
}

/// A total colouring of a finite point set.
#[derive(Debug, Clone)]
pub struct Coloring {
    r: u32,
    /// Sorted by point sort key.
    entries: Vec<(Point, u32)>,
    index: alloc::collections::BTreeMap<String, u32>,
    canonical: String,
    digest: String,
}

impl Coloring {
    /// Build from point/colour pairs; the digest covers the canonical text.
    pub fn new(r: u32, pairs: Vec<(Point, u32)>) -> Result<Coloring, Error> {
        Coloring::build(r, pairs, None)
    }

    /// Parse a colouring file; the digest covers the exact input bytes.
    pub fn parse(text: &str, shape: PointShape) -> Result<Coloring, Error> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: "empty colouring file".into(),
            })?;
        let r = header
            .strip_prefix("colors ")
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: alloc::format!("expected `colors r` header, found `{header}`"),
            })?;
        let mut pairs = Vec::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let (point_text, color_text) = line.split_once('\t').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: "expected `point<TAB>color`".into(),
            })?;
            let point =
                Point::parse(shape, point_text).map_err(|e| e.at_line(i + 1))?;
            let color: u32 = color_text.parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: alloc::format!("bad colour `{color_text}`"),
            })?;
            pairs.push((point, color));
        }
        Coloring::build(r, pairs, Some(text))
    }

    fn build(r: u32, mut pairs: Vec<(Point, u32)>, source: Option<&str>) -> Result<Coloring, Error> {
        if r == 0 {
            return Err(Error::InvalidConfig("colourings need r >= 1".into()));
        }
        pairs.sort_by_cached_key(|(p, _)| p.sort_key());
        let mut index = alloc::collections::BTreeMap::new();
        for (p, c) in &pairs {
            if *c >= r {
                return Err(Error::InvalidConfig(alloc::format!(
                    "colour {c} out of range for r={r} at point `{}`",
                    p.encode()
                )));
            }
            if index.insert(p.encode(), *c).is_some() {
                return Err(Error::InvalidConfig(alloc::format!(
                    "duplicate point `{}`",
                    p.encode()
                )));
            }
        }
        let mut canonical = alloc::format!("colors {r}\n");
        for (p, c) in &pairs {
            canonical.push_str(&p.encode());
            canonical.push('\t');
            canonical.push_str(&alloc::format!("{c}\n"));
        }
        let digest = sha256_hex(source.unwrap_or(&canonical).as_bytes());
        Ok(Coloring {
            r,
            entries: pairs,
            index,
            canonical,
            digest,
        })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Point, u32)] {
        &self.entries
    }

    pub fn color_of(&self, p: &Point) -> Option<u32> {
        self.color_of_text(&p.encode())
    }

    pub fn color_of_text(&self, point_text: &str) -> Option<u32> {
        self.index.get(point_text).copied()
    }

    /// First domain point the colouring misses, if any.
    pub fn first_uncovered<'a>(&self, domain: impl Iterator<Item = &'a Point>) -> Option<&'a Point> {
        domain.filter(|p| self.color_of(p).is_none()).next()
    }

    /// Header plus sorted `point<TAB>color` lines.
    pub fn canonical_text(&self) -> &str {
        &self.canonical
    }

    /// `sha256:<hex>` over the source bytes (file) or canonical text.
    pub fn digest(&self) -> &str {
        &self.digest
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let mut out = String::with_capacity(7 + 64);
    out.push_str("sha256:");
    for b in hash {
        out.push_str(&alloc::format!("{b:02x}"));
    }
    out
}
