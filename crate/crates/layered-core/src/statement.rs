//! Finite Ramsey statements and their realisations.
//!
//! A statement fixes a semigroup, a candidate pool, a map family, target
//! layers, and a block length, all cut down to a finite fragment by the
//! size parameter `N`. A *witness* for a colouring is a block sequence from
//! the pool whose layer-`k` combination span is monochromatic for every
//! target `k` (tuple statements colour grouped span tuples instead, and the
//! arithmetic-progression statement is realised directly over integers).
//!
//! Statement text is a single line, e.g. `statement vdw k=3 N=9` or
//! `statement gowers n=2 kset=1,2 family=full block=2 ordered=false N=4`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::color::{Point, PointShape};
use crate::element::{Element, Layer};
use crate::error::Error;
use crate::maps::MapFamily;
use crate::semigroup::{Semigroup, SemigroupKind};
use crate::zoo::{enumerate_fragment, enumerate_fragment_upto, FragmentSpec, Limits};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyVariant {
    /// All generalised tetris tables on `[0, n]`.
    Full,
    /// Iterates of the classical tetris operation, plus the identity.
    Iterated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementKind {
    /// FIN with a tetris family; spans target every layer in `k_set`.
    Gowers {
        n: Layer,
        k_set: Vec<Layer>,
        family: FamilyVariant,
        block_len: u32,
        ordered: bool,
    },
    /// Combinatorial lines: the `k=0, m=1` Graham–Rothschild case.
    HalesJewett { alphabet: Vec<char> },
    /// `m`-parameter words substituted down to layer `k`.
    GrahamRothschild { alphabet: Vec<char>, k: Layer, m: u32 },
    /// Monochromatic `k`-term arithmetic progression in `[1, N]`.
    VanDerWaerden { k: u32 },
    /// `m` disjoint sets with all finite unions monochromatic.
    FiniteUnions { m: u32 },
    /// Same realisation as finite unions, kept as a distinct statement.
    GalvinGlazer { m: u32 },
    /// Located words: layer-`n` sequences with letter-substitution spans.
    LocatedBbh {
        alphabet: Vec<char>,
        n: Layer,
        block_len: u32,
        ordered: bool,
    },
    /// Milliken–Taylor-style grouped spans over FIN.
    TupleSpan {
        m: u32,
        n: Layer,
        k: Layer,
        block_len: u32,
    },
}

/// A statement kind together with its fragment parameter `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub kind: StatementKind,
    pub n: u32,
}

/// A statement realised over its fragment: everything a search needs.
pub enum Realization {
    Span(SpanInstance),
    Tuple(TupleInstance),
    Vdw(VdwInstance),
}

pub struct SpanInstance {
    pub sg: Semigroup,
    /// Colourable points, sorted.
    pub domain: Vec<Point>,
    /// Block-sequence entry pool, in canonical order.
    pub candidates: Vec<Element>,
    pub family: MapFamily,
    pub k_set: Vec<Layer>,
    pub block_len: u32,
}

pub struct TupleInstance {
    pub sg: Semigroup,
    pub domain: Vec<Point>,
    pub candidates: Vec<Element>,
    pub family: MapFamily,
    pub m: u32,
    pub k: Layer,
    pub block_len: u32,
}

pub struct VdwInstance {
    pub k: u32,
    pub n: u32,
    pub domain: Vec<Point>,
}

impl Realization {
    pub fn point_shape(&self) -> PointShape<'_> {
        match self {
            Realization::Span(i) => PointShape::Elem(&i.sg),
            Realization::Tuple(i) => PointShape::Tuple(&i.sg),
            Realization::Vdw(_) => PointShape::Int,
        }
    }

    pub fn domain(&self) -> &[Point] {
        match self {
            Realization::Span(i) => &i.domain,
            Realization::Tuple(i) => &i.domain,
            Realization::Vdw(i) => &i.domain,
        }
    }
}

impl Statement {
    pub fn new(kind: StatementKind, n: u32) -> Result<Statement, Error> {
        let st = Statement { kind, n };
        st.validate()?;
        Ok(st)
    }

    pub fn with_n(&self, n: u32) -> Statement {
        Statement {
            kind: self.kind.clone(),
            n,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("statements need N >= 1".into()));
        }
        match &self.kind {
            StatementKind::Gowers {
                n, k_set, block_len, ..
            } => {
                if *n == 0 {
                    return Err(Error::InvalidConfig("gowers needs n >= 1".into()));
                }
                if k_set.is_empty() || k_set.iter().any(|k| *k == 0 || k > n) {
                    return Err(Error::InvalidConfig(
                        "gowers k-set must be a nonempty subset of [1, n]".into(),
                    ));
                }
                if k_set.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidConfig(
                        "gowers k-set must be strictly increasing".into(),
                    ));
                }
                if *block_len == 0 {
                    return Err(Error::InvalidConfig("block length must be >= 1".into()));
                }
            }
            StatementKind::HalesJewett { alphabet } => {
                if alphabet.is_empty() {
                    return Err(Error::InvalidConfig("hj needs a nonempty alphabet".into()));
                }
            }
            StatementKind::GrahamRothschild { alphabet, k, m } => {
                if alphabet.is_empty() {
                    return Err(Error::InvalidConfig("gr needs a nonempty alphabet".into()));
                }
                if *m == 0 || *k > *m {
                    return Err(Error::InvalidConfig("gr needs 0 <= k <= m, m >= 1".into()));
                }
            }
            StatementKind::VanDerWaerden { k } => {
                if *k == 0 {
                    return Err(Error::InvalidConfig("vdw needs k >= 1".into()));
                }
            }
            StatementKind::FiniteUnions { m } | StatementKind::GalvinGlazer { m } => {
                if *m == 0 {
                    return Err(Error::InvalidConfig("needs m >= 1".into()));
                }
            }
            StatementKind::LocatedBbh {
                alphabet,
                n,
                block_len,
                ..
            } => {
                if alphabet.is_empty() {
                    return Err(Error::InvalidConfig("bbh needs a nonempty alphabet".into()));
                }
                if *n == 0 || *block_len == 0 {
                    return Err(Error::InvalidConfig("bbh needs n >= 1, block >= 1".into()));
                }
            }
            StatementKind::TupleSpan { m, n, k, block_len } => {
                if *m == 0 || *n == 0 || *k == 0 || *block_len == 0 {
                    return Err(Error::InvalidConfig(
                        "tuple span needs m, n, k, block >= 1".into(),
                    ));
                }
                if k > n {
                    return Err(Error::InvalidConfig("tuple span needs k <= n".into()));
                }
            }
        }
        Ok(())
    }

    /// One-line canonical text, `statement <kind> <params> N=<n>`.
    pub fn encode(&self) -> String {
        let mut out = String::from("statement ");
        match &self.kind {
            StatementKind::Gowers {
                n,
                k_set,
                family,
                block_len,
                ordered,
            } => {
                out.push_str(&alloc::format!("gowers n={n} kset="));
                for (i, k) in k_set.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&alloc::format!("{k}"));
                }
                let fam = match family {
                    FamilyVariant::Full => "full",
                    FamilyVariant::Iterated => "iterated",
                };
                out.push_str(&alloc::format!(
                    " family={fam} block={block_len} ordered={ordered}"
                ));
            }
            StatementKind::HalesJewett { alphabet } => {
                out.push_str("hj alphabet=");
                out.extend(alphabet.iter());
            }
            StatementKind::GrahamRothschild { alphabet, k, m } => {
                out.push_str("gr alphabet=");
                out.extend(alphabet.iter());
                out.push_str(&alloc::format!(" k={k} m={m}"));
            }
            StatementKind::VanDerWaerden { k } => out.push_str(&alloc::format!("vdw k={k}")),
            StatementKind::FiniteUnions { m } => out.push_str(&alloc::format!("fu m={m}")),
            StatementKind::GalvinGlazer { m } => out.push_str(&alloc::format!("gg m={m}")),
            StatementKind::LocatedBbh {
                alphabet,
                n,
                block_len,
                ordered,
            } => {
                out.push_str("bbh alphabet=");
                out.extend(alphabet.iter());
                out.push_str(&alloc::format!(" n={n} block={block_len} ordered={ordered}"));
            }
            StatementKind::TupleSpan { m, n, k, block_len } => {
                out.push_str(&alloc::format!("tuple m={m} n={n} k={k} block={block_len}"));
            }
        }
        out.push_str(&alloc::format!(" N={}", self.n));
        out
    }

    /// Parse statement text; accepts exactly the [`Statement::encode`] form.
    pub fn parse(text: &str) -> Result<Statement, Error> {
        let bad = |msg: &str| Error::InvalidConfig(alloc::format!("{msg} in `{text}`"));
        let mut parts = text.split(' ');
        if parts.next() != Some("statement") {
            return Err(bad("expected leading `statement`"));
        }
        let kind_name = parts.next().ok_or_else(|| bad("missing statement kind"))?;
        let mut fields: Vec<(&str, &str)> = Vec::new();
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad("expected key=value fields"))?;
            fields.push((key, value));
        }
        let field = |key: &str| -> Result<&str, Error> {
            fields
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| bad(&alloc::format!("missing field `{key}`")))
        };
        let num = |key: &str| -> Result<u32, Error> {
            field(key)?
                .parse::<u32>()
                .map_err(|_| bad(&alloc::format!("bad number for `{key}`")))
        };
        let chars = |key: &str| -> Result<Vec<char>, Error> {
            Ok(field(key)?.chars().collect())
        };
        let flag = |key: &str| -> Result<bool, Error> {
            match field(key)? {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(bad(&alloc::format!("bad boolean for `{key}`"))),
            }
        };

        let expected_fields: &[&str] = match kind_name {
            "gowers" => &["n", "kset", "family", "block", "ordered", "N"],
            "hj" => &["alphabet", "N"],
            "gr" => &["alphabet", "k", "m", "N"],
            "vdw" => &["k", "N"],
            "fu" | "gg" => &["m", "N"],
            "bbh" => &["alphabet", "n", "block", "ordered", "N"],
            "tuple" => &["m", "n", "k", "block", "N"],
            _ => return Err(bad("unknown statement kind")),
        };
        if fields.len() != expected_fields.len()
            || fields
                .iter()
                .zip(expected_fields)
                .any(|((k, _), want)| k != want)
        {
            return Err(bad("unexpected fields or field order"));
        }

        let kind = match kind_name {
            "gowers" => {
                let k_set = field("kset")?
                    .split(',')
                    .map(|p| p.parse::<Layer>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad("bad k-set"))?;
                let family = match field("family")? {
                    "full" => FamilyVariant::Full,
                    "iterated" => FamilyVariant::Iterated,
                    _ => return Err(bad("family must be full|iterated")),
                };
                StatementKind::Gowers {
                    n: num("n")?,
                    k_set,
                    family,
                    block_len: num("block")?,
                    ordered: flag("ordered")?,
                }
            }
            "hj" => StatementKind::HalesJewett {
                alphabet: chars("alphabet")?,
            },
            "gr" => StatementKind::GrahamRothschild {
                alphabet: chars("alphabet")?,
                k: num("k")?,
                m: num("m")?,
            },
            "vdw" => StatementKind::VanDerWaerden { k: num("k")? },
            "fu" => StatementKind::FiniteUnions { m: num("m")? },
            "gg" => StatementKind::GalvinGlazer { m: num("m")? },
            "bbh" => StatementKind::LocatedBbh {
                alphabet: chars("alphabet")?,
                n: num("n")?,
                block_len: num("block")?,
                ordered: flag("ordered")?,
            },
            "tuple" => StatementKind::TupleSpan {
                m: num("m")?,
                n: num("n")?,
                k: num("k")?,
                block_len: num("block")?,
            },
            _ => unreachable!(),
        };
        Statement::new(kind, num("N")?)
    }

    /// Realise the statement over its fragment.
    pub fn realize(&self, limits: &Limits) -> Result<Realization, Error> {
        self.validate()?;
        let n_param = self.n;
        match &self.kind {
            StatementKind::Gowers {
                n,
                k_set,
                family,
                block_len,
                ordered,
            } => {
                let sg = Semigroup::new(SemigroupKind::Fin, None, *ordered)?;
                let frag = FragmentSpec::new(*n, n_param - 1);
                let elems = enumerate_fragment_upto(&sg, &frag, limits)?;
                let family = match family {
                    FamilyVariant::Full => MapFamily::all_tetris(*n),
                    FamilyVariant::Iterated => MapFamily::iterated_tetris(*n),
                };
                Ok(Realization::Span(SpanInstance {
                    domain: elems
                        .iter()
                        .filter(|e| k_set.contains(&e.layer()))
                        .cloned()
                        .map(Point::Elem)
                        .collect(),
                    candidates: elems.into_iter().filter(|e| e.layer() == *n).collect(),
                    sg,
                    family,
                    k_set: k_set.clone(),
                    block_len: *block_len,
                }))
            }
            StatementKind::HalesJewett { alphabet } => {
                realize_gr(alphabet, 0, 1, n_param, limits)
            }
            StatementKind::GrahamRothschild { alphabet, k, m } => {
                realize_gr(alphabet, *k, *m, n_param, limits)
            }
            StatementKind::VanDerWaerden { k } => Ok(Realization::Vdw(VdwInstance {
                k: *k,
                n: n_param,
                domain: (1..=n_param as u64).map(Point::Int).collect(),
            })),
            StatementKind::FiniteUnions { m } | StatementKind::GalvinGlazer { m } => {
                let sg = Semigroup::new(SemigroupKind::FinSets, None, false)?;
                let frag = FragmentSpec::new(0, n_param - 1);
                let elems = enumerate_fragment(&sg, &frag, limits)?;
                Ok(Realization::Span(SpanInstance {
                    domain: elems.iter().cloned().map(Point::Elem).collect(),
                    candidates: elems,
                    sg,
                    family: MapFamily::identity_only(),
                    k_set: alloc::vec![0],
                    block_len: *m,
                }))
            }
            StatementKind::LocatedBbh {
                alphabet,
                n,
                block_len,
                ordered,
            } => {
                let sg = Semigroup::new(SemigroupKind::L, Some(alphabet), *ordered)?;
                let frag = FragmentSpec::new(*n, n_param - 1);
                let elems = enumerate_fragment_upto(&sg, &frag, limits)?;
                Ok(Realization::Span(SpanInstance {
                    domain: elems
                        .iter()
                        .filter(|e| e.layer() == 0)
                        .cloned()
                        .map(Point::Elem)
                        .collect(),
                    candidates: elems.into_iter().filter(|e| e.layer() == *n).collect(),
                    family: MapFamily::letter_word_substitutions(alphabet, *n),
                    sg,
                    k_set: alloc::vec![0],
                    block_len: *block_len,
                }))
            }
            StatementKind::TupleSpan { m, n, k, block_len } => {
                let sg = Semigroup::new(SemigroupKind::Fin, None, false)?;
                let frag = FragmentSpec::new(*n, n_param - 1);
                let elems = enumerate_fragment_upto(&sg, &frag, limits)?;
                let layer_k: Vec<&Element> =
                    elems.iter().filter(|e| e.layer() == *k).collect();
                let domain = disjoint_tuples(&layer_k, *m, limits)?;
                Ok(Realization::Tuple(TupleInstance {
                    domain,
                    candidates: elems.iter().filter(|e| e.layer() == *n).cloned().collect(),
                    sg,
                    family: MapFamily::all_tetris(*n),
                    m: *m,
                    k: *k,
                    block_len: *block_len,
                }))
            }
        }
    }
}

fn realize_gr(
    alphabet: &[char],
    k: Layer,
    m: u32,
    n_param: u32,
    limits: &Limits,
) -> Result<Realization, Error> {
    let sg = Semigroup::new(SemigroupKind::W, Some(alphabet), false)?;
    let domain = enumerate_fragment(&sg, &FragmentSpec::new(k, n_param), limits)?;
    let candidates = enumerate_fragment(&sg, &FragmentSpec::new(m, n_param), limits)?;
    let family = MapFamily::parameter_word_substitutions(&sg, k, m)?;
    Ok(Realization::Span(SpanInstance {
        domain: domain.into_iter().map(Point::Elem).collect(),
        candidates,
        sg,
        family,
        k_set: alloc::vec![k],
        block_len: 1,
    }))
}

/// All ordered `m`-tuples of pairwise support-disjoint elements.
fn disjoint_tuples(
    elems: &[&Element],
    m: u32,
    limits: &Limits,
) -> Result<Vec<Point>, Error> {
    let est = (elems.len() as u128).saturating_pow(m);
    if est > limits.max_elements as u128 {
        return Err(Error::FragmentTooLarge {
            needed: est,
            cap: limits.max_elements as u128,
        });
    }
    let masks: Vec<u64> = elems
        .iter()
        .map(|e| e.support_mask().unwrap_or(u64::MAX))
        .collect();
    let mut out = Vec::new();
    let mut tuple: Vec<usize> = Vec::new();
    fn rec(
        elems: &[&Element],
        masks: &[u64],
        m: usize,
        used: u64,
        tuple: &mut Vec<usize>,
        out: &mut Vec<Point>,
    ) {
        if tuple.len() == m {
            out.push(Point::Tuple(
                tuple.iter().map(|&i| elems[i].clone()).collect(),
            ));
            return;
        }
        for i in 0..elems.len() {
            if used & masks[i] != 0 {
                continue;
            }
            tuple.push(i);
            rec(elems, masks, m, used | masks[i], tuple, out);
            tuple.pop();
        }
    }
    rec(elems, &masks, m as usize, 0, &mut tuple, &mut out);
    out.sort_by_cached_key(Point::sort_key);
    Ok(out)
}
