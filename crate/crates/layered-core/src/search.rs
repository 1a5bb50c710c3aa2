//! Witness search, minimal-bound computation, the arithmetic-progression
//! reduction through combinatorial lines, and the completeness surrogate.
//!
//! [`find_witness`] runs the exhaustive backtracking search behind every
//! statement: candidate block sequences are drawn from the fragment in
//! canonical element order, the first monochromatic one wins, and a
//! [`Certificate`] is emitted that [`crate::cert::verify_certificate`] can
//! re-check without trusting this module.
//!
//! [`compute_bound`] finds the minimal fragment size `N` at which *every*
//! colouring admits a witness. Colourings are enumerated up to colour
//! permutation as restricted growth strings (the lexicographically first
//! relabelling of each colour class), so reported class counts are exact
//! and reproducible; the unpruned colouring count is reported alongside.
//! Budgets are node counts (one node = one colouring class tested), and an
//! exhausted budget returns a textual checkpoint that resumes the run
//! bit-for-bit.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::cert::{Certificate, SpanSection, ValueLine};
use crate::color::{Coloring, Point};
use crate::element::{Element, Layer, Payload, Token};
use crate::error::Error;
use crate::maps::MapDescriptor;
use crate::span::{enumerate_span, enumerate_tuple_span, is_block_sequence, SpanTerm, TupleSpanTerm};
use crate::statement::{Realization, SpanInstance, Statement, StatementKind, TupleInstance, VdwInstance};
use crate::zoo::{enumerate_fragment, pow_u128, FragmentSpec, Limits};

/// Proof that no candidate block sequence in the fragment works.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustionReport {
    /// Candidate tuples actually examined (all of them, on exhaustion).
    pub candidates_checked: u64,
    /// Ordered injective tuples over the candidate pool.
    pub search_space: u64,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Witness(Certificate),
    Exhausted(ExhaustionReport),
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&Certificate> {
        match self {
            SearchOutcome::Witness(c) => Some(c),
            SearchOutcome::Exhausted(_) => None,
        }
    }
}

/// Search for a block sequence whose spans are monochromatic under `col`.
///
/// Candidates are ordered injective tuples over the statement's candidate
/// pool (which is sorted canonically), visited in lexicographic order; the
/// first witness is returned. Candidates whose span at some target layer is
/// empty are rejected.
pub fn find_witness(
    st: &Statement,
    col: &Coloring,
    limits: &Limits,
) -> Result<SearchOutcome, Error> {
    let realization = st.realize(limits)?;
    if let Some(p) = col.first_uncovered(realization.domain().iter()) {
        return Err(Error::ColoringNotTotal(p.encode()));
    }
    match &realization {
        Realization::Span(inst) => span_witness(st, inst, col, limits),
        Realization::Tuple(inst) => tuple_witness(st, inst, col, limits),
        Realization::Vdw(inst) => vdw_witness(st, inst, col),
    }
}

fn perm_count(n: u64, l: u32) -> u64 {
    let mut out = 1u64;
    for i in 0..l as u64 {
        out = out.saturating_mul(n.saturating_sub(i));
    }
    out
}

fn visit_injective_tuples(
    n: usize,
    l: usize,
    f: &mut dyn FnMut(&[usize]) -> Result<bool, Error>,
) -> Result<(u64, bool), Error> {
    fn rec(
        n: usize,
        l: usize,
        used: &mut [bool],
        idx: &mut Vec<usize>,
        visited: &mut u64,
        f: &mut dyn FnMut(&[usize]) -> Result<bool, Error>,
    ) -> Result<bool, Error> {
        if idx.len() == l {
            *visited += 1;
            return f(idx);
        }
        for i in 0..n {
            if used[i] {
                continue;
            }
            used[i] = true;
            idx.push(i);
            let stop = rec(n, l, used, idx, visited, f)?;
            idx.pop();
            used[i] = false;
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }
    let mut used = alloc::vec![false; n];
    let mut idx = Vec::with_capacity(l);
    let mut visited = 0u64;
    let stopped = rec(n, l, &mut used, &mut idx, &mut visited, f)?;
    Ok((visited, stopped))
}

/// Visit every candidate block sequence together with its per-layer spans.
/// Tuples that are not block sequences, or whose span at some target layer
/// is empty, are counted but not passed to `f`.
fn visit_span_candidates(
    inst: &SpanInstance,
    limits: &Limits,
    f: &mut dyn FnMut(&[Element], &[Vec<SpanTerm>]) -> Result<bool, Error>,
) -> Result<(u64, u64), Error> {
    let space = perm_count(inst.candidates.len() as u64, inst.block_len);
    if space as u128 > limits.max_terms as u128 {
        return Err(Error::FragmentTooLarge {
            needed: space as u128,
            cap: limits.max_terms as u128,
        });
    }
    let (visited, _) = visit_injective_tuples(
        inst.candidates.len(),
        inst.block_len as usize,
        &mut |idx| {
            let xs: Vec<Element> = idx.iter().map(|&i| inst.candidates[i].clone()).collect();
            let check = is_block_sequence(&inst.sg, &xs, &inst.family, inst.block_len, limits)?;
            if !check.is_block {
                return Ok(false);
            }
            let mut spans = Vec::with_capacity(inst.k_set.len());
            for &k in &inst.k_set {
                let span = enumerate_span(&inst.sg, &xs, &inst.family, k, inst.block_len, limits)?;
                if span.is_empty() {
                    return Ok(false);
                }
                spans.push(span);
            }
            f(&xs, &spans)
        },
    )?;
    Ok((visited, space))
}

fn visit_tuple_candidates(
    inst: &TupleInstance,
    limits: &Limits,
    f: &mut dyn FnMut(&[Element], &[TupleSpanTerm]) -> Result<bool, Error>,
) -> Result<(u64, u64), Error> {
    let space = perm_count(inst.candidates.len() as u64, inst.block_len);
    if space as u128 > limits.max_terms as u128 {
        return Err(Error::FragmentTooLarge {
            needed: space as u128,
            cap: limits.max_terms as u128,
        });
    }
    let (visited, _) = visit_injective_tuples(
        inst.candidates.len(),
        inst.block_len as usize,
        &mut |idx| {
            let xs: Vec<Element> = idx.iter().map(|&i| inst.candidates[i].clone()).collect();
            let check = is_block_sequence(&inst.sg, &xs, &inst.family, inst.block_len, limits)?;
            if !check.is_block {
                return Ok(false);
            }
            let tuples = enumerate_tuple_span(
                &inst.sg,
                &xs,
                &inst.family,
                inst.m,
                inst.k,
                inst.block_len,
                limits,
            )?;
            if tuples.is_empty() {
                return Ok(false);
            }
            f(&xs, &tuples)
        },
    )?;
    Ok((visited, space))
}

fn term_line(t: &SpanTerm) -> ValueLine {
    ValueLine {
        value: t.value.encode(),
        cuts: None,
        indices: t.indices.clone(),
        maps: t.maps.iter().map(MapDescriptor::encode).collect(),
    }
}

fn span_witness(
    st: &Statement,
    inst: &SpanInstance,
    col: &Coloring,
    limits: &Limits,
) -> Result<SearchOutcome, Error> {
    let mut found: Option<Certificate> = None;
    let (visited, space) = visit_span_candidates(inst, limits, &mut |xs, spans| {
        let mut sections = Vec::with_capacity(spans.len());
        for (&k, span) in inst.k_set.iter().zip(spans) {
            let mut color: Option<u32> = None;
            for term in span {
                let text = term.value.encode();
                let Some(c) = col.color_of_text(&text) else {
                    return Err(Error::ColoringNotTotal(text));
                };
                match color {
                    None => color = Some(c),
                    Some(c0) if c0 == c => {}
                    Some(_) => return Ok(false),
                }
            }
            sections.push(SpanSection {
                layer: k,
                color: color.expect("span is nonempty"),
                lines: span.iter().map(term_line).collect(),
            });
        }
        found = Some(Certificate {
            statement: st.clone(),
            r: col.r(),
            digest: col.digest().into(),
            sequence: xs.iter().map(Element::encode).collect(),
            sections,
        });
        Ok(true)
    })?;
    Ok(match found {
        Some(c) => SearchOutcome::Witness(c),
        None => SearchOutcome::Exhausted(ExhaustionReport {
            candidates_checked: visited,
            search_space: space,
        }),
    })
}

fn tuple_witness(
    st: &Statement,
    inst: &TupleInstance,
    col: &Coloring,
    limits: &Limits,
) -> Result<SearchOutcome, Error> {
    let mut found: Option<Certificate> = None;
    let (visited, space) = visit_tuple_candidates(inst, limits, &mut |xs, tuples| {
        let mut color: Option<u32> = None;
        let mut lines = Vec::with_capacity(tuples.len());
        for t in tuples {
            let text = Point::Tuple(t.values.clone()).encode();
            let Some(c) = col.color_of_text(&text) else {
                return Err(Error::ColoringNotTotal(text));
            };
            match color {
                None => color = Some(c),
                Some(c0) if c0 == c => {}
                Some(_) => return Ok(false),
            }
            lines.push(ValueLine {
                value: text,
                cuts: Some(t.cuts.clone()),
                indices: t.indices.clone(),
                maps: t.maps.iter().map(MapDescriptor::encode).collect(),
            });
        }
        found = Some(Certificate {
            statement: st.clone(),
            r: col.r(),
            digest: col.digest().into(),
            sequence: xs.iter().map(Element::encode).collect(),
            sections: alloc::vec![SpanSection {
                layer: inst.k,
                color: color.expect("tuple span is nonempty"),
                lines,
            }],
        });
        Ok(true)
    })?;
    Ok(match found {
        Some(c) => SearchOutcome::Witness(c),
        None => SearchOutcome::Exhausted(ExhaustionReport {
            candidates_checked: visited,
            search_space: space,
        }),
    })
}

fn vdw_progressions(inst: &VdwInstance) -> Vec<(u64, u64)> {
    let n = inst.n as u64;
    let k = inst.k as u64;
    let mut out = Vec::new();
    for a in 1..=n {
        if k == 1 {
            out.push((a, 1));
            continue;
        }
        let mut d = 1;
        while a + (k - 1) * d <= n {
            out.push((a, d));
            d += 1;
        }
    }
    out
}

fn vdw_witness(
    st: &Statement,
    inst: &VdwInstance,
    col: &Coloring,
) -> Result<SearchOutcome, Error> {
    let aps = vdw_progressions(inst);
    let mut checked = 0u64;
    for &(a, d) in &aps {
        checked += 1;
        let points: Vec<u64> = (0..inst.k as u64).map(|j| a + j * d).collect();
        let mut color: Option<u32> = None;
        let mut mono = true;
        for p in &points {
            let text = p.to_string();
            let Some(c) = col.color_of_text(&text) else {
                return Err(Error::ColoringNotTotal(text));
            };
            match color {
                None => color = Some(c),
                Some(c0) if c0 == c => {}
                Some(_) => {
                    mono = false;
                    break;
                }
            }
        }
        if mono {
            let cert = Certificate {
                statement: st.clone(),
                r: col.r(),
                digest: col.digest().into(),
                sequence: alloc::vec![a.to_string(), d.to_string()],
                sections: alloc::vec![SpanSection {
                    layer: 0,
                    color: color.expect("progression is nonempty"),
                    lines: points
                        .iter()
                        .map(|p| ValueLine {
                            value: p.to_string(),
                            cuts: None,
                            indices: Vec::new(),
                            maps: Vec::new(),
                        })
                        .collect(),
                }],
            };
            return Ok(SearchOutcome::Witness(cert));
        }
    }
    Ok(SearchOutcome::Exhausted(ExhaustionReport {
        candidates_checked: checked,
        search_space: aps.len() as u64,
    }))
}

// ---- minimal bounds over all colourings ----

/// One fragment level examined by [`compute_bound`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSummary {
    pub n: u32,
    pub domain_size: u32,
    /// Colouring classes actually tested (= rank of the failing class + 1,
    /// or the full class count when the level passed).
    pub classes_checked: u128,
    /// Unpruned colouring count `r^domain_size`.
    pub total_colorings: u128,
    pub passed: bool,
    /// The first failing restricted growth string, for failed levels.
    pub fail_rgs: Option<Vec<u8>>,
}

#[derive(Debug, Clone)]
pub struct BoundResult {
    /// The statement at the minimal fragment size.
    pub statement: Statement,
    pub r: u32,
    pub n: u32,
    pub classes_checked_at_n: u128,
    pub total_colorings_at_n: u128,
    /// A colouring of the `n-1` fragment with no witness (absent when the
    /// very first level already passes).
    pub bad_coloring: Option<Coloring>,
    pub levels: Vec<LevelSummary>,
    pub nodes_used: u64,
}

#[derive(Debug, Clone)]
pub enum BoundOutcome {
    Found(BoundResult),
    Inconclusive {
        n_max: u32,
        levels: Vec<LevelSummary>,
        nodes_used: u64,
    },
}

#[derive(Debug, Clone, Default)]
pub struct BoundOptions {
    /// Node budget for this invocation; one node is one colouring class.
    pub budget: Option<u64>,
    /// Checkpoint text from a previous budget-exceeded run.
    pub resume: Option<String>,
    /// Additionally prune colourings equivalent under alphabet permutation
    /// (Hales-Jewett statements only). Off by default so the class count
    /// stays the plain colour-permutation count.
    pub hj_alphabet_symmetry: bool,
}

/// A fragment level compiled to colour-index form: each pattern is one
/// potential witness, listed as groups of domain indices that must each be
/// monochromatic.
#[derive(Debug, Clone)]
pub struct CompiledLevel {
    pub domain: Vec<Point>,
    pub r: u32,
    patterns: Vec<Vec<Vec<u32>>>,
    symmetries: Vec<Vec<u32>>,
}

impl CompiledLevel {
    pub fn domain_len(&self) -> usize {
        self.domain.len()
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    /// Does this colouring (colour per domain index) admit a witness?
    /// `hint` caches the index of the last successful pattern.
    pub fn has_witness(&self, colors: &[u8], hint: &mut usize) -> bool {
        let n = self.patterns.len();
        for off in 0..n {
            let idx = (*hint + off) % n;
            let mono = self.patterns[idx].iter().all(|group| {
                let c0 = colors[group[0] as usize];
                group.iter().all(|&i| colors[i as usize] == c0)
            });
            if mono {
                *hint = idx;
                return true;
            }
        }
        false
    }

    /// True when some symmetry maps this class to a lexicographically
    /// smaller canonical representative, so it was already counted.
    pub fn skip_by_symmetry(&self, colors: &[u8]) -> bool {
        'sigma: for sigma in &self.symmetries {
            let mut relabel = [u8::MAX; 256];
            let mut next = 0u8;
            for (i, &c) in colors.iter().enumerate() {
                let raw = colors[sigma[i] as usize] as usize;
                if relabel[raw] == u8::MAX {
                    relabel[raw] = next;
                    next += 1;
                }
                match relabel[raw].cmp(&c) {
                    core::cmp::Ordering::Less => return true,
                    core::cmp::Ordering::Greater => continue 'sigma,
                    core::cmp::Ordering::Equal => {}
                }
            }
        }
        false
    }
}

/// Compile one level of a statement for colouring-class scanning.
pub fn compile_level(
    st: &Statement,
    r: u32,
    hj_alphabet_symmetry: bool,
    limits: &Limits,
) -> Result<CompiledLevel, Error> {
    if r == 0 {
        return Err(Error::InvalidConfig("need at least one colour".into()));
    }
    if r > 255 {
        return Err(Error::InvalidConfig("at most 255 colours are supported".into()));
    }
    let realization = st.realize(limits)?;
    let domain: Vec<Point> = realization.domain().to_vec();
    let index: BTreeMap<String, u32> = domain
        .iter()
        .enumerate()
        .map(|(i, p)| (p.encode(), i as u32))
        .collect();
    let look = |text: &str| -> Result<u32, Error> {
        index
            .get(text)
            .copied()
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("span value `{text}` escapes the domain")))
    };
    let mut patterns: Vec<Vec<Vec<u32>>> = Vec::new();
    match &realization {
        Realization::Span(inst) => {
            visit_span_candidates(inst, limits, &mut |_xs, spans| {
                let mut groups = Vec::with_capacity(spans.len());
                for span in spans {
                    let mut g: Vec<u32> = Vec::with_capacity(span.len());
                    for term in span {
                        g.push(look(&term.value.encode())?);
                    }
                    g.sort_unstable();
                    g.dedup();
                    groups.push(g);
                }
                patterns.push(groups);
                Ok(false)
            })?;
        }
        Realization::Tuple(inst) => {
            visit_tuple_candidates(inst, limits, &mut |_xs, tuples| {
                let mut g: Vec<u32> = Vec::with_capacity(tuples.len());
                for t in tuples {
                    g.push(look(&Point::Tuple(t.values.clone()).encode())?);
                }
                g.sort_unstable();
                g.dedup();
                patterns.push(alloc::vec![g]);
                Ok(false)
            })?;
        }
        Realization::Vdw(inst) => {
            for (a, d) in vdw_progressions(inst) {
                let mut g = Vec::with_capacity(inst.k as usize);
                for j in 0..inst.k as u64 {
                    g.push(look(&(a + j * d).to_string())?);
                }
                patterns.push(alloc::vec![g]);
            }
        }
    }
    let mut symmetries = Vec::new();
    if hj_alphabet_symmetry {
        if let (StatementKind::HalesJewett { .. }, Realization::Span(inst)) =
            (&st.kind, &realization)
        {
            symmetries = alphabet_symmetries(inst, &index)?;
        }
    }
    Ok(CompiledLevel {
        domain,
        r,
        patterns,
        symmetries,
    })
}

fn alphabet_symmetries(
    inst: &SpanInstance,
    index: &BTreeMap<String, u32>,
) -> Result<Vec<Vec<u32>>, Error> {
    let alphabet: Vec<char> = inst.sg.alphabet().to_vec();
    let mut perms = Vec::new();
    let mut current: Vec<char> = Vec::new();
    fn rec(rest: &[char], current: &mut Vec<char>, out: &mut Vec<Vec<char>>) {
        if rest.is_empty() {
            out.push(current.clone());
            return;
        }
        for (i, &c) in rest.iter().enumerate() {
            let mut next: Vec<char> = rest.to_vec();
            next.remove(i);
            current.push(c);
            rec(&next, current, out);
            current.pop();
        }
    }
    rec(&alphabet, &mut current, &mut perms);
    let mut out = Vec::new();
    for perm in perms {
        if perm == alphabet {
            continue;
        }
        let map: BTreeMap<char, char> = alphabet.iter().copied().zip(perm).collect();
        let mut sigma = Vec::with_capacity(index.len());
        for point in index.keys() {
            // Domain points of a word statement are all-letter words.
            let e = inst.sg.parse_element(point)?;
            let Payload::Word(tokens) = e.payload() else {
                return Err(Error::InvalidConfig("alphabet symmetry needs word points".into()));
            };
            let mapped: Vec<Token> = tokens
                .iter()
                .map(|t| match t {
                    Token::Letter(c) => Token::Letter(map[c]),
                    Token::Var(k) => Token::Var(*k),
                })
                .collect();
            let text = inst.sg.element_unchecked(Payload::Word(mapped)).encode();
            let Some(&i) = index.get(&text) else {
                return Err(Error::InvalidConfig("alphabet symmetry escapes the domain".into()));
            };
            sigma.push(i);
        }
        out.push(sigma);
    }
    Ok(out)
}

/// In-place odometer over restricted growth strings: colourings up to
/// colour permutation, lexicographically, starting from all zeros.
#[derive(Debug, Clone)]
pub struct RgsIter {
    digits: Vec<u8>,
    prefix_max: Vec<u8>,
    r: u32,
    live: bool,
}

impl RgsIter {
    pub fn start(d: usize, r: u32) -> RgsIter {
        RgsIter {
            digits: alloc::vec![0; d],
            prefix_max: alloc::vec![0; d],
            r,
            live: true,
        }
    }

    /// Resume from a previously reported string; validates RGS shape.
    pub fn resume(digits: Vec<u8>, r: u32) -> Result<RgsIter, Error> {
        let mut prefix_max = alloc::vec![0u8; digits.len()];
        let mut maxm = 0u8;
        for (i, &c) in digits.iter().enumerate() {
            let cap = if i == 0 { 0 } else { (maxm + 1).min(r.saturating_sub(1) as u8) };
            if c > cap {
                return Err(Error::InvalidConfig(alloc::format!(
                    "not a restricted growth string at position {i}"
                )));
            }
            maxm = maxm.max(c);
            prefix_max[i] = maxm;
        }
        Ok(RgsIter {
            digits,
            prefix_max,
            r,
            live: true,
        })
    }

    pub fn live(&self) -> bool {
        self.live
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Step to the lexicographic successor; false once exhausted.
    pub fn advance(&mut self) -> bool {
        let d = self.digits.len();
        let cap_all = self.r.saturating_sub(1) as u8;
        let mut i = d;
        while i > 1 {
            i -= 1;
            let cap = (self.prefix_max[i - 1] + 1).min(cap_all);
            if self.digits[i] < cap {
                self.digits[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.digits[i]);
                for j in i + 1..d {
                    self.digits[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return true;
            }
        }
        self.live = false;
        false
    }
}

/// Number of restricted growth strings of length `d` over at most `r` labels.
pub fn rgs_count(d: usize, r: u32) -> u128 {
    if d == 0 {
        return 1;
    }
    let r_us = r as usize;
    let mut t = alloc::vec![1u128; r_us];
    for _ in 1..d {
        let mut next = alloc::vec![0u128; r_us];
        for m in 0..r_us {
            let mut v = (m as u128 + 1).saturating_mul(t[m]);
            if m + 1 < r_us {
                v = v.saturating_add(t[m + 1]);
            }
            next[m] = v;
        }
        t = next;
    }
    t[0]
}

/// Zero-based position of `rgs` in the lexicographic enumeration.
pub fn rgs_rank(rgs: &[u8], r: u32) -> u128 {
    let d = rgs.len();
    if d == 0 {
        return 0;
    }
    let r_us = r as usize;
    let mut t = alloc::vec![alloc::vec![1u128; r_us]; d + 1];
    for i in (1..d).rev() {
        for m in 0..r_us {
            let mut v = (m as u128 + 1).saturating_mul(t[i + 1][m]);
            if m + 1 < r_us {
                v = v.saturating_add(t[i + 1][m + 1]);
            }
            t[i][m] = v;
        }
    }
    let mut rank = 0u128;
    let mut maxm = 0usize;
    for i in 1..d {
        let ci = rgs[i] as usize;
        for v in 0..ci {
            rank = rank.saturating_add(t[i + 1][v.max(maxm)]);
        }
        maxm = maxm.max(ci);
    }
    rank
}

/// Materialise a colouring class representative over a realized domain.
pub fn rgs_coloring(r: u32, domain: &[Point], digits: &[u8]) -> Result<Coloring, Error> {
    if domain.len() != digits.len() {
        return Err(Error::InvalidConfig("colour string does not match the domain".into()));
    }
    Coloring::new(
        r,
        domain
            .iter()
            .cloned()
            .zip(digits.iter().map(|&c| c as u32))
            .collect(),
    )
}

/// Where to pick up a level scan.
#[derive(Debug, Clone, Default)]
pub struct LevelStart {
    /// Resume at this class; `None` starts from all zeros.
    pub rgs: Option<Vec<u8>>,
    /// Classes already tested at this level before `rgs`.
    pub classes_done: u128,
    /// Remaining node budget; `None` is unlimited.
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelScan {
    /// Every class admits a witness.
    Pass { classes_checked: u128 },
    /// First class with no witness.
    Fail { rgs: Vec<u8>, classes_checked: u128 },
    /// Budget ran out before `next_rgs` was tested.
    BudgetOut { next_rgs: Vec<u8>, classes_done: u128 },
}

/// Sequential scan of one level's colouring classes. Returns the outcome
/// and the number of nodes (classes tested) spent.
pub fn scan_level(level: &CompiledLevel, start: LevelStart) -> Result<(LevelScan, u64), Error> {
    let mut it = match start.rgs {
        Some(v) => {
            if v.len() != level.domain.len() {
                return Err(Error::InvalidConfig("resume string does not match the domain".into()));
            }
            RgsIter::resume(v, level.r)?
        }
        None => RgsIter::start(level.domain.len(), level.r),
    };
    let mut classes = start.classes_done;
    let mut nodes = 0u64;
    let mut hint = 0usize;
    loop {
        if !it.live() {
            return Ok((LevelScan::Pass { classes_checked: classes }, nodes));
        }
        if !level.skip_by_symmetry(it.digits()) {
            if start.budget.is_some_and(|b| nodes >= b) {
                return Ok((
                    LevelScan::BudgetOut {
                        next_rgs: it.digits().to_vec(),
                        classes_done: classes,
                    },
                    nodes,
                ));
            }
            nodes += 1;
            classes += 1;
            if !level.has_witness(it.digits(), &mut hint) {
                return Ok((
                    LevelScan::Fail {
                        rgs: it.digits().to_vec(),
                        classes_checked: classes,
                    },
                    nodes,
                ));
            }
        }
        it.advance();
    }
}

/// Resumable state of an interrupted [`compute_bound`] run.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    /// Statement at the level in progress.
    pub statement: Statement,
    pub r: u32,
    pub n_max: u32,
    pub nodes_used: u64,
    pub classes_done: u128,
    pub next_rgs: Vec<u8>,
    /// Completed (failed) levels.
    pub levels: Vec<LevelSummary>,
}

fn digits_text(digits: &[u8]) -> String {
    if digits.is_empty() {
        return String::from("-");
    }
    let mut out = String::new();
    for (i, d) in digits.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&alloc::format!("{d}"));
    }
    out
}

fn parse_digits(text: &str) -> Option<Vec<u8>> {
    if text == "-" {
        return Some(Vec::new());
    }
    text.split(',').map(|p| p.parse().ok()).collect()
}

impl Checkpoint {
    pub fn render(&self) -> String {
        let mut out = String::from("CHECKPOINT v1\n");
        out.push_str(&self.statement.encode());
        out.push('\n');
        out.push_str(&alloc::format!("colors {}\n", self.r));
        out.push_str(&alloc::format!("n_max {}\n", self.n_max));
        out.push_str(&alloc::format!("nodes_used {}\n", self.nodes_used));
        out.push_str(&alloc::format!("classes_done {}\n", self.classes_done));
        out.push_str(&alloc::format!("next_rgs {}\n", digits_text(&self.next_rgs)));
        for l in &self.levels {
            out.push_str(&alloc::format!(
                "level n={} domain={} classes={} total={} fail={}\n",
                l.n,
                l.domain_size,
                l.classes_checked,
                l.total_colorings,
                digits_text(l.fail_rgs.as_deref().unwrap_or(&[]))
            ));
        }
        out.push_str("END\n");
        out
    }

    pub fn parse(text: &str) -> Result<Checkpoint, Error> {
        let bad = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = text.lines().enumerate();
        let mut take = |prefix: &str| -> Result<(usize, String), Error> {
            match lines.next() {
                Some((i, l)) => match l.strip_prefix(prefix) {
                    Some(rest) => Ok((i + 1, String::from(rest))),
                    None => Err(bad(i + 1, alloc::format!("expected `{prefix}...`, found `{l}`"))),
                },
                None => Err(bad(0, alloc::format!("expected `{prefix}...`, found end of file"))),
            }
        };
        take("CHECKPOINT v1")?;
        let (i, st_rest) = take("statement ")?;
        let statement = Statement::parse(&alloc::format!("statement {st_rest}"))
            .map_err(|e| e.at_line(i))?;
        let (i, r) = take("colors ")?;
        let r: u32 = r.parse().map_err(|_| bad(i, "bad colour count".into()))?;
        let (i, n_max) = take("n_max ")?;
        let n_max: u32 = n_max.parse().map_err(|_| bad(i, "bad n_max".into()))?;
        let (i, nodes) = take("nodes_used ")?;
        let nodes_used: u64 = nodes.parse().map_err(|_| bad(i, "bad nodes_used".into()))?;
        let (i, classes) = take("classes_done ")?;
        let classes_done: u128 = classes.parse().map_err(|_| bad(i, "bad classes_done".into()))?;
        let (i, rgs) = take("next_rgs ")?;
        let next_rgs = parse_digits(&rgs).ok_or_else(|| bad(i, "bad next_rgs".into()))?;
        let mut levels = Vec::new();
        loop {
            match lines.next() {
                Some((_, "END")) => break,
                Some((i, l)) => {
                    let rest = l
                        .strip_prefix("level ")
                        .ok_or_else(|| bad(i + 1, alloc::format!("expected `level ...` or `END`, found `{l}`")))?;
                    let mut n = None;
                    let mut domain = None;
                    let mut classes = None;
                    let mut total = None;
                    let mut fail = None;
                    for field in rest.split(' ') {
                        let (key, value) = field
                            .split_once('=')
                            .ok_or_else(|| bad(i + 1, alloc::format!("bad field `{field}`")))?;
                        match key {
                            "n" => n = value.parse::<u32>().ok(),
                            "domain" => domain = value.parse::<u32>().ok(),
                            "classes" => classes = value.parse::<u128>().ok(),
                            "total" => total = value.parse::<u128>().ok(),
                            "fail" => fail = parse_digits(value),
                            _ => return Err(bad(i + 1, alloc::format!("unknown field `{key}`"))),
                        }
                    }
                    match (n, domain, classes, total, fail) {
                        (Some(n), Some(domain_size), Some(classes_checked), Some(total_colorings), Some(f)) => {
                            levels.push(LevelSummary {
                                n,
                                domain_size,
                                classes_checked,
                                total_colorings,
                                passed: false,
                                fail_rgs: Some(f),
                            })
                        }
                        _ => return Err(bad(i + 1, "incomplete level line".into())),
                    }
                }
                None => return Err(bad(0, "missing END".into())),
            }
        }
        Ok(Checkpoint {
            statement,
            r,
            n_max,
            nodes_used,
            classes_done,
            next_rgs,
            levels,
        })
    }
}

/// Minimal fragment size at which every `r`-colouring admits a witness.
///
/// Levels `N = 1..=n_max` are scanned in order; each level enumerates
/// colouring classes up to colour permutation and stops at the first class
/// with no witness. The first level where every class passes is the bound;
/// the previous level's failing class is returned as the bad colouring.
pub fn compute_bound(
    st: &Statement,
    r: u32,
    n_max: u32,
    opts: &BoundOptions,
    limits: &Limits,
) -> Result<BoundOutcome, Error> {
    compute_bound_with(st, r, n_max, opts, limits, scan_level)
}

/// [`compute_bound`] with a pluggable level scanner (the CLI substitutes a
/// parallel scan). The scanner must return exactly what [`scan_level`]
/// would.
pub fn compute_bound_with(
    st: &Statement,
    r: u32,
    n_max: u32,
    opts: &BoundOptions,
    limits: &Limits,
    mut scan: impl FnMut(&CompiledLevel, LevelStart) -> Result<(LevelScan, u64), Error>,
) -> Result<BoundOutcome, Error> {
    if n_max == 0 {
        return Err(Error::InvalidConfig("n_max must be at least 1".into()));
    }
    let mut levels: Vec<LevelSummary> = Vec::new();
    let mut nodes_used = 0u64;
    let mut start_n = 1u32;
    let mut resume_scan: Option<(Vec<u8>, u128)> = None;
    if let Some(text) = &opts.resume {
        let cp = Checkpoint::parse(text)?;
        if cp.statement.with_n(1).encode() != st.with_n(1).encode()
            || cp.r != r
            || cp.n_max != n_max
        {
            return Err(Error::InvalidConfig(
                "checkpoint does not match this bound query".into(),
            ));
        }
        levels = cp.levels;
        nodes_used = cp.nodes_used;
        start_n = cp.statement.n;
        resume_scan = Some((cp.next_rgs, cp.classes_done));
    }
    let mut budget_left = opts.budget;
    for n in start_n..=n_max {
        let level_st = st.with_n(n);
        let compiled = compile_level(&level_st, r, opts.hj_alphabet_symmetry, limits)?;
        let d = compiled.domain.len();
        let total = pow_u128(r as u128, d as u128);
        let start = match resume_scan.take() {
            Some((rgs, classes_done)) => LevelStart {
                rgs: Some(rgs),
                classes_done,
                budget: budget_left,
            },
            None => LevelStart {
                rgs: None,
                classes_done: 0,
                budget: budget_left,
            },
        };
        let (outcome, nodes) = scan(&compiled, start)?;
        nodes_used += nodes;
        if let Some(b) = &mut budget_left {
            *b -= nodes;
        }
        match outcome {
            LevelScan::Pass { classes_checked } => {
                levels.push(LevelSummary {
                    n,
                    domain_size: d as u32,
                    classes_checked,
                    total_colorings: total,
                    passed: true,
                    fail_rgs: None,
                });
                let bad_coloring = match levels.iter().rev().find(|l| !l.passed) {
                    Some(prev) if prev.n + 1 == n => {
                        let prev_realized = st.with_n(prev.n).realize(limits)?;
                        Some(rgs_coloring(
                            r,
                            prev_realized.domain(),
                            prev.fail_rgs.as_deref().unwrap_or(&[]),
                        )?)
                    }
                    _ => None,
                };
                return Ok(BoundOutcome::Found(BoundResult {
                    statement: st.with_n(n),
                    r,
                    n,
                    classes_checked_at_n: classes_checked,
                    total_colorings_at_n: total,
                    bad_coloring,
                    levels,
                    nodes_used,
                }));
            }
            LevelScan::Fail { rgs, classes_checked } => {
                levels.push(LevelSummary {
                    n,
                    domain_size: d as u32,
                    classes_checked,
                    total_colorings: total,
                    passed: false,
                    fail_rgs: Some(rgs),
                });
            }
            LevelScan::BudgetOut { next_rgs, classes_done } => {
                let cp = Checkpoint {
                    statement: level_st,
                    r,
                    n_max,
                    nodes_used,
                    classes_done,
                    next_rgs,
                    levels,
                };
                return Err(Error::BudgetExceeded {
                    nodes: nodes_used,
                    checkpoint: cp.render(),
                });
            }
        }
    }
    Ok(BoundOutcome::Inconclusive {
        n_max,
        levels,
        nodes_used,
    })
}

// ---- van der Waerden through Hales-Jewett ----

/// A monochromatic progression recovered from a combinatorial line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HjApWitness {
    /// The line: digits and `x` at variable positions.
    pub line: String,
    pub word_len: u32,
    /// Progression start (digit sum of the line at `x = 0`).
    pub a: u64,
    /// Progression difference (number of variable positions).
    pub d: u64,
    pub points: Vec<u64>,
    pub color: u32,
}

/// Find a monochromatic `k`-term progression in a colouring of `[0, M)` by
/// searching for a monochromatic combinatorial line over the digit alphabet
/// `{0, …, k-1}`, pulling the colouring back through digit sums.
///
/// Word length grows from 1 while `(k-1)·len` stays below `M`; lines are
/// scanned in lexicographic order (digits before the wildcard). The result
/// is re-checked against the colouring point by point before returning.
pub fn vdw_via_hj(k: u32, col: &Coloring, limits: &Limits) -> Result<Option<HjApWitness>, Error> {
    if !(2..=10).contains(&k) {
        return Err(Error::InvalidConfig("progression length must be in 2..=10".into()));
    }
    let m = col.len() as u64;
    for (i, (p, _)) in col.entries().iter().enumerate() {
        if !matches!(p, Point::Int(v) if *v == i as u64) {
            return Err(Error::InvalidConfig(
                "colouring must cover exactly the integers 0..M".into(),
            ));
        }
    }
    if m < k as u64 {
        return Err(Error::InvalidConfig("interval shorter than the progression".into()));
    }
    let max_len = ((m - 1) / (k as u64 - 1)) as u32;
    let mut budget = limits.max_terms;
    for len in 1..=max_len {
        let mut line = String::new();
        if let Some(w) = hj_line_search(k, col, len, 0, 0, &mut line, &mut budget)? {
            // Independent re-check, point by point.
            for (j, p) in w.points.iter().enumerate() {
                let expect = w.a + j as u64 * w.d;
                if *p != expect || col.color_of_text(&p.to_string()) != Some(w.color) {
                    return Err(Error::InvalidConfig(
                        "reduction produced a non-monochromatic progression".into(),
                    ));
                }
            }
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn hj_line_search(
    k: u32,
    col: &Coloring,
    len: u32,
    depth: u32,
    vars: u32,
    line: &mut String,
    budget: &mut u64,
) -> Result<Option<HjApWitness>, Error> {
    if depth == len {
        if vars == 0 {
            return Ok(None);
        }
        if *budget == 0 {
            return Err(Error::FragmentTooLarge {
                needed: 1,
                cap: 0,
            });
        }
        *budget -= 1;
        let mut a = 0u64;
        for c in line.chars() {
            if let Some(v) = c.to_digit(10) {
                a += v as u64;
            }
        }
        let d = vars as u64;
        let points: Vec<u64> = (0..k as u64).map(|j| a + j * d).collect();
        let mut color = None;
        for p in &points {
            let Some(c) = col.color_of_text(&p.to_string()) else {
                return Err(Error::ColoringNotTotal(p.to_string()));
            };
            match color {
                None => color = Some(c),
                Some(c0) if c0 == c => {}
                Some(_) => return Ok(None),
            }
        }
        return Ok(Some(HjApWitness {
            line: line.clone(),
            word_len: len,
            a,
            d,
            points,
            color: color.expect("progression is nonempty"),
        }));
    }
    for digit in 0..k {
        line.push(char::from_digit(digit, 10).expect("k <= 10"));
        let found = hj_line_search(k, col, len, depth + 1, vars, line, budget)?;
        line.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    line.push('x');
    let found = hj_line_search(k, col, len, depth + 1, vars + 1, line, budget)?;
    line.pop();
    Ok(found)
}

// ---- completeness surrogate ----

/// Selectors for sub-semigroups of `FINA` whose completeness is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinaSubsemigroup {
    /// All of the ambient semigroup.
    Full,
    /// Located-word-like elements: variables first appear in increasing,
    /// gap-free order along positions.
    Located,
    /// Elements whose support avoids even positions (a planted
    /// non-complete control).
    OddSupport,
}

impl FinaSubsemigroup {
    pub fn name(&self) -> &'static str {
        match self {
            FinaSubsemigroup::Full => "full",
            FinaSubsemigroup::Located => "located",
            FinaSubsemigroup::OddSupport => "odd-support",
        }
    }

    pub fn contains(&self, e: &Element) -> bool {
        let Payload::FinA(tokens) = e.payload() else {
            return false;
        };
        match self {
            FinaSubsemigroup::Full => true,
            FinaSubsemigroup::Located => {
                let mut seen = 0u32;
                for t in tokens {
                    if let Token::Var(k) = t {
                        if *k == 0 {
                            continue;
                        }
                        if *k > seen + 1 {
                            return false;
                        }
                        seen = seen.max(*k);
                    }
                }
                true
            }
            FinaSubsemigroup::OddSupport => tokens
                .iter()
                .enumerate()
                .all(|(i, t)| *t == Token::Var(0) || i % 2 == 1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompleteViolation {
    pub alpha: Element,
    pub k: Layer,
    pub sum: Element,
}

#[derive(Debug, Clone)]
pub struct CompleteReport {
    /// Layer-1 members of the sub-semigroup found in the fragment.
    pub alphas_checked: u64,
    /// (alpha, k) sums evaluated.
    pub sums_checked: u64,
    pub violations: Vec<CompleteViolation>,
}

impl CompleteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

const MAX_REPORTED: usize = 64;

/// Finite completeness surrogate: every layer-1 member `alpha`, summed with
/// copies of itself shifted to fresh positions and relabelled `x2..xk`, must
/// stay inside the sub-semigroup for each `k` up to the fragment's layer
/// bound.
pub fn check_complete(
    t: FinaSubsemigroup,
    sg: &crate::semigroup::Semigroup,
    frag: &FragmentSpec,
    limits: &Limits,
) -> Result<CompleteReport, Error> {
    if sg.kind() != crate::semigroup::SemigroupKind::FinA {
        return Err(Error::KindMismatch("check_complete works on FINA".into()));
    }
    let layer1 = FragmentSpec::new(1, frag.size_bound);
    let elems = enumerate_fragment(sg, &layer1, limits)?;
    let mut report = CompleteReport {
        alphas_checked: 0,
        sums_checked: 0,
        violations: Vec::new(),
    };
    for alpha in &elems {
        if alpha.layer() != 1 || !t.contains(alpha) {
            continue;
        }
        report.alphas_checked += 1;
        let Payload::FinA(tokens) = alpha.payload() else {
            unreachable!("FINA fragment yields FINA payloads");
        };
        let start = tokens
            .iter()
            .position(|tok| *tok != Token::Var(0))
            .expect("fragment excludes the zero element");
        let mut sum = tokens.clone();
        for k in 2..=frag.max_layer {
            if report.sums_checked >= limits.max_terms {
                return Err(Error::FragmentTooLarge {
                    needed: report.sums_checked as u128 + 1,
                    cap: limits.max_terms as u128,
                });
            }
            // Append the next copy so its least support position lands just
            // past the current greatest one.
            sum.extend(tokens[start..].iter().map(|tok| match tok {
                Token::Var(1) => Token::Var(k),
                other => *other,
            }));
            report.sums_checked += 1;
            let elem = sg.element_from_payload(Payload::FinA(sum.clone()))?;
            debug_assert_eq!(elem.layer(), k);
            if !t.contains(&elem) && report.violations.len() < MAX_REPORTED {
                report.violations.push(CompleteViolation {
                    alpha: alpha.clone(),
                    k,
                    sum: elem,
                });
            }
        }
    }
    Ok(report)
}
