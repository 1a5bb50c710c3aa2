//! Combination spans of block sequences.
//!
//! A term picks indices `n_1 < ... < n_l` into a sequence and one family
//! member per index; its value is the left-associated sum
//! `f_1(x_{n_1}) + ... + f_l(x_{n_l})`. The sequence is a *block sequence*
//! when every such term (up to a length bound) is defined. The layer-`k`
//! span is the set of defined term values of layer `k`; the m-tuple span
//! groups one term's summands into `m` consecutive partial sums.
//!
//! Indices are 1-based throughout, matching the term notation above.

use alloc::string::String;
use alloc::vec::Vec;

use crate::element::{Element, Layer};
use crate::error::Error;
use crate::laws::binomial;
use crate::maps::{apply, MapDescriptor, MapFamily};
use crate::semigroup::Semigroup;
use crate::zoo::Limits;

/// A sequence of same-semigroup elements bundled with the map family it is
/// meant to be a block sequence for.
#[derive(Debug, Clone)]
pub struct BlockSequence {
    pub elements: Vec<Element>,
    pub family: MapFamily,
}

/// One witnessed span value: `value = f_1(x_{n_1}) + ... + f_l(x_{n_l})`.
#[derive(Debug, Clone)]
pub struct SpanTerm {
    /// 1-based, strictly increasing.
    pub indices: Vec<u32>,
    pub maps: Vec<MapDescriptor>,
    pub value: Element,
    pub target_layer: Layer,
}

/// One witnessed tuple-span value: the summands of a single term, grouped by
/// cut points `0 < l_1 < ... < l_m` into consecutive partial sums.
#[derive(Debug, Clone)]
pub struct TupleSpanTerm {
    /// The cut points; `cuts[m-1]` equals the term length.
    pub cuts: Vec<u32>,
    pub indices: Vec<u32>,
    pub maps: Vec<MapDescriptor>,
    pub values: Vec<Element>,
}

/// Result of [`is_block_sequence`].
#[derive(Debug, Clone)]
pub struct BlockSequenceCheck {
    pub is_block: bool,
    /// First undefined term in enumeration order, if any.
    pub counterexample: Option<(Vec<u32>, Vec<MapDescriptor>)>,
}

/// Evaluate one term; `None` means some partial sum was undefined.
pub fn evaluate_term(
    sg: &Semigroup,
    xs: &[Element],
    indices: &[u32],
    maps: &[MapDescriptor],
) -> Result<Option<Element>, Error> {
    if indices.is_empty() {
        return Err(Error::InvalidConfig("term needs at least one index".into()));
    }
    if indices.len() != maps.len() {
        return Err(Error::InvalidConfig(
            "term needs exactly one map per index".into(),
        ));
    }
    for w in indices.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidConfig(
                "term indices must be strictly increasing".into(),
            ));
        }
    }
    if indices[0] == 0 || indices[indices.len() - 1] as usize > xs.len() {
        return Err(Error::InvalidConfig(format_index_range(xs.len())));
    }
    let mut acc = apply(&maps[0], sg, &xs[indices[0] as usize - 1])?;
    for (&n, m) in indices[1..].iter().zip(&maps[1..]) {
        let next = apply(m, sg, &xs[n as usize - 1])?;
        match sg.combine(&acc, &next)? {
            Some(sum) => acc = sum,
            None => return Ok(None),
        }
    }
    Ok(Some(acc))
}

fn format_index_range(n: usize) -> String {
    alloc::format!("term indices are 1-based and must lie in 1..={n}")
}

/// Number of terms of length 1..=max_len over `n` indices and `f` maps.
fn term_count(n: usize, f: usize, max_len: u32) -> u128 {
    let mut total = 0u128;
    for l in 1..=max_len as u128 {
        total = total.saturating_add(
            binomial(n as u128, l).saturating_mul((f as u128).saturating_pow(l as u32)),
        );
    }
    total
}

/// Visit every term (1-based indices plus maps) in lexicographic order on
/// (length, indices, map descriptor text); stops early when `visit` says so.
fn for_each_term<E>(
    n: usize,
    fam: &MapFamily,
    max_len: u32,
    mut visit: impl FnMut(&[u32], &[MapDescriptor]) -> Result<bool, E>,
) -> Result<(), E> {
    let mut indices: Vec<u32> = Vec::new();
    let mut maps: Vec<MapDescriptor> = Vec::new();
    for len in 1..=max_len.min(n as u32) {
        if !visit_indices(n, fam, len, &mut indices, &mut maps, &mut visit)? {
            return Ok(());
        }
    }
    Ok(())
}

fn visit_indices<E>(
    n: usize,
    fam: &MapFamily,
    len: u32,
    indices: &mut Vec<u32>,
    maps: &mut Vec<MapDescriptor>,
    visit: &mut impl FnMut(&[u32], &[MapDescriptor]) -> Result<bool, E>,
) -> Result<bool, E> {
    if indices.len() == len as usize {
        return visit_maps(fam, indices, maps, visit);
    }
    let lo = indices.last().map_or(1, |&i| i + 1);
    // Leave room for the remaining positions.
    let hi = n as u32 - (len - indices.len() as u32) + 1;
    for i in lo..=hi {
        indices.push(i);
        let keep_going = visit_indices(n, fam, len, indices, maps, visit)?;
        indices.pop();
        if !keep_going {
            return Ok(false);
        }
    }
    Ok(true)
}

fn visit_maps<E>(
    fam: &MapFamily,
    indices: &[u32],
    maps: &mut Vec<MapDescriptor>,
    visit: &mut impl FnMut(&[u32], &[MapDescriptor]) -> Result<bool, E>,
) -> Result<bool, E> {
    if maps.len() == indices.len() {
        return visit(indices, maps);
    }
    for m in &fam.members {
        maps.push(m.clone());
        let keep_going = visit_maps(fam, indices, maps, visit)?;
        maps.pop();
        if !keep_going {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Check that every term up to `max_len` is defined.
pub fn is_block_sequence(
    sg: &Semigroup,
    xs: &[Element],
    fam: &MapFamily,
    max_len: u32,
    limits: &Limits,
) -> Result<BlockSequenceCheck, Error> {
    if max_len as usize > xs.len() {
        return Err(Error::InvalidConfig(alloc::format!(
            "max_len {max_len} exceeds sequence length {}",
            xs.len()
        )));
    }
    if fam.members.is_empty() {
        return Err(Error::InvalidConfig("empty map family".into()));
    }
    let needed = term_count(xs.len(), fam.members.len(), max_len);
    if needed > limits.max_terms as u128 {
        return Err(Error::FragmentTooLarge {
            needed,
            cap: limits.max_terms as u128,
        });
    }
    let mut counterexample = None;
    for_each_term(xs.len(), fam, max_len, |indices, maps| {
        if evaluate_term(sg, xs, indices, maps)?.is_none() {
            counterexample = Some((indices.to_vec(), maps.to_vec()));
            return Ok(false);
        }
        Ok::<bool, Error>(true)
    })?;
    Ok(BlockSequenceCheck {
        is_block: counterexample.is_none(),
        counterexample,
    })
}

/// Layer-`k` span values, deduplicated with one witness term per value,
/// sorted by canonical value text.
pub fn enumerate_span(
    sg: &Semigroup,
    xs: &[Element],
    fam: &MapFamily,
    k: Layer,
    max_len: u32,
    limits: &Limits,
) -> Result<Vec<SpanTerm>, Error> {
    span_terms(sg, xs, fam, k, max_len, limits, true)
}

/// As [`enumerate_span`] but keeping every witnessing term (full
/// multiplicity), in enumeration order.
pub fn enumerate_span_full(
    sg: &Semigroup,
    xs: &[Element],
    fam: &MapFamily,
    k: Layer,
    max_len: u32,
    limits: &Limits,
) -> Result<Vec<SpanTerm>, Error> {
    span_terms(sg, xs, fam, k, max_len, limits, false)
}

fn span_terms(
    sg: &Semigroup,
    xs: &[Element],
    fam: &MapFamily,
    k: Layer,
    max_len: u32,
    limits: &Limits,
    dedup: bool,
) -> Result<Vec<SpanTerm>, Error> {
    if fam.members.is_empty() {
        return Err(Error::InvalidConfig("empty map family".into()));
    }
    let needed = term_count(xs.len(), fam.members.len(), max_len.min(xs.len() as u32));
    if needed > limits.max_terms as u128 {
        return Err(Error::FragmentTooLarge {
            needed,
            cap: limits.max_terms as u128,
        });
    }
    let mut seen: alloc::collections::BTreeSet<String> = Default::default();
    let mut out: Vec<SpanTerm> = Vec::new();
    for_each_term(xs.len(), fam, max_len, |indices, maps| {
        if let Some(value) = evaluate_term(sg, xs, indices, maps)? {
            if value.layer() == k && (!dedup || seen.insert(value.encode())) {
                out.push(SpanTerm {
                    indices: indices.to_vec(),
                    maps: maps.to_vec(),
                    value,
                    target_layer: k,
                });
            }
        }
        Ok::<bool, Error>(true)
    })?;
    if dedup {
        out.sort_by_cached_key(|t| t.value.encode());
    }
    Ok(out)
}

/// m-tuple span: group each term's summands by every choice of cut points
/// and keep tuples whose components all have layer `k` and which form a
/// block sequence for the family themselves.
pub fn enumerate_tuple_span(
    sg: &Semigroup,
    xs: &[Element],
    fam: &MapFamily,
    m: u32,
    k: Layer,
    max_len: u32,
    limits: &Limits,
) -> Result<Vec<TupleSpanTerm>, Error> {
    if m == 0 {
        return Err(Error::InvalidConfig("tuple span needs m >= 1".into()));
    }
    if fam.members.is_empty() {
        return Err(Error::InvalidConfig("empty map family".into()));
    }
    let groupings: u128 = (1..=max_len as u128)
        .map(|l| binomial(l - 1, m as u128 - 1))
        .max()
        .unwrap_or(1);
    let needed = term_count(xs.len(), fam.members.len(), max_len.min(xs.len() as u32))
        .saturating_mul(groupings);
    if needed > limits.max_terms as u128 {
        return Err(Error::FragmentTooLarge {
            needed,
            cap: limits.max_terms as u128,
        });
    }

    let mut seen: alloc::collections::BTreeSet<Vec<String>> = Default::default();
    let mut out: Vec<TupleSpanTerm> = Vec::new();
    for_each_term(xs.len(), fam, max_len, |indices, maps| {
        let len = indices.len() as u32;
        if len < m {
            return Ok::<bool, Error>(true);
        }
        let mut cuts: Vec<u32> = (1..m).collect();
        cuts.push(len);
        loop {
            if let Some(values) = evaluate_groups(sg, xs, indices, maps, &cuts)? {
                if values.iter().all(|v| v.layer() == k) {
                    let check = is_block_sequence(sg, &values, fam, m, limits)?;
                    if check.is_block {
                        let key: Vec<String> = values.iter().map(Element::encode).collect();
                        if seen.insert(key) {
                            out.push(TupleSpanTerm {
                                cuts: cuts.clone(),
                                indices: indices.to_vec(),
                                maps: maps.to_vec(),
                                values,
                            });
                        }
                    }
                }
            }
            if !next_cuts(&mut cuts, len) {
                break;
            }
        }
        Ok(true)
    })?;
    out.sort_by_cached_key(|t| t.values.iter().map(Element::encode).collect::<Vec<_>>());
    Ok(out)
}

/// Grouped partial sums for one term; `None` if any sum is undefined.
fn evaluate_groups(
    sg: &Semigroup,
    xs: &[Element],
    indices: &[u32],
    maps: &[MapDescriptor],
    cuts: &[u32],
) -> Result<Option<Vec<Element>>, Error> {
    let mut values = Vec::with_capacity(cuts.len());
    let mut start = 0usize;
    for &cut in cuts {
        let end = cut as usize;
        match evaluate_term(sg, xs, &indices[start..end], &maps[start..end])? {
            Some(v) => values.push(v),
            None => return Ok(None),
        }
        start = end;
    }
    Ok(Some(values))
}

/// Advance interior cut points `0 < c_1 < ... < c_{m-1} < c_m = len` in
/// lexicographic order; the last cut is fixed at `len`.
fn next_cuts(cuts: &mut [u32], len: u32) -> bool {
    let m = cuts.len();
    if m == 1 {
        return false;
    }
    // Odometer over cuts[0..m-1], each strictly between neighbours.
    let mut i = m - 2;
    loop {
        let upper = if i + 1 == m - 1 { len } else { cuts[i + 1] };
        if cuts[i] + 1 < upper {
            cuts[i] += 1;
            for j in i + 1..m - 1 {
                cuts[j] = cuts[j - 1] + 1;
            }
            return true;
        }
        if i == 0 {
            return false;
        }
        i -= 1;
    }
}
