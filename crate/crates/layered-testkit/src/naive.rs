//! Brute-force oracles, written from the definitions.
//!
//! The span oracle folds sums directly with `combine` and `apply`; the
//! witness oracle tries every tuple and every colour by hand; the bound
//! oracles enumerate colourings outright (van der Waerden, Hales-Jewett) or
//! run a small backtracking solver (finite unions). None of them touch the
//! production span engine or searcher.

use std::collections::BTreeSet;

use layered_core::color::{Coloring, Point};
use layered_core::maps::{apply, MapDescriptor};
use layered_core::statement::{Realization, Statement};
use layered_core::zoo::Limits;
use layered_core::{Element, Layer, Semigroup};

/// Left-fold a term by hand; `None` when some partial sum is undefined.
pub fn eval_term(
    sg: &Semigroup,
    xs: &[Element],
    idx: &[usize],
    maps: &[&MapDescriptor],
) -> Option<Element> {
    let mut acc: Option<Element> = None;
    for (&i, m) in idx.iter().zip(maps) {
        let image = apply(m, sg, &xs[i]).ok()?;
        acc = Some(match acc {
            None => image,
            Some(prev) => sg.combine(&prev, &image).ok().flatten()?,
        });
    }
    acc
}

fn for_each_subset(n: usize, max_len: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(n: usize, max_len: usize, start: usize, idx: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if !idx.is_empty() {
            f(idx);
        }
        if idx.len() == max_len {
            return;
        }
        for i in start..n {
            idx.push(i);
            rec(n, max_len, i + 1, idx, f);
            idx.pop();
        }
    }
    rec(n, max_len, 0, &mut Vec::new(), f);
}

fn for_each_map_tuple<'a>(
    family: &'a [MapDescriptor],
    len: usize,
    f: &mut impl FnMut(&[&'a MapDescriptor]),
) {
    fn rec<'a>(
        family: &'a [MapDescriptor],
        len: usize,
        maps: &mut Vec<&'a MapDescriptor>,
        f: &mut impl FnMut(&[&'a MapDescriptor]),
    ) {
        if maps.len() == len {
            f(maps);
            return;
        }
        for m in family {
            maps.push(m);
            rec(family, len, maps, f);
            maps.pop();
        }
    }
    rec(family, len, &mut Vec::new(), f);
}

/// Every defined span value at the target layer, as sorted canonical texts.
pub fn span_values(
    sg: &Semigroup,
    xs: &[Element],
    family: &[MapDescriptor],
    target_layer: Layer,
    max_len: u32,
) -> Vec<String> {
    let mut out = BTreeSet::new();
    for_each_subset(xs.len(), max_len as usize, &mut |idx| {
        for_each_map_tuple(family, idx.len(), &mut |maps| {
            if let Some(v) = eval_term(sg, xs, idx, maps) {
                if v.layer() == target_layer {
                    out.insert(v.encode());
                }
            }
        });
    });
    out.into_iter().collect()
}

/// Every index/map combination evaluates (the block-sequence property).
pub fn is_block_sequence(
    sg: &Semigroup,
    xs: &[Element],
    family: &[MapDescriptor],
    max_len: u32,
) -> bool {
    let mut ok = true;
    for_each_subset(xs.len(), max_len as usize, &mut |idx| {
        for_each_map_tuple(family, idx.len(), &mut |maps| {
            if eval_term(sg, xs, idx, maps).is_none() {
                ok = false;
            }
        });
    });
    ok
}

/// Every m-tuple span value, as sorted `" ; "`-joined canonical texts.
pub fn tuple_span_values(
    sg: &Semigroup,
    xs: &[Element],
    family: &[MapDescriptor],
    m: u32,
    k: Layer,
    max_len: u32,
) -> Vec<String> {
    let m = m as usize;
    let mut out = BTreeSet::new();
    for_each_subset(xs.len(), max_len as usize, &mut |idx| {
        if idx.len() < m {
            return;
        }
        for_each_map_tuple(family, idx.len(), &mut |maps| {
            for_each_cut(idx.len(), m, &mut |cuts| {
                let mut values = Vec::with_capacity(m);
                let mut start = 0usize;
                for &end in cuts {
                    match eval_term(sg, xs, &idx[start..end], &maps[start..end]) {
                        Some(v) if v.layer() == k => values.push(v),
                        _ => return,
                    }
                    start = end;
                }
                if is_block_sequence(sg, &values, family, m as u32) {
                    let texts: Vec<String> = values.iter().map(Element::encode).collect();
                    out.insert(texts.join(" ; "));
                }
            });
        });
    });
    out.into_iter().collect()
}

fn for_each_cut(len: usize, m: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(len: usize, m: usize, cuts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cuts.len() == m - 1 {
            cuts.push(len);
            f(cuts);
            cuts.pop();
            return;
        }
        let low = cuts.last().map_or(1, |&c| c + 1);
        // Leave room for the remaining cuts.
        let high = len - (m - 1 - cuts.len());
        for c in low..=high {
            cuts.push(c);
            rec(len, m, cuts, f);
            cuts.pop();
        }
    }
    if m == 0 || len < m {
        return;
    }
    rec(len, m, &mut Vec::new(), f);
}

fn injective_tuples(n: usize, l: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        n: usize,
        l: usize,
        used: &mut [bool],
        idx: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if idx.len() == l {
            return f(idx);
        }
        for i in 0..n {
            if used[i] {
                continue;
            }
            used[i] = true;
            idx.push(i);
            let stop = rec(n, l, used, idx, f);
            idx.pop();
            used[i] = false;
            if stop {
                return true;
            }
        }
        false
    }
    rec(n, l, &mut vec![false; n], &mut Vec::new(), f)
}

fn mono_color(col: &Coloring, texts: &[String]) -> Option<u32> {
    let mut color = None;
    for t in texts {
        let c = col.color_of_text(t)?;
        match color {
            None => color = Some(c),
            Some(c0) if c0 == c => {}
            Some(_) => return None,
        }
    }
    color
}

/// Does the statement have a witness under this colouring? Tries every
/// candidate tuple by hand; panics on malformed inputs (this is test code).
pub fn has_witness(st: &Statement, col: &Coloring, limits: &Limits) -> bool {
    match st.realize(limits).expect("statement realizes") {
        Realization::Span(inst) => {
            let family = inst.family.members.clone();
            injective_tuples(inst.candidates.len(), inst.block_len as usize, &mut |idx| {
                let xs: Vec<Element> = idx.iter().map(|&i| inst.candidates[i].clone()).collect();
                if !is_block_sequence(&inst.sg, &xs, &family, inst.block_len) {
                    return false;
                }
                inst.k_set.iter().all(|&k| {
                    let values = span_values(&inst.sg, &xs, &family, k, inst.block_len);
                    !values.is_empty() && mono_color(col, &values).is_some()
                })
            })
        }
        Realization::Tuple(inst) => {
            let family = inst.family.members.clone();
            injective_tuples(inst.candidates.len(), inst.block_len as usize, &mut |idx| {
                let xs: Vec<Element> = idx.iter().map(|&i| inst.candidates[i].clone()).collect();
                if !is_block_sequence(&inst.sg, &xs, &family, inst.block_len) {
                    return false;
                }
                let values =
                    tuple_span_values(&inst.sg, &xs, &family, inst.m, inst.k, inst.block_len);
                !values.is_empty() && mono_color(col, &values).is_some()
            })
        }
        Realization::Vdw(inst) => {
            let colors: Vec<u32> = (1..=inst.n as u64)
                .map(|v| col.color_of(&Point::Int(v)).expect("colouring is total"))
                .collect();
            mono_ap(&colors, inst.k, 1).is_some()
        }
    }
}

/// First monochromatic k-term progression in `colors[base..]`, indices taken
/// as the integers `base, base+1, …`; returns (start, difference).
pub fn mono_ap(colors: &[u32], k: u32, base: u64) -> Option<(u64, u64)> {
    let n = colors.len() as u64;
    for a in 0..n {
        let mut d = 1;
        loop {
            if k >= 2 && a + (k as u64 - 1) * d >= n {
                break;
            }
            let c0 = colors[a as usize];
            if (1..k as u64).all(|j| colors[(a + j * d) as usize] == c0) {
                return Some((a + base, d));
            }
            if k < 2 {
                return Some((a + base, d));
            }
            d += 1;
        }
    }
    None
}

/// Minimal N such that every r-colouring of [1, N] has a monochromatic
/// k-term progression, by enumerating all r^N colourings.
pub fn vdw_min_bound(k: u32, r: u32, n_max: u32) -> Option<u32> {
    'level: for n in 1..=n_max {
        let mut colors = vec![0u32; n as usize];
        loop {
            if mono_ap(&colors, k, 1).is_none() {
                continue 'level;
            }
            if !next_coloring(&mut colors, r) {
                return Some(n);
            }
        }
    }
    None
}

fn next_coloring(colors: &mut [u32], r: u32) -> bool {
    for c in colors.iter_mut().rev() {
        if *c + 1 < r {
            *c += 1;
            return true;
        }
        *c = 0;
    }
    false
}

/// Minimal N such that every r-colouring of the length-N words over an
/// `a`-letter alphabet has a monochromatic combinatorial line.
pub fn hj_min_bound(a: u32, r: u32, n_max: u32) -> Option<u32> {
    'level: for n in 1..=n_max {
        let words = (a as u64).pow(n);
        let lines = hj_lines(a, n);
        let mut colors = vec![0u32; words as usize];
        loop {
            let has_line = lines.iter().any(|line| {
                let c0 = colors[line[0] as usize];
                line.iter().all(|&w| colors[w as usize] == c0)
            });
            if !has_line {
                continue 'level;
            }
            if !next_coloring(&mut colors, r) {
                return Some(n);
            }
        }
    }
    None
}

/// Indices (base-a digit strings, most significant first) of each line's
/// `a` instance words.
fn hj_lines(a: u32, n: u32) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    // Roots are strings over digits 0..a plus the wildcard `a`.
    let mut root = vec![0u32; n as usize];
    loop {
        if root.iter().any(|&s| s == a) {
            let instances: Vec<u64> = (0..a as u64)
                .map(|j| {
                    root.iter().fold(0u64, |acc, &s| {
                        acc * a as u64 + if s == a { j } else { s as u64 }
                    })
                })
                .collect();
            out.push(instances);
        }
        let mut done = true;
        for s in root.iter_mut().rev() {
            if *s < a {
                *s += 1;
                done = false;
                break;
            }
            *s = 0;
        }
        if done {
            return out;
        }
    }
}

/// Is there an r-colouring of the nonempty subsets of an n-element set with
/// no pair of disjoint sets x, y such that x, y, and x ∪ y share a colour?
/// Backtracking over subsets in size order, colours canonicalised by first
/// use.
pub fn fu2_bad_coloring_exists(n: u32, r: u32) -> bool {
    let total = (1usize << n) - 1;
    let mut order: Vec<u32> = (1..=total as u32).collect();
    order.sort_by_key(|m| (m.count_ones(), *m));
    let mut color = vec![u8::MAX; total + 1];

    fn conflict(u: usize, c: u8, color: &[u8]) -> bool {
        let mut x = (u - 1) & u;
        while x > 0 {
            let y = u ^ x;
            if x < y && color[x] == c && color[y] == c {
                return true;
            }
            x = (x - 1) & u;
        }
        false
    }

    fn rec(pos: usize, order: &[u32], color: &mut [u8], used: u8, r: u8) -> bool {
        let Some(&u) = order.get(pos) else {
            return true;
        };
        let u = u as usize;
        let cap = used.min(r - 1);
        for c in 0..=cap {
            if !conflict(u, c, color) {
                color[u] = c;
                if rec(pos + 1, order, color, used.max(c + 1), r) {
                    return true;
                }
                color[u] = u8::MAX;
            }
        }
        false
    }

    rec(0, &order, &mut color, 0, r as u8)
}

/// Minimal N such that every r-colouring of the nonempty subsets of [0, N)
/// makes some {x, y, x ∪ y} with x, y disjoint monochromatic.
pub fn fu2_min_bound(r: u32, n_max: u32) -> Option<u32> {
    (1..=n_max).find(|&n| !fu2_bad_coloring_exists(n, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use layered_core::SemigroupKind;

    #[test]
    fn span_oracle_on_a_written_out_example() {
        let sg = Semigroup::new(SemigroupKind::Fin, None, false).unwrap();
        let xs = vec![
            sg.parse_element("FIN {0:1}").unwrap(),
            sg.parse_element("FIN {1:1}").unwrap(),
        ];
        let family = vec![MapDescriptor::parse("id").unwrap()];
        let values = span_values(&sg, &xs, &family, 1, 2);
        assert_eq!(values, ["FIN {0:1,1:1}", "FIN {0:1}", "FIN {1:1}"]);
        assert!(is_block_sequence(&sg, &xs, &family, 2));

        let overlap = vec![
            sg.parse_element("FIN {0:1}").unwrap(),
            sg.parse_element("FIN {0:2}").unwrap(),
        ];
        assert!(!is_block_sequence(&sg, &overlap, &family, 2));
    }

    #[test]
    fn tuple_oracle_keeps_disjoint_groupings() {
        let sg = Semigroup::new(SemigroupKind::Fin, None, false).unwrap();
        let xs = vec![
            sg.parse_element("FIN {0:1}").unwrap(),
            sg.parse_element("FIN {1:1}").unwrap(),
            sg.parse_element("FIN {2:1}").unwrap(),
        ];
        let family = vec![MapDescriptor::parse("id").unwrap()];
        let tuples = tuple_span_values(&sg, &xs, &family, 2, 1, 3);
        assert!(tuples.contains(&"FIN {0:1} ; FIN {1:1,2:1}".to_string()));
        assert!(tuples.iter().all(|t| t.matches(" ; ").count() == 1));
    }

    #[test]
    fn vdw_bounds_match_the_classics() {
        assert_eq!(vdw_min_bound(3, 1, 5), Some(3));
        assert_eq!(vdw_min_bound(2, 2, 5), Some(3));
        assert_eq!(vdw_min_bound(3, 2, 12), Some(9));
    }

    #[test]
    fn hj_two_letter_bound_is_two() {
        assert_eq!(hj_min_bound(2, 2, 3), Some(2));
        assert_eq!(hj_min_bound(2, 1, 3), Some(1));
    }

    #[test]
    fn finite_unions_two_colour_bound_is_five() {
        assert!(fu2_bad_coloring_exists(4, 2));
        assert!(!fu2_bad_coloring_exists(5, 2));
        assert_eq!(fu2_min_bound(2, 6), Some(5));
    }

    #[test]
    fn mono_ap_finds_known_progressions() {
        // 1,2 red; 3,4 blue; 5,6 red; 7,8 blue has no mono 3-AP.
        let colors: Vec<u32> = (1..=8u64).map(|v| (((v - 1) / 2) % 2) as u32).collect();
        assert_eq!(mono_ap(&colors, 3, 1), None);
        let extended: Vec<u32> = (1..=9u64).map(|v| (((v - 1) / 2) % 2) as u32).collect();
        assert_eq!(mono_ap(&extended, 3, 1), Some((1, 4)));
    }
}
