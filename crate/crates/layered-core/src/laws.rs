//! Exhaustive fragment checkers for the defining laws.
//!
//! * [`check_layering_law`] — `l(s + t) = max(l(s), l(t))` on every defined
//!   pair, plus associativity on every triple where both parenthesisations
//!   are defined. An empty violation list is a pass *for the fragment*.
//! * [`check_adequacy`] — for every same-layer subset (up to a size cap),
//!   search a witness pool for a right extender of the same layer. A miss is
//!   reported as *inconclusive*: the pool may simply be too small; adequacy
//!   can never be refuted on a fragment.
//!
//! Partial kinds with supports inside `0..64` take a bitmask fast path:
//! definedness of `s + t` is (up to the order flag) disjointness of support
//! masks, so only genuinely combinable pairs/triples are materialised.

use alloc::vec::Vec;

use crate::element::{Element, Layer};
use crate::error::Error;
use crate::semigroup::Semigroup;
use crate::zoo::{enumerate_fragment_upto, FragmentSpec, Limits};

/// Which law a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawViolationKind {
    /// `l(s + t) != max(l(s), l(t))` — elements are `[s, t, s + t]`.
    Layering,
    /// `(s + t) + u != s + (t + u)` with both sides defined — `[s, t, u]`.
    Associativity,
}

#[derive(Debug, Clone)]
pub struct LawViolation {
    pub kind: LawViolationKind,
    pub elements: Vec<Element>,
}

/// Outcome of a layering/associativity sweep.
#[derive(Debug, Clone)]
pub struct LawReport {
    pub elements: u64,
    /// Ordered pairs considered (`n^2`).
    pub pairs_checked: u64,
    /// Pairs on which the operation was defined.
    pub defined_pairs: u64,
    /// Triples on which both parenthesisations were evaluated.
    pub triples_checked: u64,
    pub violations: Vec<LawViolation>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustively check the layering law and associativity over a fragment.
pub fn check_layering_law(
    sg: &Semigroup,
    frag: &FragmentSpec,
    limits: &Limits,
) -> Result<LawReport, Error> {
    let elems = enumerate_fragment_upto(sg, frag, limits)?;
    check_layering_law_elems(sg, &elems, limits, &|_, _, st| st.layer())
}

/// Law sweep over explicit elements, with an injectable layering claim.
///
/// `claimed_layer(s, t, s + t)` is what the descriptor under test asserts for
/// the layer of the sum; the production path passes the element's own cached
/// layer, a negative control can pass e.g. `s.layer()` to model a descriptor
/// whose layering map is broken.
pub fn check_layering_law_elems(
    sg: &Semigroup,
    elems: &[Element],
    limits: &Limits,
    claimed_layer: &dyn Fn(&Element, &Element, &Element) -> Layer,
) -> Result<LawReport, Error> {
    let n = elems.len();
    let masks: Option<Vec<u64>> = elems.iter().map(Element::support_mask).collect();

    let mut report = LawReport {
        elements: n as u64,
        pairs_checked: (n as u64) * (n as u64),
        defined_pairs: 0,
        triples_checked: 0,
        violations: Vec::new(),
    };

    match masks {
        Some(masks) => {
            // Bucket by support mask; definedness only depends on the mask
            // (plus the order flag), so work is estimated and iterated per
            // disjoint bucket pair instead of per element pair.
            let mut buckets: alloc::collections::BTreeMap<u64, Vec<usize>> = Default::default();
            for (i, m) in masks.iter().enumerate() {
                buckets.entry(*m).or_default().push(i);
            }
            let buckets: Vec<(u64, Vec<usize>)> = buckets.into_iter().collect();

            let mut est_pairs = 0u128;
            let mut est_triples = 0u128;
            for (ma, va) in &buckets {
                for (mb, vb) in &buckets {
                    if ma & mb != 0 {
                        continue;
                    }
                    let ab = (va.len() as u128) * (vb.len() as u128);
                    est_pairs += ab;
                    for (mc, vc) in &buckets {
                        if (ma | mb) & mc == 0 {
                            est_triples += ab * vc.len() as u128;
                        }
                    }
                }
            }
            if est_pairs + est_triples > limits.max_terms as u128 {
                return Err(Error::FragmentTooLarge {
                    needed: est_pairs + est_triples,
                    cap: limits.max_terms as u128,
                });
            }

            for (ma, va) in &buckets {
                for (mb, vb) in &buckets {
                    if ma & mb != 0 {
                        continue;
                    }
                    let thirds: Vec<usize> = buckets
                        .iter()
                        .filter(|(mc, _)| (ma | mb) & mc == 0)
                        .flat_map(|(_, vc)| vc.iter().copied())
                        .collect();
                    for &i in va {
                        for &j in vb {
                            let (s, t) = (&elems[i], &elems[j]);
                            let Some(st) = sg.combine(s, t)? else { continue };
                            report.defined_pairs += 1;
                            check_pair(&mut report, sg, s, t, &st, claimed_layer);
                            for &k in &thirds {
                                check_triple(&mut report, sg, s, t, &elems[k], Some(&st))?;
                            }
                        }
                    }
                }
            }
        }
        None => {
            let est = (n as u128) * (n as u128) + (n as u128).pow(3);
            if est > limits.max_terms as u128 {
                return Err(Error::FragmentTooLarge {
                    needed: est,
                    cap: limits.max_terms as u128,
                });
            }
            for s in elems {
                for t in elems {
                    let Some(st) = sg.combine(s, t)? else { continue };
                    report.defined_pairs += 1;
                    check_pair(&mut report, sg, s, t, &st, claimed_layer);
                    for u in elems {
                        check_triple(&mut report, sg, s, t, u, Some(&st))?;
                    }
                }
            }
        }
    }

    // Deterministic report order regardless of how the sweep was partitioned.
    report
        .violations
        .sort_by_cached_key(|v| v.elements.iter().map(Element::encode).collect::<Vec<_>>());
    Ok(report)
}

fn check_pair(
    report: &mut LawReport,
    _sg: &Semigroup,
    s: &Element,
    t: &Element,
    st: &Element,
    claimed_layer: &dyn Fn(&Element, &Element, &Element) -> Layer,
) {
    if claimed_layer(s, t, st) != s.layer().max(t.layer()) {
        report.violations.push(LawViolation {
            kind: LawViolationKind::Layering,
            elements: alloc::vec![s.clone(), t.clone(), st.clone()],
        });
    }
}

fn check_triple(
    report: &mut LawReport,
    sg: &Semigroup,
    s: &Element,
    t: &Element,
    u: &Element,
    st: Option<&Element>,
) -> Result<(), Error> {
    let st_u = match st {
        Some(st) => sg.combine(st, u)?,
        None => match sg.combine(s, t)? {
            Some(st) => sg.combine(&st, u)?,
            None => None,
        },
    };
    let tu = sg.combine(t, u)?;
    let s_tu = match &tu {
        Some(tu) => sg.combine(s, tu)?,
        None => None,
    };
    if let (Some(l), Some(r)) = (st_u, s_tu) {
        report.triples_checked += 1;
        if l != r {
            report.violations.push(LawViolation {
                kind: LawViolationKind::Associativity,
                elements: alloc::vec![s.clone(), t.clone(), u.clone()],
            });
        }
    }
    Ok(())
}

/// Outcome of an adequacy sweep.
#[derive(Debug, Clone)]
pub struct AdequacyReport {
    pub subsets_checked: u64,
    pub witnessed: u64,
    /// Subsets for which the pool offered no same-layer right extender.
    /// Nonempty means "pool too small", never "semigroup inadequate".
    pub inconclusive: Vec<Vec<Element>>,
}

impl AdequacyReport {
    pub fn conclusive(&self) -> bool {
        self.inconclusive.is_empty()
    }
}

/// First pool element of the subset's layer combinable with every member.
pub fn adequacy_witness(sg: &Semigroup, subset: &[Element], pool: &[Element]) -> Option<Element> {
    let layer = subset.first().map(Element::layer)?;
    'pool: for t in pool {
        if t.layer() != layer {
            continue;
        }
        for s in subset {
            match sg.combine(s, t) {
                Ok(Some(_)) => {}
                _ => continue 'pool,
            }
        }
        return Some(t.clone());
    }
    None
}

/// For every same-layer subset of `frag` with at most `subset_max` elements,
/// search `witness_pool` for a right extender of the same layer.
pub fn check_adequacy(
    sg: &Semigroup,
    frag: &FragmentSpec,
    witness_pool: &FragmentSpec,
    subset_max: u32,
    limits: &Limits,
) -> Result<AdequacyReport, Error> {
    let elems = enumerate_fragment_upto(sg, frag, limits)?;
    let pool = enumerate_fragment_upto(sg, witness_pool, limits)?;

    let mut by_layer: alloc::collections::BTreeMap<Layer, Vec<&Element>> = Default::default();
    for e in &elems {
        by_layer.entry(e.layer()).or_default().push(e);
    }

    let mut report = AdequacyReport {
        subsets_checked: 0,
        witnessed: 0,
        inconclusive: Vec::new(),
    };

    for group in by_layer.values() {
        let mut subset_count = 0u128;
        for size in 1..=subset_max.min(group.len() as u32) {
            subset_count += binomial(group.len() as u128, size as u128);
        }
        if report.subsets_checked as u128 + subset_count > limits.max_terms as u128 {
            return Err(Error::FragmentTooLarge {
                needed: subset_count,
                cap: limits.max_terms as u128,
            });
        }
        let mut subset: Vec<&Element> = Vec::new();
        enumerate_subsets(group, subset_max as usize, 0, &mut subset, &mut |subset| {
            report.subsets_checked += 1;
            let owned: Vec<Element> = subset.iter().map(|e| (*e).clone()).collect();
            if adequacy_witness(sg, &owned, &pool).is_some() {
                report.witnessed += 1;
            } else if report.inconclusive.len() < 64 {
                report.inconclusive.push(owned);
            }
        });
    }
    Ok(report)
}

fn enumerate_subsets<'a>(
    group: &[&'a Element],
    max_size: usize,
    start: usize,
    subset: &mut Vec<&'a Element>,
    visit: &mut impl FnMut(&[&'a Element]),
) {
    if !subset.is_empty() {
        visit(subset);
    }
    if subset.len() == max_size {
        return;
    }
    for i in start..group.len() {
        subset.push(group[i]);
        enumerate_subsets(group, max_size, i + 1, subset, visit);
        subset.pop();
    }
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut out = 1u128;
    for i in 0..k {
        out = out.saturating_mul(n - i) / (i + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::SemigroupKind;

    #[test]
    fn fin_fragment_passes() {
        let sg = Semigroup::new(SemigroupKind::Fin, None, false).unwrap();
        let report =
            check_layering_law(&sg, &FragmentSpec::new(2, 4), &Limits::default()).unwrap();
        assert!(report.passed());
        assert!(report.defined_pairs > 0);
        assert!(report.triples_checked > 0);
    }

    #[test]
    fn w_fragment_passes() {
        let sg = Semigroup::new(SemigroupKind::W, Some(&['a']), false).unwrap();
        let report =
            check_layering_law(&sg, &FragmentSpec::new(1, 3), &Limits::default()).unwrap();
        assert!(report.passed());
        // Total semigroup: every pair is defined.
        assert_eq!(report.defined_pairs, report.pairs_checked);
    }

    #[test]
    fn broken_layering_descriptor_is_caught() {
        let sg = Semigroup::new(SemigroupKind::Fin, None, false).unwrap();
        let elems =
            enumerate_fragment_upto(&sg, &FragmentSpec::new(2, 2), &Limits::default()).unwrap();
        // A descriptor claiming l(s + t) = l(s).
        let report =
            check_layering_law_elems(&sg, &elems, &Limits::default(), &|s, _, _| s.layer())
                .unwrap();
        assert!(!report.passed());
        assert!(report
            .violations
            .iter()
            .all(|v| v.kind == LawViolationKind::Layering));
    }

    #[test]
    fn fin_adequacy_witnessed_beyond_fragment() {
        let sg = Semigroup::new(SemigroupKind::Fin, None, false).unwrap();
        let report = check_adequacy(
            &sg,
            &FragmentSpec::new(2, 3),
            &FragmentSpec::new(2, 4),
            2,
            &Limits::default(),
        )
        .unwrap();
        assert!(report.conclusive());
        assert_eq!(report.witnessed, report.subsets_checked);

        // A subset whose supports cover [0,3] forces the witness {4:layer}.
        let pool =
            enumerate_fragment_upto(&sg, &FragmentSpec::new(2, 4), &Limits::default()).unwrap();
        let subset: Vec<Element> = (0..=3)
            .map(|p| sg.parse_element(&alloc::format!("FIN {{{p}:1}}")).unwrap())
            .collect();
        assert_eq!(
            adequacy_witness(&sg, &subset, &pool).unwrap().encode(),
            "FIN {4:1}"
        );
    }

    #[test]
    fn located_adequacy_witnessed_beyond_fragment() {
        let sg = Semigroup::new(SemigroupKind::L, Some(&['a']), false).unwrap();
        let pool =
            enumerate_fragment_upto(&sg, &FragmentSpec::new(1, 4), &Limits::default()).unwrap();
        let subset: Vec<Element> = [
            "L {0:x1,1:a}",
            "L {2:x1,3:a}",
        ]
        .iter()
        .map(|t| sg.parse_element(t).unwrap())
        .collect();
        let witness = adequacy_witness(&sg, &subset, &pool).unwrap();
        assert!(witness.support_range().unwrap().0 >= 4);
        assert_eq!(witness.layer(), 1);
    }

    #[test]
    fn restricted_pool_is_inconclusive() {
        let sg = Semigroup::new(SemigroupKind::Fin, None, false).unwrap();
        let report = check_adequacy(
            &sg,
            &FragmentSpec::new(1, 3),
            &FragmentSpec::new(1, 3),
            1,
            &Limits::default(),
        )
        .unwrap();
        // The singleton {FIN {0:1,1:1,2:1,3:1}} covers the whole pool range.
        assert!(!report.conclusive());
        assert!(report
            .inconclusive
            .iter()
            .any(|s| s.len() == 1 && s[0].encode() == "FIN {0:1,1:1,2:1,3:1}"));
    }

    #[test]
    fn w_total_semigroup_is_adequate_on_fragments() {
        let sg = Semigroup::new(SemigroupKind::W, Some(&['a']), false).unwrap();
        let report = check_adequacy(
            &sg,
            &FragmentSpec::new(1, 2),
            &FragmentSpec::new(1, 2),
            2,
            &Limits::default(),
        )
        .unwrap();
        assert!(report.conclusive());
    }
}
