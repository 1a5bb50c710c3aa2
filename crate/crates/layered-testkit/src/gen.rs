//! Seeded generators for elements, block sequences, families, colourings,
//! statements and witnessed search cases.
//!
//! Block sequences are built constructively on disjoint position chunks, so
//! every generated sequence combines canonically (the parameter-word kind is
//! total and needs no such care). All randomness flows through a caller-held
//! [`ChaCha8Rng`], so a seed reproduces a run exactly.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use layered_core::cert::Certificate;
use layered_core::color::{Coloring, Point};
use layered_core::maps::MapFamily;
use layered_core::search::{find_witness, SearchOutcome};
use layered_core::statement::{FamilyVariant, Statement, StatementKind};
use layered_core::zoo::Limits;
use layered_core::{Element, Semigroup, SemigroupKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const ALPHABET: [char; 2] = ['a', 'b'];

pub fn semigroup(kind: SemigroupKind) -> Semigroup {
    let alphabet = kind.has_alphabet().then_some(&ALPHABET[..]);
    Semigroup::new(kind, alphabet, false).expect("fixed test configuration is valid")
}

pub fn all_kinds() -> [SemigroupKind; 5] {
    [
        SemigroupKind::Fin,
        SemigroupKind::FinSets,
        SemigroupKind::W,
        SemigroupKind::L,
        SemigroupKind::FinA,
    ]
}

/// A length-`len` block sequence whose entries have layers within
/// `1..=max_layer` (`0` for the set kind, `0..=max_layer` where layer 0 is
/// canonical). Entry `i` occupies the position chunk `[3i, 3i+3)`.
pub fn random_block_sequence(
    rng: &mut ChaCha8Rng,
    sg: &Semigroup,
    len: usize,
    max_layer: u32,
) -> Vec<Element> {
    (0..len)
        .map(|i| random_chunk_element(rng, sg, 3 * i as u32, 3, max_layer))
        .collect()
}

/// One element whose support lies inside `[base, base + width)`.
pub fn random_chunk_element(
    rng: &mut ChaCha8Rng,
    sg: &Semigroup,
    base: u32,
    width: u32,
    max_layer: u32,
) -> Element {
    let size = rng.gen_range(1..=width);
    let mut positions: Vec<u32> = (base..base + width).collect();
    positions.shuffle(rng);
    positions.truncate(size as usize);
    positions.sort_unstable();
    let text = match sg.kind() {
        SemigroupKind::Fin => {
            let items: Vec<String> = positions
                .iter()
                .map(|p| format!("{p}:{}", rng.gen_range(1..=max_layer.max(1))))
                .collect();
            format!("FIN {{{}}}", items.join(","))
        }
        SemigroupKind::FinSets => {
            let items: Vec<String> = positions.iter().map(u32::to_string).collect();
            format!("FINSETS {{{}}}", items.join(","))
        }
        SemigroupKind::W => {
            let tokens = random_word_tokens(rng, size, max_layer);
            format!("W |{}|", tokens.join(" "))
        }
        SemigroupKind::L => {
            let tokens = random_word_tokens(rng, size, max_layer);
            let items: Vec<String> = positions
                .iter()
                .zip(&tokens)
                .map(|(p, t)| format!("{p}:{t}"))
                .collect();
            format!("L {{{}}}", items.join(","))
        }
        SemigroupKind::FinA => {
            // x0-padding up to the chunk, then occupied slots; keep the final
            // token non-x0 so the sequence is canonical.
            let last = *positions.last().expect("size >= 1");
            let mut tokens = vec!["x0".to_string(); last as usize + 1];
            for &p in &positions {
                tokens[p as usize] = if max_layer == 0 || rng.gen_bool(0.3) {
                    String::from(*ALPHABET.choose(rng).expect("nonempty"))
                } else {
                    format!("x{}", rng.gen_range(1..=max_layer))
                };
            }
            if tokens[last as usize] == "x0" {
                tokens[last as usize] = "x1".to_string();
            }
            format!("FINA |{}|", tokens.join(" "))
        }
    };
    sg.parse_element(&text).expect("constructed element is canonical")
}

/// `len` word tokens with gap-free increasing variables up to `max_layer`.
fn random_word_tokens(rng: &mut ChaCha8Rng, len: u32, max_layer: u32) -> Vec<String> {
    let mut next_var = 1u32;
    (0..len)
        .map(|_| {
            if next_var <= max_layer && rng.gen_bool(0.5) {
                let v = next_var;
                next_var += 1;
                format!("x{v}")
            } else {
                String::from(*ALPHABET.choose(rng).expect("nonempty"))
            }
        })
        .collect()
}

/// A regressive family valid for the kind (identity is always included).
pub fn random_family(rng: &mut ChaCha8Rng, kind: SemigroupKind) -> MapFamily {
    match kind {
        SemigroupKind::Fin => match rng.gen_range(0..3) {
            0 => MapFamily::identity_only(),
            1 => MapFamily::all_tetris(rng.gen_range(1..=2)),
            _ => MapFamily::iterated_tetris(2),
        },
        SemigroupKind::FinSets => MapFamily::identity_only(),
        SemigroupKind::W | SemigroupKind::L => {
            if rng.gen_bool(0.5) {
                MapFamily::identity_only()
            } else {
                MapFamily::letter_word_substitutions(&ALPHABET, 1)
            }
        }
        SemigroupKind::FinA => {
            if rng.gen_bool(0.5) {
                MapFamily::identity_only()
            } else {
                MapFamily::strong_prefixes(&ALPHABET, 2)
            }
        }
    }
}

/// A uniformly random total r-colouring of the given points.
pub fn random_coloring(rng: &mut ChaCha8Rng, r: u32, domain: &[Point]) -> Coloring {
    let pairs = domain
        .iter()
        .map(|p| (p.clone(), rng.gen_range(0..r)))
        .collect();
    Coloring::new(r, pairs).expect("generated colouring is total and in range")
}

/// A random statement with a fragment small enough for exhaustive search.
pub fn random_statement(rng: &mut ChaCha8Rng) -> Statement {
    let ab = ALPHABET.to_vec();
    let (kind, n) = match rng.gen_range(0..8) {
        0 => {
            let n = rng.gen_range(1..=2);
            let k_set = if n == 2 && rng.gen_bool(0.5) {
                vec![1, 2]
            } else {
                vec![1]
            };
            (
                StatementKind::Gowers {
                    n,
                    k_set,
                    family: FamilyVariant::Iterated,
                    block_len: 2,
                    ordered: false,
                },
                rng.gen_range(2..=3),
            )
        }
        1 => (
            StatementKind::HalesJewett { alphabet: ab },
            rng.gen_range(1..=2),
        ),
        2 => {
            let (k, m) = *[(0, 1), (1, 1), (1, 2)].choose(rng).expect("nonempty");
            (
                StatementKind::GrahamRothschild { alphabet: ab, k, m },
                rng.gen_range(m.max(1)..=2),
            )
        }
        3 => (
            StatementKind::VanDerWaerden {
                k: rng.gen_range(2..=3),
            },
            rng.gen_range(3..=6),
        ),
        4 => (
            StatementKind::FiniteUnions {
                m: rng.gen_range(1..=2),
            },
            rng.gen_range(2..=3),
        ),
        5 => (
            StatementKind::GalvinGlazer {
                m: rng.gen_range(1..=2),
            },
            rng.gen_range(2..=3),
        ),
        6 => (
            StatementKind::LocatedBbh {
                alphabet: ab,
                n: 1,
                block_len: rng.gen_range(1..=2),
                ordered: false,
            },
            rng.gen_range(2..=3),
        ),
        _ => {
            let m = rng.gen_range(1..=2);
            (
                StatementKind::TupleSpan {
                    m,
                    n: 1,
                    k: 1,
                    block_len: m,
                },
                rng.gen_range(3..=4),
            )
        }
    };
    Statement::new(kind, n).expect("generated statement parameters are valid")
}

/// A statement, a colouring of its domain, and a verified witness
/// certificate for that colouring. Random two-colourings are tried first;
/// the single-colour fallback always has a witness on these fragments.
pub fn random_witness_case(
    rng: &mut ChaCha8Rng,
    limits: &Limits,
) -> (Statement, Coloring, Certificate) {
    loop {
        let st = random_statement(rng);
        let realization = st.realize(limits).expect("generated statement realizes");
        let domain = realization.domain().to_vec();
        for attempt in 0..6 {
            let r = if attempt < 5 { 2 } else { 1 };
            let col = random_coloring(rng, r, &domain);
            let outcome = find_witness(&st, &col, limits).expect("search stays within limits");
            if let SearchOutcome::Witness(cert) = outcome {
                return (st, col, cert);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::naive;
    use layered_core::cert::{verify_certificate, VerifyOutcome};

    #[test]
    fn generated_sequences_are_block_sequences() {
        let mut rng = rng(7);
        for kind in all_kinds() {
            let sg = semigroup(kind);
            for _ in 0..20 {
                let xs = random_block_sequence(&mut rng, &sg, 3, 2);
                let family = random_family(&mut rng, kind);
                assert!(
                    naive::is_block_sequence(&sg, &xs, &family.members, 3),
                    "{kind:?} sequence failed: {:?}",
                    xs.iter().map(Element::encode).collect::<Vec<_>>()
                );
            }
        }
    }

    #[test]
    fn witness_cases_verify() {
        let limits = Limits::default();
        let mut rng = rng(11);
        for _ in 0..10 {
            let (st, col, cert) = random_witness_case(&mut rng, &limits);
            assert_eq!(cert.statement, st);
            let outcome = verify_certificate(&cert.render(), &col, &limits);
            assert!(matches!(outcome, VerifyOutcome::Valid), "{}", cert.render());
        }
    }

    #[test]
    fn statements_realize_within_limits() {
        let limits = Limits::default();
        let mut rng = rng(13);
        for _ in 0..40 {
            let st = random_statement(&mut rng);
            let realization = st.realize(&limits).expect("realizes");
            assert!(!realization.domain().is_empty(), "{}", st.encode());
        }
    }
}
