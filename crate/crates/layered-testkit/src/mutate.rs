//! Single-field certificate mutations with their expected rejection.
//!
//! Each mutation changes exactly one thing about a valid certificate and
//! states which failure category the verifier must report first. Classes
//! that do not apply to a given certificate (a colour bump needs two
//! colours, a wrong-layer move needs two sections) are filtered out before
//! choosing.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use layered_core::cert::{Certificate, VerifyFailureKind};
use layered_core::statement::StatementKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mutation {
    HeaderVersion,
    ColorsHeader,
    SectionLayerHeader,
    DigestFlip,
    DomainGrow,
    SequenceOutOfPool,
    SequenceDuplicate,
    MapAlien,
    ValueCorrupt,
    LineWrongSection,
    ColorBump,
    LineDrop,
}

impl Mutation {
    fn expected(self) -> VerifyFailureKind {
        match self {
            Mutation::HeaderVersion | Mutation::ColorsHeader | Mutation::SectionLayerHeader => {
                VerifyFailureKind::Malformed
            }
            Mutation::DigestFlip => VerifyFailureKind::DigestMismatch,
            Mutation::DomainGrow => VerifyFailureKind::ColoringNotTotal,
            Mutation::SequenceOutOfPool => VerifyFailureKind::SequenceInvalid,
            Mutation::SequenceDuplicate => VerifyFailureKind::NotBlockSequence,
            Mutation::MapAlien => VerifyFailureKind::MapNotInFamily,
            Mutation::ValueCorrupt => VerifyFailureKind::TermMismatch,
            Mutation::LineWrongSection => VerifyFailureKind::WrongLayer,
            Mutation::ColorBump => VerifyFailureKind::ColorMismatch,
            Mutation::LineDrop => VerifyFailureKind::Incomplete,
        }
    }
}

fn is_vdw(cert: &Certificate) -> bool {
    matches!(cert.statement.kind, StatementKind::VanDerWaerden { .. })
}

/// Duplicate pool entries stop being a block sequence only where sums are
/// partial; parameter words always concatenate.
fn pool_is_partial(cert: &Certificate) -> bool {
    matches!(
        cert.statement.kind,
        StatementKind::Gowers { .. }
            | StatementKind::FiniteUnions { .. }
            | StatementKind::GalvinGlazer { .. }
            | StatementKind::LocatedBbh { .. }
            | StatementKind::TupleSpan { .. }
    )
}

fn applicable(cert: &Certificate) -> Vec<Mutation> {
    let mut out = vec![
        Mutation::HeaderVersion,
        Mutation::ColorsHeader,
        Mutation::SectionLayerHeader,
        Mutation::DigestFlip,
        Mutation::DomainGrow,
        Mutation::SequenceOutOfPool,
        Mutation::ValueCorrupt,
        Mutation::LineDrop,
    ];
    if pool_is_partial(cert) && cert.sequence.len() >= 2 {
        out.push(Mutation::SequenceDuplicate);
    }
    if !is_vdw(cert) {
        out.push(Mutation::MapAlien);
    }
    if cert.sections.len() >= 2 {
        out.push(Mutation::LineWrongSection);
    }
    if cert.r >= 2 {
        out.push(Mutation::ColorBump);
    }
    out
}

/// Apply one applicable single-field mutation and return the mutated text
/// together with the failure category its verification must report.
pub fn mutate_certificate(
    rng: &mut ChaCha8Rng,
    cert: &Certificate,
) -> (String, VerifyFailureKind) {
    let choices = applicable(cert);
    let m = *choices.choose(rng).expect("some mutation always applies");
    (apply(rng, cert, m), m.expected())
}

fn apply(rng: &mut ChaCha8Rng, cert: &Certificate, m: Mutation) -> String {
    let mut c = cert.clone();
    match m {
        Mutation::HeaderVersion => {
            return cert.render().replacen("CERTIFICATE v1", "CERTIFICATE v9", 1);
        }
        Mutation::ColorsHeader => c.r += 1,
        Mutation::SectionLayerHeader => c.sections[0].layer += 17,
        Mutation::DigestFlip => {
            let i = "sha256:".len();
            let flipped = if c.digest.as_bytes()[i] == b'0' { "1" } else { "0" };
            c.digest.replace_range(i..i + 1, flipped);
        }
        Mutation::DomainGrow => c.statement = c.statement.with_n(c.statement.n + 1),
        Mutation::SequenceOutOfPool => {
            c.sequence[0] = match &cert.statement.kind {
                StatementKind::VanDerWaerden { .. } => "0".into(),
                StatementKind::Gowers { .. } | StatementKind::TupleSpan { .. } => {
                    "FIN {99:1}".into()
                }
                StatementKind::FiniteUnions { .. } | StatementKind::GalvinGlazer { .. } => {
                    "FINSETS {99}".into()
                }
                StatementKind::HalesJewett { .. } | StatementKind::GrahamRothschild { .. } => {
                    "W |a a a a a a a a|".into()
                }
                StatementKind::LocatedBbh { .. } => "L {99:a}".into(),
            };
        }
        Mutation::SequenceDuplicate => c.sequence[1] = c.sequence[0].clone(),
        Mutation::MapAlien => {
            let alien = match &cert.statement.kind {
                StatementKind::Gowers { .. } | StatementKind::TupleSpan { .. } => "subst a|tail",
                _ => "tetris 0,0",
            };
            let s = rng.gen_range(0..c.sections.len());
            c.sections[s].lines[0].maps[0] = alien.into();
        }
        Mutation::ValueCorrupt => {
            let s = rng.gen_range(0..c.sections.len());
            let lines = &mut c.sections[s].lines;
            if is_vdw(cert) {
                lines[0].value = "0".into();
            } else if lines.len() >= 2 {
                let swapped = lines[1].value.clone();
                lines[1].value = lines[0].value.clone();
                lines[0].value = swapped;
            } else {
                lines[0].value.push('z');
            }
        }
        Mutation::LineWrongSection => {
            let line = c.sections[0].lines[0].clone();
            c.sections[1].lines.push(line);
        }
        Mutation::ColorBump => {
            let s = rng.gen_range(0..c.sections.len());
            c.sections[s].color = (c.sections[s].color + 1) % c.r;
        }
        Mutation::LineDrop => {
            let s = rng.gen_range(0..c.sections.len());
            c.sections[s].lines.pop();
        }
    }
    c.render()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use layered_core::cert::{verify_certificate, VerifyOutcome};
    use layered_core::zoo::Limits;

    #[test]
    fn mutations_fail_with_the_stated_category() {
        let limits = Limits::default();
        let mut rng = gen::rng(23);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..60 {
            let (_st, col, cert) = gen::random_witness_case(&mut rng, &limits);
            let (text, expected) = mutate_certificate(&mut rng, &cert);
            let outcome = verify_certificate(&text, &col, &limits);
            match outcome {
                VerifyOutcome::Invalid(f) => {
                    assert_eq!(
                        f.kind, expected,
                        "expected {} got {} ({}) for:\n{text}",
                        expected.name(),
                        f.kind.name(),
                        f.detail
                    );
                    seen.insert(expected.name());
                }
                VerifyOutcome::Valid => panic!("mutation survived verification:\n{text}"),
            }
        }
        assert!(seen.len() >= 6, "only hit {seen:?}");
    }
}
