//! End-to-end acceptance suite: ten numbered criteria covering algebraic
//! laws, map regressiveness, span/oracle agreement, the three small Ramsey
//! bounds, certificate round-trips, the tuple-span reduction, the
//! completeness surrogate, and CLI determinism. Each test prints one
//! `criterion N: PASS (...)` line; a failed assertion is the FAIL line.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use layered_core::cert::verify_certificate;
use layered_core::color::{Coloring, Point};
use layered_core::laws::check_layering_law;
use layered_core::maps::{
    apply, verify_regressive, MapDescriptor, MapFamily, RegressiveViolationKind,
};
use layered_core::search::{
    compute_bound, check_complete, find_witness, vdw_via_hj, BoundOptions, BoundOutcome,
    FinaSubsemigroup, SearchOutcome,
};
use layered_core::span::{enumerate_span, enumerate_tuple_span};
use layered_core::statement::Statement;
use layered_core::zoo::{enumerate_fragment_upto, FragmentSpec, Limits};
use layered_core::{Payload, Semigroup, SemigroupKind};

use layered_testkit::{gen, mutate, naive};

fn limits() -> Limits {
    Limits::default()
}

fn fin() -> Semigroup {
    Semigroup::new(SemigroupKind::Fin, None, false).unwrap()
}

fn w_ab() -> Semigroup {
    Semigroup::new(SemigroupKind::W, Some(&['a', 'b']), false).unwrap()
}

fn l_ab() -> Semigroup {
    Semigroup::new(SemigroupKind::L, Some(&['a', 'b']), false).unwrap()
}

fn fina(alphabet: &[char]) -> Semigroup {
    Semigroup::new(SemigroupKind::FinA, Some(alphabet), false).unwrap()
}

/// Criterion 1 — layering law and associativity, exhaustively, on four
/// fragments: FIN (support in [0,5], values <= 3), W over {a,b} (length
/// <= 4, layers <= 2), L over {a,b} (domain in [0,4], layers <= 2), and
/// FIN^{a} (length <= 4, hence layers <= 4). Zero violations, under 10 s.
#[test]
fn criterion_01_layering_and_associativity() {
    let t0 = Instant::now();
    let lim = limits();
    let cases: Vec<(&str, Semigroup, FragmentSpec)> = vec![
        ("FIN", fin(), FragmentSpec::new(3, 5)),
        ("W", w_ab(), FragmentSpec::new(2, 4)),
        ("L", l_ab(), FragmentSpec::new(2, 4)),
        ("FINA", fina(&['a']), FragmentSpec::new(4, 4)),
    ];
    let mut elements = 0u64;
    let mut defined_pairs = 0u64;
    let mut triples = 0u64;
    for (name, sg, frag) in &cases {
        let report = check_layering_law(sg, frag, &lim).unwrap();
        assert!(
            report.passed(),
            "{name}: {} law violations, first: {:?}",
            report.violations.len(),
            report.violations.first()
        );
        assert!(report.defined_pairs > 0, "{name}: no defined pairs swept");
        assert!(report.triples_checked > 0, "{name}: no triples swept");
        elements += report.elements;
        defined_pairs += report.defined_pairs;
        triples += report.triples_checked;
    }
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(10), "took {dt:?}, budget 10s");
    println!(
        "criterion 1: PASS ({elements} elements, {defined_pairs} defined pairs, \
         {triples} associativity triples, 0 violations, {dt:?})"
    );
}

/// Criterion 2 — regressiveness: every canonical tetris table on [0,3],
/// every substitution prefix of length <= 4 over {a,b}, and every strong-map
/// prefix of length <= 4 over {a,b} passes conditions (i)-(iv); a planted
/// non-monotone table fails condition (iii) with a checked witness pair.
/// Under 30 s.
#[test]
fn criterion_02_regressive_map_families() {
    let t0 = Instant::now();
    let lim = limits();

    // Generalised tetris tables on [0,3]: exactly 8 canonical tables.
    let fin = fin();
    let tetris = MapFamily::all_tetris(3);
    assert_eq!(tetris.members.len(), 8, "canonical tables on [0,3]");
    for m in &tetris.members {
        let report = verify_regressive(m, &fin, &FragmentSpec::new(3, 3), &lim).unwrap();
        assert!(report.passed(), "{}: {:?}", m.encode(), report.violations.first());
    }

    // Substitution prefixes of length <= 4 over {a,b}: every parameter-word
    // prefix (letters and gap-free variables), plus the empty prefix.
    let w = w_ab();
    let mut prefixes = vec![MapDescriptor::subst(&[]).unwrap()];
    for word in enumerate_fragment_upto(&w, &FragmentSpec::new(4, 4), &lim).unwrap() {
        let Payload::Word(tokens) = word.payload() else {
            unreachable!("W fragment yields words");
        };
        prefixes.push(MapDescriptor::subst(tokens).unwrap());
    }
    prefixes.sort_by_cached_key(MapDescriptor::encode);
    prefixes.dedup();
    let w_frag = FragmentSpec::new(2, 3);
    for m in &prefixes {
        let report = verify_regressive(m, &w, &w_frag, &lim).unwrap();
        assert!(report.passed(), "{}: {:?}", m.encode(), report.violations.first());
    }

    // Strong-map prefixes of length <= 4 over {a,b}.
    let fina = fina(&['a', 'b']);
    let strong = MapFamily::strong_prefixes(&['a', 'b'], 4);
    assert!(strong.members.len() > 1);
    for m in &strong.members {
        let report = verify_regressive(m, &fina, &FragmentSpec::new(2, 3), &lim).unwrap();
        assert!(report.passed(), "{}: {:?}", m.encode(), report.violations.first());
    }

    // Planted non-monotone control: the table 0,1,0 keeps every layer bound
    // (F(v) <= v) and is a homomorphism, but swaps the order of image
    // layers, so exactly condition (iii) must fail.
    let planted = MapDescriptor::tetris_unchecked(vec![0, 1, 0]);
    let report = verify_regressive(&planted, &fin, &FragmentSpec::new(2, 3), &lim).unwrap();
    assert!(!report.passed(), "planted map must fail");
    assert!(
        report
            .violations
            .iter()
            .all(|v| v.kind == RegressiveViolationKind::Monotone),
        "planted map should fail condition (iii) only: {:?}",
        report.violations.iter().map(|v| v.kind).collect::<Vec<_>>()
    );
    let witness = report
        .violations
        .iter()
        .find(|v| v.kind == RegressiveViolationKind::Monotone)
        .expect("a monotonicity violation");
    assert_eq!(witness.elements.len(), 2, "witness is a pair");
    let (s, t) = (&witness.elements[0], &witness.elements[1]);
    let fs = apply(&planted, &fin, s).unwrap();
    let ft = apply(&planted, &fin, t).unwrap();
    assert!(s.layer() <= t.layer(), "witness pair is layer-ordered");
    assert!(
        fs.layer() > ft.layer(),
        "witness pair demonstrates the image-layer swap"
    );

    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(30), "took {dt:?}, budget 30s");
    println!(
        "criterion 2: PASS (8 tetris tables, {} substitution prefixes, {} strong prefixes \
         all regressive; planted 0,1,0 fails (iii) on {} ~ {}, {dt:?})",
        prefixes.len(),
        strong.members.len(),
        s.encode(),
        t.encode()
    );
}

/// Criterion 3 — the span engine agrees with the naive recursive oracle on
/// 100 random block sequences per semigroup kind, every target layer 0..=3,
/// max_len <= 4, with zero discrepancies.
#[test]
fn criterion_03_span_engine_matches_oracle() {
    let lim = limits();
    let mut rng = gen::rng(0xACC3);
    let mut sequences = 0u32;
    let mut comparisons = 0u32;
    for kind in gen::all_kinds() {
        let sg = gen::semigroup(kind);
        for case in 0..100u32 {
            let len = 3 + (case % 2) as usize;
            let xs = gen::random_block_sequence(&mut rng, &sg, len, 2);
            let fam = gen::random_family(&mut rng, kind);
            let max_len = (xs.len() as u32).min(4);
            for layer in 0..=3u32 {
                let fast: Vec<String> = enumerate_span(&sg, &xs, &fam, layer, max_len, &lim)
                    .unwrap()
                    .iter()
                    .map(|t| t.value.encode())
                    .collect();
                let slow = naive::span_values(&sg, &xs, &fam.members, layer, max_len);
                assert_eq!(
                    fast, slow,
                    "{} case {case} layer {layer}: engine/oracle disagree",
                    kind.name()
                );
                comparisons += 1;
            }
            sequences += 1;
        }
    }
    println!(
        "criterion 3: PASS ({sequences} block sequences, {comparisons} layer spans, \
         0 discrepancies)"
    );
}

/// Criterion 4 — minimal van der Waerden fragment: the 3-term 2-colour
/// bound is N=9, the failing colouring of [1,8] is independently re-checked,
/// and the direct AP search and the combinatorial-line reduction agree on
/// every colouring tried. Under 5 s.
#[test]
fn criterion_04_van_der_waerden_bound() {
    let t0 = Instant::now();
    let lim = limits();
    let st = Statement::parse("statement vdw k=3 N=1").unwrap();
    let outcome = compute_bound(&st, 2, 12, &BoundOptions::default(), &lim).unwrap();
    let BoundOutcome::Found(res) = outcome else {
        panic!("bound search must conclude by N=12");
    };
    assert_eq!(res.n, 9, "3-term 2-colour minimal fragment");

    // The returned colouring of [1,8] has no monochromatic 3-term AP,
    // checked by the production search and by the naive oracle.
    let bad = res.bad_coloring.clone().expect("failing colouring at N=8");
    assert_eq!(bad.len(), 8);
    let at8 = st.with_n(8);
    assert!(!naive::has_witness(&at8, &bad, &lim), "oracle re-check");
    let SearchOutcome::Exhausted(report) = find_witness(&at8, &bad, &lim).unwrap() else {
        panic!("bad colouring admits no witness");
    };
    assert!(report.candidates_checked > 0);

    // Direct search vs reduction through combinatorial lines: both paths
    // must agree on AP existence, and every returned AP must be
    // monochromatic point by point.
    let mut colorings: Vec<Coloring> = Vec::new();
    let shifted: Vec<(Point, u32)> = bad
        .entries()
        .iter()
        .enumerate()
        .map(|(i, (_, c))| (Point::Int(i as u64), *c))
        .collect();
    colorings.push(Coloring::new(2, shifted).unwrap());
    colorings.push(
        Coloring::new(
            2,
            (0..27).map(|i| (Point::Int(i), (i % 2) as u32)).collect(),
        )
        .unwrap(),
    );
    let mut rng = gen::rng(0xACC4);
    let domain16: Vec<Point> = (0..16).map(Point::Int).collect();
    let domain12: Vec<Point> = (0..12).map(Point::Int).collect();
    for _ in 0..6 {
        colorings.push(gen::random_coloring(&mut rng, 2, &domain16));
        colorings.push(gen::random_coloring(&mut rng, 3, &domain12));
    }
    let mut agreements = 0u32;
    let mut aps_checked = 0u32;
    for col in &colorings {
        let colors: Vec<u32> = col.entries().iter().map(|(_, c)| *c).collect();
        let direct = naive::mono_ap(&colors, 3, 0);
        let via_lines = vdw_via_hj(3, col, &lim).unwrap();
        assert_eq!(
            direct.is_some(),
            via_lines.is_some(),
            "existence disagreement on {} points",
            colors.len()
        );
        if let Some((a, d)) = direct {
            let c0 = colors[a as usize];
            for j in 0..3u64 {
                assert_eq!(colors[(a + j * d) as usize], c0, "direct AP not mono");
            }
            aps_checked += 1;
        }
        if let Some(wit) = via_lines {
            assert_eq!(wit.points.len(), 3);
            assert_eq!(wit.points[1] - wit.points[0], wit.d);
            assert_eq!(wit.points[2] - wit.points[1], wit.d);
            let c0 = colors[wit.points[0] as usize];
            for p in &wit.points {
                assert_eq!(colors[*p as usize], c0, "reduced AP not mono");
            }
            assert_eq!(wit.color, c0);
            aps_checked += 1;
        }
        agreements += 1;
    }

    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(5), "took {dt:?}, budget 5s");
    println!(
        "criterion 4: PASS (N=9, bad colouring of [1,8] exhausts \
         {} candidates, {agreements} colourings agree on both paths, \
         {aps_checked} APs re-checked, {dt:?})",
        report.candidates_checked
    );
}

/// Criterion 5 — minimal combinatorial-line fragment over a two-letter
/// alphabet: N=2, with a failing colouring at N=1. Under 1 s.
#[test]
fn criterion_05_hales_jewett_bound() {
    let t0 = Instant::now();
    let lim = limits();
    let st = Statement::parse("statement hj alphabet=ab N=1").unwrap();
    let outcome = compute_bound(&st, 2, 3, &BoundOptions::default(), &lim).unwrap();
    let BoundOutcome::Found(res) = outcome else {
        panic!("bound search must conclude by N=3");
    };
    assert_eq!(res.n, 2, "two-letter two-colour minimal word length");
    let bad = res.bad_coloring.clone().expect("failing colouring at N=1");
    assert_eq!(bad.len(), 2, "length-1 words: a and b");
    let SearchOutcome::Exhausted(_) = find_witness(&st.with_n(1), &bad, &lim).unwrap() else {
        panic!("bad colouring admits no witness at N=1");
    };
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(1), "took {dt:?}, budget 1s");
    println!(
        "criterion 5: PASS (N=2, bad colouring {} at N=1, {dt:?})",
        bad.canonical_text().replace('\n', " / ").trim_end_matches(" / ")
    );
}

/// Criterion 6 — minimal finite-unions fragment for two disjoint sets and
/// two colours: the exhaustive scan terminates at some N <= 6 and matches
/// the independent backtracking searcher exactly.
#[test]
fn criterion_06_finite_unions_bound() {
    let t0 = Instant::now();
    let lim = limits();
    let independent = naive::fu2_min_bound(2, 6);
    assert_eq!(independent, Some(5), "independent backtracking searcher");

    let st = Statement::parse("statement fu m=2 N=1").unwrap();
    let outcome = compute_bound(&st, 2, 6, &BoundOptions::default(), &lim).unwrap();
    let BoundOutcome::Found(res) = outcome else {
        panic!("bound search must conclude by N=6");
    };
    assert_eq!(Some(res.n), independent, "scan and searcher must agree");
    assert_eq!(res.classes_checked_at_n, 1u128 << 30, "exhaustive at N=5");

    // The failing colouring at N=4 really has no witness.
    let bad = res.bad_coloring.clone().expect("failing colouring at N=4");
    assert!(!naive::has_witness(&st.with_n(4), &bad, &lim));
    let SearchOutcome::Exhausted(_) = find_witness(&st.with_n(4), &bad, &lim).unwrap() else {
        panic!("bad colouring admits no witness at N=4");
    };
    let dt = t0.elapsed();
    println!(
        "criterion 6: PASS (N={} from both scan and searcher, 2^30 colouring \
         classes exhausted at N=5, bad colouring re-checked at N=4, {dt:?})",
        res.n
    );
}

/// Criterion 7 — certificates: 500 random (statement, colouring) witness
/// cases round-trip through the verifier; 500 single-field mutations are
/// rejected, each with the exact first-failure category the mutation plants.
#[test]
fn criterion_07_certificate_round_trip_and_mutation() {
    let lim = limits();
    let mut rng = gen::rng(0xACC7);
    let mut by_kind: BTreeMap<&'static str, u32> = BTreeMap::new();
    for case in 0..500u32 {
        let (st, col, cert) = gen::random_witness_case(&mut rng, &lim);
        let outcome = verify_certificate(&cert.render(), &col, &lim);
        assert!(
            outcome.ok(),
            "case {case} ({}): round-trip rejected: {:?}",
            st.encode(),
            outcome.failure()
        );

        let (mutated, expected) = mutate::mutate_certificate(&mut rng, &cert);
        let outcome = verify_certificate(&mutated, &col, &lim);
        let failure = outcome
            .failure()
            .unwrap_or_else(|| panic!("case {case}: mutation accepted ({})", expected.name()));
        assert_eq!(
            failure.kind,
            expected,
            "case {case} ({}): expected {}, got {} ({})",
            st.encode(),
            expected.name(),
            failure.kind.name(),
            failure.detail
        );
        *by_kind.entry(expected.name()).or_default() += 1;
    }
    assert!(
        by_kind.len() >= 6,
        "mutations must spread over categories: {by_kind:?}"
    );
    let spread: Vec<String> = by_kind.iter().map(|(k, n)| format!("{k}:{n}")).collect();
    println!(
        "criterion 7: PASS (500 certificates verified, 500 mutations rejected; {})",
        spread.join(" ")
    );
}

/// Criterion 8 — tuple spans with m=1 reduce to plain spans: exact value-set
/// equality on 100 random (sequence, family, layer) inputs across all kinds,
/// cross-checked against the naive tuple oracle.
#[test]
fn criterion_08_tuple_span_reduction() {
    let lim = limits();
    let mut rng = gen::rng(0xACC8);
    let mut inputs = 0u32;
    for kind in gen::all_kinds() {
        let sg = gen::semigroup(kind);
        for case in 0..20u32 {
            let len = 3 + (case % 2) as usize;
            let xs = gen::random_block_sequence(&mut rng, &sg, len, 2);
            let fam = gen::random_family(&mut rng, kind);
            let max_len = (xs.len() as u32).min(4);
            let layer = (case % 3) as u32;
            let tuples: BTreeSet<String> =
                enumerate_tuple_span(&sg, &xs, &fam, 1, layer, max_len, &lim)
                    .unwrap()
                    .iter()
                    .map(|t| {
                        assert_eq!(t.values.len(), 1, "m=1 tuples are singletons");
                        t.values[0].encode()
                    })
                    .collect();
            let spans: BTreeSet<String> = enumerate_span(&sg, &xs, &fam, layer, max_len, &lim)
                .unwrap()
                .iter()
                .map(|t| t.value.encode())
                .collect();
            assert_eq!(tuples, spans, "{} case {case} layer {layer}", kind.name());
            let oracle: BTreeSet<String> =
                naive::tuple_span_values(&sg, &xs, &fam.members, 1, layer, max_len)
                    .into_iter()
                    .collect();
            assert_eq!(tuples, oracle, "{} case {case} oracle", kind.name());
            inputs += 1;
        }
    }
    println!("criterion 8: PASS ({inputs} inputs, m=1 tuple span == span on all)");
}

/// Criterion 9 — completeness surrogate on fragments with max_layer 3: the
/// full token semigroup and its located-word subsemigroup pass; the planted
/// even-position-avoiding subsemigroup fails with a checked escape witness.
#[test]
fn criterion_09_completeness_surrogate() {
    let lim = limits();
    let sg = fina(&['a']);
    let frag = FragmentSpec::new(3, 4);

    let full = check_complete(FinaSubsemigroup::Full, &sg, &frag, &lim).unwrap();
    assert!(full.passed(), "full: {:?}", full.violations.first());
    assert!(full.alphas_checked > 0 && full.sums_checked > 0);

    let located = check_complete(FinaSubsemigroup::Located, &sg, &frag, &lim).unwrap();
    assert!(located.passed(), "located: {:?}", located.violations.first());
    assert!(located.alphas_checked > 0 && located.sums_checked > 0);

    let odd = check_complete(FinaSubsemigroup::OddSupport, &sg, &frag, &lim).unwrap();
    assert!(!odd.passed(), "planted subsemigroup must fail");
    let v = &odd.violations[0];
    assert!(FinaSubsemigroup::OddSupport.contains(&v.alpha), "alpha inside");
    assert!(!FinaSubsemigroup::OddSupport.contains(&v.sum), "sum escapes");
    assert!(v.k <= 3 && v.sum.layer() == v.k);

    println!(
        "criterion 9: PASS (full {}+{} and located {}+{} pass; odd-support fails at {} -> {})",
        full.alphas_checked,
        full.sums_checked,
        located.alphas_checked,
        located.sums_checked,
        v.alpha.encode(),
        v.sum.encode()
    );
}

// ---- criterion 10: CLI determinism across --jobs ----

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_layered"))
}

fn write_file(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

/// Criterion 10 — every CLI run in the acceptance set, executed twice with
/// `--jobs 1` and `--jobs 4`, produces byte-identical stdout, stderr, and
/// exit status.
#[test]
fn criterion_10_cli_determinism_across_jobs() {
    let lim = limits();
    let dir = tempfile::tempdir().unwrap();

    // Fixtures: a FIN block sequence, a map family, a finite-unions
    // colouring with a known witness, and a certificate for it.
    let xs_path = dir.path().join("xs.txt");
    write_file(&xs_path, "FIN {0:1,1:2}\nFIN {2:1}\nFIN {3:2,4:1}\n");
    let fam_path = dir.path().join("family.txt");
    write_file(&fam_path, "id\ntetris 0,0\n");

    let st = Statement::parse("statement fu m=2 N=3").unwrap();
    let domain = st.realize(&lim).unwrap().domain().to_vec();
    let pairs: Vec<(Point, u32)> = domain.into_iter().map(|p| (p, 0)).collect();
    let col = Coloring::new(1, pairs).unwrap();
    let col_path = dir.path().join("coloring.txt");
    write_file(&col_path, col.canonical_text());
    let SearchOutcome::Witness(cert) = find_witness(&st, &col, &lim).unwrap() else {
        panic!("constant colouring has a witness");
    };
    let cert_path = dir.path().join("certificate.txt");
    write_file(&cert_path, &cert.render());

    let xs = xs_path.to_str().unwrap();
    let fam = fam_path.to_str().unwrap();
    let coloring = col_path.to_str().unwrap();
    let certificate = cert_path.to_str().unwrap();

    let runs: Vec<Vec<&str>> = vec![
        vec!["zoo", "list"],
        vec!["zoo", "enum", "--kind", "FIN", "--max-layer", "2", "--size", "3"],
        vec!["zoo", "random", "--kind", "W", "--alphabet", "ab", "--len", "3", "--max-layer", "2", "--seed", "11"],
        vec!["eval", "--kind", "FIN", "--xs", xs, "--indices", "1,3", "--maps", "id ; tetris 0,0"],
        vec!["map", "apply", "--kind", "FIN", "--map", "tetris 0,0,1", "--element", "FIN {0:2,3:3}"],
        vec!["map", "verify", "--kind", "FIN", "--max-layer", "2", "--size", "3", "--map", "tetris 0,0"],
        vec!["map", "classes", "--kind", "FIN", "--max-layer", "2", "--size", "2", "--family", fam, "--layer", "1"],
        vec!["span", "check", "--kind", "FIN", "--xs", xs, "--family", fam, "--max-len", "3"],
        vec!["span", "enum", "--kind", "FIN", "--xs", xs, "--family", fam, "--layer", "1", "--max-len", "3"],
        vec!["span", "tuple", "--kind", "FIN", "--xs", xs, "--family", fam, "--m", "2", "--layer", "1", "--max-len", "3"],
        vec!["search", "--statement", "fu", "--m", "2", "--N", "3", "--coloring", coloring],
        vec!["verify", "--cert", certificate, "--coloring", coloring],
        vec!["bound", "--statement", "vdw", "--k", "3", "--colors", "2"],
        vec!["bound", "--statement", "hj", "--alphabet", "ab", "--colors", "2", "--n-max", "3"],
        vec!["bound", "--statement", "fu", "--m", "2", "--colors", "2", "--n-max", "4"],
    ];

    for args in &runs {
        let one = cli().args(args).args(["--jobs", "1"]).output().unwrap();
        let four = cli().args(args).args(["--jobs", "4"]).output().unwrap();
        assert_eq!(
            one.status.code(),
            four.status.code(),
            "exit codes differ for {args:?}"
        );
        assert_eq!(one.stdout, four.stdout, "stdout differs for {args:?}");
        assert_eq!(one.stderr, four.stderr, "stderr differs for {args:?}");
        assert!(!one.stdout.is_empty(), "no primary output for {args:?}");
    }
    println!(
        "criterion 10: PASS ({} CLI runs byte-identical between --jobs 1 and --jobs 4)",
        runs.len()
    );
}
