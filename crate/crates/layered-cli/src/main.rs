//! `layered` — command-line front end for the layered semigroup toolkit.
//!
//! Exit codes: 0 success (witness found, certificate valid, data printed);
//! 1 negative verification result (invalid certificate, failed map check,
//! non-block sequence, exhausted witness search); 2 usage or input-file
//! errors (parse diagnostics name the 1-based line); 3 search budget
//! exceeded (a resumable checkpoint is emitted).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use layered_core::cert::{Certificate, VerifyOutcome};
use layered_core::color::Coloring;
use layered_core::maps::{apply, local_restrictions, verify_regressive, MapDescriptor};
use layered_core::search::{compute_bound_with, find_witness, scan_level, BoundOptions, BoundOutcome, SearchOutcome};
use layered_core::span::{enumerate_span, enumerate_span_full, enumerate_tuple_span, evaluate_term, is_block_sequence};
use layered_core::zoo::{enumerate_fragment, enumerate_fragment_upto, fragment_count, Limits};
use layered_core::{Element, Error, Semigroup, SemigroupKind};

use layered_cli::args::{self, FragArgs, SgArgs, StatementArgs};
use layered_cli::emit::{term_text, Format, Out};
use layered_cli::{parallel, Failure};

#[derive(Parser)]
#[command(name = "layered", version, about = "Layered semigroups, spans, and finite Ramsey searches")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Worker threads for bound scans; results are identical for any value.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for randomised test-data generation (zoo random) only.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// List semigroup kinds or enumerate fragment elements.
    Zoo {
        #[command(subcommand)]
        cmd: ZooCmd,
    },
    /// Evaluate one combination term against a sequence file.
    Eval {
        #[command(flatten)]
        sg: SgArgs,
        /// Element-per-line sequence file.
        #[arg(long)]
        xs: PathBuf,
        /// 1-based term indices, e.g. `1,3`.
        #[arg(long)]
        indices: String,
        /// One map per index, e.g. `id ; tetris 0,0`.
        #[arg(long)]
        maps: String,
    },
    /// Apply, verify, or classify regressive maps.
    Map {
        #[command(subcommand)]
        cmd: MapCmd,
    },
    /// Check block sequences and enumerate combination spans.
    Span {
        #[command(subcommand)]
        cmd: SpanCmd,
    },
    /// Search one colouring for a monochromatic-span witness.
    Search {
        #[command(flatten)]
        st: StatementArgs,
        /// Colouring file: `colors r` header, then point<TAB>color lines.
        #[arg(long)]
        coloring: PathBuf,
        /// Also write the witness certificate to this file.
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Minimal fragment size N whose every r-colouring has a witness.
    Bound {
        #[command(flatten)]
        st: StatementArgs,
        /// Number of colours.
        #[arg(long)]
        colors: u32,
        /// Largest fragment size to try.
        #[arg(long, default_value_t = 12)]
        n_max: u32,
        /// Node budget (colouring classes); exceeding it exits 3 with a
        /// checkpoint.
        #[arg(long)]
        budget: Option<u64>,
        /// Resume from a checkpoint file written by a budgeted run.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Write the checkpoint here on budget exhaustion (default stdout).
        #[arg(long)]
        checkpoint_out: Option<PathBuf>,
        /// Also prune alphabet-permutation symmetry (hj only).
        #[arg(long)]
        hj_symmetry: bool,
        /// Write the fail colouring at N-1 to this file.
        #[arg(long)]
        bad_coloring_out: Option<PathBuf>,
    },
    /// Re-check a witness certificate against a colouring.
    Verify {
        /// Certificate file.
        #[arg(long)]
        cert: PathBuf,
        /// Colouring file the certificate claims to witness.
        #[arg(long)]
        coloring: PathBuf,
    },
}

#[derive(Subcommand)]
enum ZooCmd {
    /// One line per kind with its configuration parameters.
    List,
    /// Stream the canonical elements of a fragment.
    Enum {
        #[command(flatten)]
        sg: SgArgs,
        #[command(flatten)]
        frag: FragArgs,
        /// Include all smaller strata (for W, whose fragment is otherwise
        /// the exact length/layer stratum).
        #[arg(long)]
        upto: bool,
        /// Print the element count instead of the elements.
        #[arg(long)]
        count: bool,
    },
    /// Generate a random block sequence (seeded; test data only).
    Random {
        #[command(flatten)]
        sg: SgArgs,
        /// Number of elements.
        #[arg(long, default_value_t = 3)]
        len: u32,
        /// Largest layer to use.
        #[arg(long, default_value_t = 2)]
        max_layer: u32,
    },
}

#[derive(Subcommand)]
enum MapCmd {
    /// Apply one map to one element.
    Apply {
        #[command(flatten)]
        sg: SgArgs,
        /// Map descriptor, e.g. `tetris 0,0,1`.
        #[arg(long)]
        map: String,
        /// Canonical element text.
        #[arg(long)]
        element: String,
    },
    /// Check the regressive-map conditions exhaustively on a fragment.
    Verify {
        #[command(flatten)]
        sg: SgArgs,
        #[command(flatten)]
        frag: FragArgs,
        /// Map descriptor to verify.
        #[arg(long)]
        map: String,
    },
    /// Group a family by its action on the layer-bounded fragment part.
    Classes {
        #[command(flatten)]
        sg: SgArgs,
        #[command(flatten)]
        frag: FragArgs,
        /// Map-descriptor-per-line family file.
        #[arg(long)]
        family: PathBuf,
        /// Restriction layer i (acts on elements of layer <= i).
        #[arg(long)]
        layer: u32,
    },
}

#[derive(Subcommand)]
enum SpanCmd {
    /// Is the sequence a block sequence for the family?
    Check {
        #[command(flatten)]
        sg: SgArgs,
        #[arg(long)]
        xs: PathBuf,
        #[arg(long)]
        family: PathBuf,
        /// Longest combination to test.
        #[arg(long)]
        max_len: u32,
    },
    /// Stream `value<TAB>witness-term` span lines at one layer.
    Enum {
        #[command(flatten)]
        sg: SgArgs,
        #[arg(long)]
        xs: PathBuf,
        #[arg(long)]
        family: PathBuf,
        /// Target layer.
        #[arg(long)]
        layer: u32,
        #[arg(long)]
        max_len: u32,
        /// Keep every witnessing term instead of one per value.
        #[arg(long)]
        full: bool,
    },
    /// Stream m-tuple span lines (grouped partial sums).
    Tuple {
        #[command(flatten)]
        sg: SgArgs,
        #[arg(long)]
        xs: PathBuf,
        #[arg(long)]
        family: PathBuf,
        /// Tuple arity.
        #[arg(long)]
        m: u32,
        /// Layer of every tuple component.
        #[arg(long)]
        layer: u32,
        #[arg(long)]
        max_len: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut w = std::io::BufWriter::new(stdout.lock());
    let mut out = Out { format: cli.format, w: &mut w };
    let code = match run(&cli, &mut out) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    };
    w.flush().expect("stdout flush");
    ExitCode::from(code)
}

fn run(cli: &Cli, out: &mut Out) -> Result<u8, Failure> {
    let limits = Limits::default();
    match &cli.cmd {
        Cmd::Zoo { cmd } => zoo(cli, cmd, out, &limits),
        Cmd::Eval { sg, xs, indices, maps } => eval(sg, xs, indices, maps, out),
        Cmd::Map { cmd } => map(cmd, out, &limits),
        Cmd::Span { cmd } => span(cmd, out, &limits),
        Cmd::Search { st, coloring, cert_out } => search(st, coloring, cert_out.as_ref(), out, &limits),
        Cmd::Bound {
            st,
            colors,
            n_max,
            budget,
            resume,
            checkpoint_out,
            hj_symmetry,
            bad_coloring_out,
        } => bound(
            cli,
            st,
            *colors,
            *n_max,
            *budget,
            resume.as_ref(),
            checkpoint_out.as_ref(),
            *hj_symmetry,
            bad_coloring_out.as_ref(),
            out,
            &limits,
        ),
        Cmd::Verify { cert, coloring } => verify(cert, coloring, out, &limits),
    }
}

fn zoo(cli: &Cli, cmd: &ZooCmd, out: &mut Out, limits: &Limits) -> Result<u8, Failure> {
    match cmd {
        ZooCmd::List => {
            let rows: [(&str, &str, &str); 5] = [
                ("FIN", "none", "finite-support maps to values >= 1; layer = max value"),
                ("FINSETS", "none", "nonempty finite sets; disjoint union; single layer 0"),
                ("W", "alphabet", "parameter words; total concatenation; layer = variable count"),
                ("L", "alphabet, ordered", "located words; disjoint-domain union; layer = max variable"),
                ("FINA", "alphabet, ordered", "token sequences over letters and x0,x1,...; layer = max variable"),
            ];
            for (kind, params, what) in rows {
                out.record(&[("kind", kind), ("parameters", params), ("description", what)]);
            }
            Ok(0)
        }
        ZooCmd::Enum { sg, frag, upto, count } => {
            let sg = sg.build()?;
            let spec = frag.spec();
            if *count {
                let n = if *upto {
                    enumerate_fragment_upto(&sg, &spec, limits)?.len() as u128
                } else {
                    fragment_count(&sg, &spec)
                };
                out.line("count", &n.to_string());
                return Ok(0);
            }
            let elems = if *upto {
                enumerate_fragment_upto(&sg, &spec, limits)?
            } else {
                enumerate_fragment(&sg, &spec, limits)?
            };
            for e in &elems {
                out.line("element", &e.encode());
            }
            Ok(0)
        }
        ZooCmd::Random { sg, len, max_layer } => {
            let sg = sg.build()?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
            for i in 0..*len {
                let e = random_chunk_element(&mut rng, &sg, 3 * i, 3, *max_layer);
                out.line("element", &e.encode());
            }
            Ok(0)
        }
    }
}

/// Random element supported inside `[base, base+width)`; disjoint chunks
/// make the streamed sequence a block sequence for any shipped family.
fn random_chunk_element(
    rng: &mut rand_chacha::ChaCha8Rng,
    sg: &Semigroup,
    base: u32,
    width: u32,
    max_layer: u32,
) -> Element {
    let letters: Vec<char> = if sg.alphabet().is_empty() {
        vec!['a']
    } else {
        sg.alphabet().to_vec()
    };
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
        SemigroupKind::W | SemigroupKind::L => {
            let mut next_var = 1u32;
            let tokens: Vec<String> = (0..size)
                .map(|_| {
                    if next_var <= max_layer && rng.gen_bool(0.5) {
                        next_var += 1;
                        format!("x{}", next_var - 1)
                    } else {
                        String::from(*letters.choose(rng).expect("nonempty"))
                    }
                })
                .collect();
            if sg.kind() == SemigroupKind::W {
                format!("W |{}|", tokens.join(" "))
            } else {
                let items: Vec<String> = positions
                    .iter()
                    .zip(&tokens)
                    .map(|(p, t)| format!("{p}:{t}"))
                    .collect();
                format!("L {{{}}}", items.join(","))
            }
        }
        SemigroupKind::FinA => {
            let last = *positions.last().expect("size >= 1");
            let mut tokens = vec!["x0".to_string(); last as usize + 1];
            for &p in &positions {
                tokens[p as usize] = if max_layer == 0 || rng.gen_bool(0.3) {
                    String::from(*letters.choose(rng).expect("nonempty"))
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

fn eval(
    sg: &SgArgs,
    xs: &PathBuf,
    indices: &str,
    maps: &str,
    out: &mut Out,
) -> Result<u8, Failure> {
    let sg = sg.build()?;
    let xs = args::load_elements(xs, &sg)?;
    let indices = args::parse_indices(indices)?;
    let maps = args::parse_map_list(maps)?;
    match evaluate_term(&sg, &xs, &indices, &maps).map_err(Failure::usage)? {
        Some(v) => out.line("value", &v.encode()),
        None => out.line("value", "undefined"),
    }
    Ok(0)
}

fn map(cmd: &MapCmd, out: &mut Out, limits: &Limits) -> Result<u8, Failure> {
    match cmd {
        MapCmd::Apply { sg, map, element } => {
            let sg = sg.build()?;
            let m = MapDescriptor::parse(map).map_err(Failure::usage)?;
            let e = sg.parse_element(element).map_err(Failure::usage)?;
            let image = apply(&m, &sg, &e).map_err(Failure::usage)?;
            out.line("image", &image.encode());
            Ok(0)
        }
        MapCmd::Verify { sg, frag, map } => {
            let sg = sg.build()?;
            let m = MapDescriptor::parse(map).map_err(Failure::usage)?;
            let report = verify_regressive(&m, &sg, &frag.spec(), limits)?;
            for (s, t) in &report.undefined_image_pairs {
                eprintln!(
                    "warning: images of {} and {} do not combine",
                    s.encode(),
                    t.encode()
                );
            }
            out.record(&[
                ("result", if report.passed() { "pass" } else { "fail" }),
                ("elements", &report.elements.to_string()),
                ("pairs", &report.pairs_checked.to_string()),
                ("violations", &report.violations.len().to_string()),
            ]);
            for v in &report.violations {
                let elems: Vec<String> = v.elements.iter().map(Element::encode).collect();
                out.record(&[
                    ("violation", &format!("{:?}", v.kind).to_lowercase()),
                    ("elements", &elems.join(" ; ")),
                ]);
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        MapCmd::Classes { sg, frag, family, layer } => {
            let sg = sg.build()?;
            let fam = args::load_family(family, &sg)?;
            let classes = local_restrictions(&fam, &sg, &frag.spec(), *layer, limits)?;
            for c in &classes {
                let members: Vec<String> = c.members.iter().map(MapDescriptor::encode).collect();
                out.record(&[
                    ("representative", &c.representative.encode()),
                    ("members", &members.join(" ; ")),
                ]);
            }
            Ok(0)
        }
    }
}

fn span(cmd: &SpanCmd, out: &mut Out, limits: &Limits) -> Result<u8, Failure> {
    match cmd {
        SpanCmd::Check { sg, xs, family, max_len } => {
            let sg = sg.build()?;
            let xs = args::load_elements(xs, &sg)?;
            let fam = args::load_family(family, &sg)?;
            let check = is_block_sequence(&sg, &xs, &fam, *max_len, limits)?;
            if check.is_block {
                out.record(&[("block-sequence", "yes")]);
                Ok(0)
            } else {
                let (indices, maps) = check.counterexample.expect("failed check has a witness");
                let maps: Vec<String> = maps.iter().map(MapDescriptor::encode).collect();
                out.record(&[
                    ("block-sequence", "no"),
                    ("undefined-term", &term_text(None, &indices, &maps)),
                ]);
                Ok(1)
            }
        }
        SpanCmd::Enum { sg, xs, family, layer, max_len, full } => {
            let sg = sg.build()?;
            let xs = args::load_elements(xs, &sg)?;
            let fam = args::load_family(family, &sg)?;
            let terms = if *full {
                enumerate_span_full(&sg, &xs, &fam, *layer, *max_len, limits)?
            } else {
                enumerate_span(&sg, &xs, &fam, *layer, *max_len, limits)?
            };
            for t in &terms {
                let maps: Vec<String> = t.maps.iter().map(MapDescriptor::encode).collect();
                out.row(&[
                    ("value", &t.value.encode()),
                    ("term", &term_text(None, &t.indices, &maps)),
                ]);
            }
            Ok(0)
        }
        SpanCmd::Tuple { sg, xs, family, m, layer, max_len } => {
            let sg = sg.build()?;
            let xs = args::load_elements(xs, &sg)?;
            let fam = args::load_family(family, &sg)?;
            let tuples = enumerate_tuple_span(&sg, &xs, &fam, *m, *layer, *max_len, limits)?;
            for t in &tuples {
                let values: Vec<String> = t.values.iter().map(Element::encode).collect();
                let maps: Vec<String> = t.maps.iter().map(MapDescriptor::encode).collect();
                out.row(&[
                    ("value", &values.join(" ; ")),
                    ("term", &term_text(Some(&t.cuts), &t.indices, &maps)),
                ]);
            }
            Ok(0)
        }
    }
}

fn load_coloring(
    path: &PathBuf,
    st: &layered_core::statement::Statement,
    limits: &Limits,
) -> Result<Coloring, Failure> {
    let text = args::read_file(path)?;
    let realization = st.realize(limits)?;
    Coloring::parse(&text, realization.point_shape())
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn search(
    st: &StatementArgs,
    coloring: &PathBuf,
    cert_out: Option<&PathBuf>,
    out: &mut Out,
    limits: &Limits,
) -> Result<u8, Failure> {
    let st = st.build()?;
    let col = load_coloring(coloring, &st, limits)?;
    match find_witness(&st, &col, limits)? {
        SearchOutcome::Witness(cert) => {
            let text = cert.render();
            if let Some(path) = cert_out {
                std::fs::write(path, &text)
                    .map_err(|e| Failure::new(2, format!("cannot write {}: {e}", path.display())))?;
            }
            match out.format {
                Format::Tsv => out.w.write_all(text.as_bytes()).expect("stdout write"),
                Format::JsonLines => out.line("certificate", &text),
            }
            Ok(0)
        }
        SearchOutcome::Exhausted(report) => {
            out.record(&[
                ("witness", "none"),
                ("candidates-checked", &report.candidates_checked.to_string()),
                ("search-space", &report.search_space.to_string()),
            ]);
            Ok(1)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn bound(
    cli: &Cli,
    st: &StatementArgs,
    colors: u32,
    n_max: u32,
    budget: Option<u64>,
    resume: Option<&PathBuf>,
    checkpoint_out: Option<&PathBuf>,
    hj_symmetry: bool,
    bad_coloring_out: Option<&PathBuf>,
    out: &mut Out,
    limits: &Limits,
) -> Result<u8, Failure> {
    if cli.jobs > 1 && (budget.is_some() || resume.is_some() || hj_symmetry) {
        return Err(Failure::new(
            2,
            "--jobs > 1 cannot be combined with --budget, --resume or --hj-symmetry \
             (parallel scans would change which classes are counted)",
        ));
    }
    if cli.jobs == 0 {
        return Err(Failure::new(2, "--jobs must be at least 1"));
    }
    let st = st.build_for_bound()?;
    let opts = BoundOptions {
        budget,
        resume: resume.map(|p| args::read_file(p)).transpose()?,
        hj_alphabet_symmetry: hj_symmetry,
    };
    let jobs = cli.jobs;
    let outcome = compute_bound_with(&st, colors, n_max, &opts, limits, |level, start| {
        if jobs > 1 {
            parallel::scan_parallel(jobs, level, start)
        } else {
            scan_level(level, start)
        }
    });
    let outcome = match outcome {
        Err(Error::BudgetExceeded { nodes, checkpoint }) => {
            match checkpoint_out {
                Some(path) => std::fs::write(path, &checkpoint).map_err(|e| {
                    Failure::new(2, format!("cannot write {}: {e}", path.display()))
                })?,
                None => out.w.write_all(checkpoint.as_bytes()).expect("stdout write"),
            }
            return Err(Failure::new(3, format!("budget exceeded after {nodes} nodes")));
        }
        other => other?,
    };
    match outcome {
        BoundOutcome::Found(res) => {
            out.line("bound", &format!("N={}", res.n));
            for l in &res.levels {
                emit_level(out, l);
            }
            out.record(&[("nodes", &res.nodes_used.to_string())]);
            if let Some(bad) = &res.bad_coloring {
                out.record(&[
                    ("bad-coloring-at", &(res.n - 1).to_string()),
                    ("digest", bad.digest()),
                ]);
                if let Some(path) = bad_coloring_out {
                    std::fs::write(path, bad.canonical_text()).map_err(|e| {
                        Failure::new(2, format!("cannot write {}: {e}", path.display()))
                    })?;
                }
            }
            Ok(0)
        }
        BoundOutcome::Inconclusive { n_max, levels, nodes_used } => {
            out.line("bound", &format!("inconclusive n_max={n_max}"));
            for l in &levels {
                emit_level(out, l);
            }
            out.record(&[("nodes", &nodes_used.to_string())]);
            Ok(0)
        }
    }
}

fn emit_level(out: &mut Out, l: &layered_core::search::LevelSummary) {
    out.record(&[
        ("level", &l.n.to_string()),
        ("domain", &l.domain_size.to_string()),
        ("classes", &l.classes_checked.to_string()),
        ("total", &l.total_colorings.to_string()),
        ("passed", if l.passed { "yes" } else { "no" }),
    ]);
}

fn verify(cert: &PathBuf, coloring: &PathBuf, out: &mut Out, limits: &Limits) -> Result<u8, Failure> {
    let cert_text = args::read_file(cert)?;
    // A structurally broken certificate is a verification failure, and the
    // colouring cannot even be interpreted without the statement.
    let parsed = match Certificate::parse(&cert_text) {
        Ok(c) => c,
        Err(e) => {
            out.record(&[
                ("result", "invalid"),
                ("reason", "malformed"),
                ("detail", &e.to_string()),
            ]);
            return Ok(1);
        }
    };
    let col = load_coloring(coloring, &parsed.statement, limits)?;
    match layered_core::cert::verify_certificate(&cert_text, &col, limits) {
        VerifyOutcome::Valid => {
            out.record(&[("result", "valid")]);
            Ok(0)
        }
        VerifyOutcome::Invalid(f) => {
            out.record(&[
                ("result", "invalid"),
                ("reason", f.kind.name()),
                ("detail", &f.detail),
            ]);
            Ok(1)
        }
    }
}
