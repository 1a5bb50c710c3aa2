//! CLI contract tests: exit codes, line-numbered diagnostics, output
//! formats, search/verify round trips, and budget/resume behaviour.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_layered"))
}

fn run(args: &[&str]) -> Output {
    cli().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// 1,4,5,8 vs 2,3,6,7: no 3-term monochromatic progression in [1,8].
const VDW_BAD_8: &str = "colors 2\n1\t0\n2\t1\n3\t1\n4\t0\n5\t0\n6\t1\n7\t1\n8\t0\n";

#[test]
fn exit_zero_on_success_paths() {
    assert_eq!(code(&run(&["zoo", "list"])), 0);
    assert_eq!(code(&run(&["map", "apply", "--kind", "FIN", "--map", "tetris 0,0", "--element", "FIN {0:1,2:2}"])), 0);
    let out = run(&["bound", "--statement", "vdw", "--k", "3", "--colors", "2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("N=9\n"), "{}", stdout(&out));
}

#[test]
fn exit_one_on_negative_results() {
    let dir = tempfile::tempdir().unwrap();

    // Exhausted witness search.
    let bad = write(dir.path(), "bad.txt", VDW_BAD_8);
    let out = run(&[
        "search", "--statement", "vdw", "--k", "3", "--N", "8",
        "--coloring", bad.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("witness=none"), "{}", stdout(&out));

    // Unverifiable certificate.
    let garbage = write(dir.path(), "garbage.txt", "not a certificate\n");
    let col = write(dir.path(), "col.txt", "colors 1\n1\t0\n");
    let out = run(&[
        "verify", "--cert", garbage.to_str().unwrap(),
        "--coloring", col.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("result=invalid"), "{}", stdout(&out));
    assert!(stdout(&out).contains("reason=malformed"), "{}", stdout(&out));

    // A non-block sequence: overlapping supports make the pair sum
    // undefined.
    let xs = write(dir.path(), "xs.txt", "FIN {0:1}\nFIN {0:2}\n");
    let fam = write(dir.path(), "fam.txt", "id\n");
    let out = run(&[
        "span", "check", "--kind", "FIN", "--xs", xs.to_str().unwrap(),
        "--family", fam.to_str().unwrap(), "--max-len", "2",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("block-sequence=no"), "{}", stdout(&out));
}

#[test]
fn exit_two_on_usage_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();

    // Malformed element on line 2 of a sequence file.
    let xs = write(dir.path(), "xs.txt", "FIN {0:1}\nFIN {oops}\nFIN {2:1}\n");
    let fam = write(dir.path(), "fam.txt", "id\n");
    let out = run(&[
        "span", "check", "--kind", "FIN", "--xs", xs.to_str().unwrap(),
        "--family", fam.to_str().unwrap(), "--max-len", "2",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    // Malformed colouring header.
    let col = write(dir.path(), "col.txt", "colours 2\n1\t0\n");
    let out = run(&[
        "search", "--statement", "vdw", "--k", "3", "--N", "1",
        "--coloring", col.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);

    // Missing statement parameter.
    let out = run(&[
        "search", "--statement", "vdw", "--N", "8",
        "--coloring", col.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--k"), "{}", stderr(&out));

    // Parallel scan cannot be combined with budget bookkeeping.
    let out = run(&[
        "bound", "--statement", "vdw", "--k", "3", "--colors", "2",
        "--jobs", "4", "--budget", "100",
    ]);
    assert_eq!(code(&out), 2);

    // Missing input file.
    let out = run(&[
        "span", "check", "--kind", "FIN", "--xs", "/nonexistent/xs.txt",
        "--family", fam.to_str().unwrap(), "--max-len", "2",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn exit_three_on_budget_with_resumable_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("checkpoint.txt");

    let out = run(&[
        "bound", "--statement", "vdw", "--k", "3", "--colors", "2",
        "--budget", "100", "--checkpoint-out", cp.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
    let cp_text = std::fs::read_to_string(&cp).unwrap();
    assert!(cp_text.starts_with("CHECKPOINT v1"), "{cp_text}");

    // Resuming completes the run and reaches the same bound.
    let out = run(&[
        "bound", "--statement", "vdw", "--k", "3", "--colors", "2",
        "--resume", cp.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).starts_with("N=9\n"), "{}", stdout(&out));

    // A resumed run must agree with an unbudgeted run on the result line.
    let direct = run(&["bound", "--statement", "vdw", "--k", "3", "--colors", "2"]);
    let direct_n = stdout(&direct).lines().next().unwrap().to_string();
    let resumed_n = stdout(&out).lines().next().unwrap().to_string();
    assert_eq!(direct_n, resumed_n);
}

#[test]
fn search_verify_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    // Constant colouring of the m=2 finite-unions domain at N=3.
    let col = write(
        dir.path(),
        "col.txt",
        "colors 1\nFINSETS {0}\t0\nFINSETS {0,1}\t0\nFINSETS {0,1,2}\t0\nFINSETS {0,2}\t0\nFINSETS {1}\t0\nFINSETS {1,2}\t0\nFINSETS {2}\t0\n",
    );
    let cert = dir.path().join("cert.txt");
    let out = run(&[
        "search", "--statement", "fu", "--m", "2", "--N", "3",
        "--coloring", col.to_str().unwrap(),
        "--cert-out", cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let cert_text = std::fs::read_to_string(&cert).unwrap();
    assert!(cert_text.starts_with("CERTIFICATE v1\n"), "{cert_text}");
    assert_eq!(stdout(&out), cert_text, "stdout carries the certificate");

    let out = run(&[
        "verify", "--cert", cert.to_str().unwrap(),
        "--coloring", col.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("result=valid"), "{}", stdout(&out));

    // Any tampering is caught.
    let tampered = cert_text.replace("CERTIFICATE v1", "CERTIFICATE v2");
    let bad = write(dir.path(), "tampered.txt", &tampered);
    let out = run(&[
        "verify", "--cert", bad.to_str().unwrap(),
        "--coloring", col.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("result=invalid"), "{}", stdout(&out));
}

#[test]
fn json_lines_format_emits_parseable_records() {
    for args in [
        vec!["zoo", "list", "--format", "json-lines"],
        vec!["zoo", "enum", "--kind", "FIN", "--max-layer", "1", "--size", "2", "--format", "json-lines"],
        vec!["map", "apply", "--kind", "FIN", "--map", "tetris 0,0", "--element", "FIN {0:1,2:2}", "--format", "json-lines"],
        vec!["bound", "--statement", "hj", "--alphabet", "ab", "--colors", "2", "--n-max", "3", "--format", "json-lines"],
    ] {
        let out = run(&args);
        assert_eq!(code(&out), 0, "{args:?} stderr: {}", stderr(&out));
        let text = stdout(&out);
        assert!(!text.is_empty());
        for line in text.lines() {
            let parsed: serde_json::Value = serde_json::from_str(line)
                .unwrap_or_else(|e| panic!("{args:?}: line {line:?} not JSON: {e}"));
            assert!(parsed.is_object(), "{args:?}: {line:?}");
        }
    }
}

#[test]
fn span_enum_rows_carry_value_and_term() {
    let dir = tempfile::tempdir().unwrap();
    let xs = write(dir.path(), "xs.txt", "FIN {0:1,1:2}\nFIN {2:1}\nFIN {3:2}\n");
    let fam = write(dir.path(), "fam.txt", "id\ntetris 0,0\n");
    let out = run(&[
        "span", "enum", "--kind", "FIN", "--xs", xs.to_str().unwrap(),
        "--family", fam.to_str().unwrap(), "--layer", "1", "--max-len", "3",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut rows = 0;
    for line in text.lines() {
        let (value, term) = line.split_once('\t').expect("value<TAB>term");
        assert!(value.starts_with("FIN {"), "{line}");
        assert!(term.starts_with('['), "{line}");
        rows += 1;
    }
    assert!(rows > 0, "{text}");
}

#[test]
fn zoo_random_is_seed_deterministic() {
    let args = ["zoo", "random", "--kind", "L", "--alphabet", "ab", "--len", "4", "--max-layer", "2"];
    let a = run(&[&args[..], &["--seed", "5"]].concat());
    let b = run(&[&args[..], &["--seed", "5"]].concat());
    let c = run(&[&args[..], &["--seed", "6"]].concat());
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b), "same seed, same sequence");
    assert_ne!(stdout(&a), stdout(&c), "different seed, different sequence");
}

#[test]
fn bound_reports_inconclusive_below_threshold() {
    let out = run(&[
        "bound", "--statement", "vdw", "--k", "3", "--colors", "2", "--n-max", "5",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("inconclusive n_max=5"), "{}", stdout(&out));
}
