use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use factorcert::certificates::{MixtureTerm, RationalMixtureCert};
use factorcert::channels::QuantumChannel;
use factorcert::io::{emit_document, parse_document, Document};
use factorcert::linalg::{ComplexMatrix, Rational};

const BIN: &str = env!("CARGO_BIN_EXE_factorcert");

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = child.stdin.take().unwrap();
    input.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(input);
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn report(out: &Output) -> factorcert::io::Report {
    match parse_document(&stdout(out)).unwrap() {
        Document::Report(r) => r,
        other => panic!("expected a report, got {other:?}"),
    }
}

fn write_doc(dir: &Path, name: &str, doc: &Document) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, emit_document(doc)).unwrap();
    path
}

fn emit(dir: &Path, name: &str, part: &str) -> PathBuf {
    let path = dir.join(format!("{name}-{part}.json"));
    let out = run(&["zoo", "emit", name, "--part", part, "-o", path.to_str().unwrap()], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn zoo_emit_pipes_into_verify_channel() {
    let emitted = run(&["zoo", "emit", "paper-m2-example"], None);
    assert_eq!(code(&emitted), 0);
    let out = run(&["verify-channel", "-"], Some(&stdout(&emitted)));
    assert_eq!(code(&out), 0);
    assert!(report(&out).verdict);
}

#[test]
fn zoo_list_names_every_family() {
    let out = run(&["zoo", "list"], None);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in ["dephasing", "depolarizing", "paper-m2-example"] {
        assert!(text.contains(name));
    }
}

#[test]
fn lift_then_verify_factorization() {
    let dir = tempfile::tempdir().unwrap();
    let mix = emit(dir.path(), "dephasing-2", "mixture");
    let channel = emit(dir.path(), "dephasing-2", "channel");
    let lifted = dir.path().join("lift.json");
    let out = run(&["lift", mix.to_str().unwrap(), "-o", lifted.to_str().unwrap()], None);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&lifted).unwrap();
    assert!(text.contains("block_repeated"));
    let out = run(
        &["verify-factorization", "--channel", channel.to_str().unwrap(), "--cert", lifted.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert!(r.verdict);
    assert!(r.max_error <= 1e-12);
}

#[test]
fn collapse_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = factorcert::sampling::seeded(5);
    let cert = factorcert::sampling::random_direct_sum_cert(2, &[1, 2], 12, &mut rng).unwrap();
    let t = factorcert::certificates::induced_channel_direct_sum(&cert, 1e-9).unwrap();
    let ds = write_doc(dir.path(), "ds.json", &Document::DirectSumCert(cert));
    let ch = write_doc(dir.path(), "ch.json", &Document::Channel(t));
    let out = run(&["verify-direct-sum", "--channel", ch.to_str().unwrap(), "--cert", ds.to_str().unwrap()], None);
    assert_eq!(code(&out), 0);
    let collapsed = dir.path().join("collapsed.json");
    let out = run(&["collapse", ds.to_str().unwrap(), "-o", collapsed.to_str().unwrap()], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(
        &["verify-factorization", "--channel", ch.to_str().unwrap(), "--cert", collapsed.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&out), 0);
}

#[test]
fn fg_check_accepts_diagonal_witness() {
    let dir = tempfile::tempdir().unwrap();
    let ch = emit(dir.path(), "dephasing-3", "channel");
    let w = emit(dir.path(), "dephasing-3", "witness");
    let out = run(&["fg-check", "--channel", ch.to_str().unwrap(), "--witness", w.to_str().unwrap()], None);
    assert_eq!(code(&out), 0);
    assert!(report(&out).verdict);

    let id = write_doc(dir.path(), "id.json", &Document::Channel(QuantumChannel::identity(3)));
    let out = run(&["fg-check", "--channel", id.to_str().unwrap(), "--witness", w.to_str().unwrap()], None);
    assert_eq!(code(&out), 1);
    assert!(!report(&out).verdict);
}

fn single_term_mixture(n: usize, k: usize, coefficient: &str, u: ComplexMatrix) -> Document {
    let term = MixtureTerm {
        coefficient: coefficient.parse::<Rational>().unwrap(),
        unitary: u,
    };
    Document::MixtureCert(RationalMixtureCert::new(n, k, vec![term]).unwrap())
}

#[test]
fn refutation_and_input_errors_use_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    let not_product = write_doc(dir.path(), "a.json", &single_term_mixture(2, 2, "1", ComplexMatrix::identity(4)));
    let out = run(&["verify-mixture", not_product.to_str().unwrap()], None);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert!(!r.verdict);
    assert!(r.notes.iter().any(|n| n.contains("hypothesis failure")));
    let out = run(&["lift", not_product.to_str().unwrap()], None);
    assert_eq!(code(&out), 1);

    let bad_sum = write_doc(dir.path(), "b.json", &single_term_mixture(2, 1, "1/2", ComplexMatrix::identity(2)));
    assert_eq!(code(&run(&["verify-mixture", bad_sum.to_str().unwrap()], None)), 2);

    let non_unitary = write_doc(
        dir.path(),
        "c.json",
        &single_term_mixture(2, 1, "1", ComplexMatrix::identity(2).scale_real(2.0)),
    );
    assert_eq!(code(&run(&["verify-mixture", non_unitary.to_str().unwrap()], None)), 2);

    let non_unital = QuantumChannel::new(2, vec![ComplexMatrix::unit(2, 0, 0)]).unwrap();
    let out = run(&["verify-channel", "-"], Some(&emit_document(&Document::Channel(non_unital))));
    assert_eq!(code(&out), 1);
    assert!(!report(&out).verdict);

    let out = run(&["verify-channel", "-"], Some("{\"format_version\": \"1\", \"kind\""));
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte"));

    let out = run(&["verify-channel", "/nonexistent/file.json"], None);
    assert_eq!(code(&out), 2);
}

#[test]
fn resource_bounds_exit_three() {
    let out = run(&["--max-dim", "8", "zoo", "emit", "dephasing-4", "--part", "spin"], None);
    assert_eq!(code(&out), 3);
    let out = run(&["--max-lcm", "2", "zoo", "emit", "dephasing-3", "--part", "lift"], None);
    assert_eq!(code(&out), 3);
}

#[test]
fn unknown_zoo_entry_is_input_error() {
    let out = run(&["zoo", "emit", "amplitude-damping"], None);
    assert_eq!(code(&out), 2);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["zoo", "emit", "depolarizing-3", "--part", "lift"][..],
        &["--seed", "9", "self-test", "--count", "3"][..],
    ] {
        let a = run(args, None);
        let b = run(args, None);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
    }
}
