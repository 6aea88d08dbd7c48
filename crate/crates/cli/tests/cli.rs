use std::io::Write;
use std::process::{Command, Output, Stdio};

use morsefol::detect::find_bubbles;
use morsefol::gen::{generate, Family, GenSpec};
use morsefol::io::{parse, serialize};
use morsefol::{isomorphic, Ambient, Assembly};

fn morsefol(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_morsefol"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gen(family: &str, extra: &[&str]) -> String {
    let mut args = vec!["gen", "--family", family];
    args.extend_from_slice(extra);
    let o = morsefol(&args, "");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn open_assembly() -> String {
    let mut a = Assembly::new("open", Ambient::S3);
    a.add_reeb(false);
    serialize(&a)
}

#[test]
fn gen_is_deterministic_and_parses() {
    let x = gen("random(6,2,1)", &["--seed", "42"]);
    assert_eq!(x, gen("random(6,2,1)", &["--seed", "42"]));
    assert_ne!(x, gen("random(6,2,1)", &["--seed", "43"]));
    let a = parse(&x).unwrap();
    let b = generate(&GenSpec::random(42, 6, 2, 1)).unwrap();
    assert!(isomorphic(&a, &b));
}

#[test]
fn gen_writes_to_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.fol");
    let o = morsefol(
        &[
            "gen",
            "--family",
            "morse_pair",
            "--output",
            path.to_str().unwrap(),
        ],
        "",
    );
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(path).unwrap(),
        gen("morse_pair", &[])
    );
}

#[test]
fn validate_reports_and_exits() {
    let ok = morsefol(&["validate"], &gen("two_centers", &[]));
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok).trim(), "valid");
    let bad = morsefol(&["validate"], &open_assembly());
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stdout.is_empty());
}

#[test]
fn classify_prints_the_verdict() {
    let o = morsefol(&["classify"], &gen("double_pretzel", &[]));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "reeb");
}

#[test]
fn classify_writes_certificate_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.txt");
    let trace = dir.path().join("t.txt");
    let o = morsefol(
        &[
            "classify",
            "--output",
            cert.to_str().unwrap(),
            "--trace",
            trace.to_str().unwrap(),
        ],
        &gen("simply_connected_chain(2)", &[]),
    );
    assert!(o.status.success());
    let cert = std::fs::read_to_string(cert).unwrap();
    assert!(cert.starts_with("certificate version=1\nverdict all_simply_connected\n"));
    let trace = std::fs::read_to_string(trace).unwrap();
    assert_eq!(
        trace
            .lines()
            .filter(|l| l.contains("eliminate_trivial_pair"))
            .count(),
        2
    );
}

#[test]
fn open_input_is_refused_with_code_one() {
    for cmd in ["classify", "stability", "normalize"] {
        let o = morsefol(&[cmd], &open_assembly());
        assert_eq!(o.status.code(), Some(1), "{cmd}");
    }
}

#[test]
fn parse_and_usage_errors_exit_two() {
    assert_eq!(
        morsefol(&["classify"], "not a fol file\n").status.code(),
        Some(2)
    );
    assert_eq!(
        morsefol(&["classify", "--input", "/nonexistent/x.fol"], "")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(morsefol(&["frobnicate"], "").status.code(), Some(2));
    assert_eq!(
        morsefol(&["gen", "--family", "pretzel"], "").status.code(),
        Some(2)
    );
    let two = gen("two_centers", &[]);
    assert_eq!(
        morsefol(&["normalize", "--order", "outermost"], &two)
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn stability_names_the_witness() {
    let o = morsefol(&["stability"], &gen("two_centers", &[]));
    assert_eq!(stdout(&o).trim(), "stable");
    let o = morsefol(&["stability"], &gen("morse_pair", &["--extra-bands", "1"]));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("unstable band_of_leaves "));
}

#[test]
fn normalize_accepts_an_explicit_order() {
    let seed = (0u64..)
        .find(|s| find_bubbles(&generate(&GenSpec::random(*s, 4, 2, 0)).unwrap()).len() >= 2)
        .unwrap();
    let a = generate(&GenSpec::random(seed, 4, 2, 0)).unwrap();
    let mut paths = find_bubbles(&a);
    paths.reverse();
    let dir = tempfile::tempdir().unwrap();
    let order = dir.path().join("order.txt");
    let lines: Vec<String> = paths
        .iter()
        .map(|p| {
            p.iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join("/")
        })
        .collect();
    std::fs::write(&order, format!("# reversed\n{}\n", lines.join("\n"))).unwrap();
    let flag = format!("explicit:{}", order.display());
    let o = morsefol(&["normalize", "--order", &flag], &serialize(&a));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let b = parse(&stdout(&o)).unwrap();
    assert!(find_bubbles(&b).is_empty());
    let inner = morsefol(&["normalize"], &serialize(&a));
    let c = parse(&stdout(&inner)).unwrap();
    let verdict = |x: &Assembly| stdout(&morsefol(&["classify"], &serialize(x)));
    assert_eq!(verdict(&b), verdict(&c));
}

#[test]
fn bad_order_file_line_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let order = dir.path().join("order.txt");
    std::fs::write(&order, "b1/x2\n").unwrap();
    let flag = format!("explicit:{}", order.display());
    let o = morsefol(&["normalize", "--order", &flag], &gen("two_centers", &[]));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn dot_highlights_only_when_asked() {
    let fol = gen("morse_pair", &[]);
    let plain = stdout(&morsefol(&["dot"], &fol));
    let lit = stdout(&morsefol(&["dot", "--highlight"], &fol));
    assert!(plain.starts_with("graph fol {"));
    assert!(!plain.contains("fillcolor=gold"));
    assert!(lit.contains("fillcolor=gold"));
}

#[test]
fn input_file_matches_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.fol");
    std::fs::write(&path, gen("double_pretzel", &[])).unwrap();
    let from_file = morsefol(&["classify", "--input", path.to_str().unwrap()], "");
    let from_stdin = morsefol(&["classify", "--input", "-"], &gen("double_pretzel", &[]));
    assert_eq!(stdout(&from_file), stdout(&from_stdin));
}

#[test]
fn family_names_round_trip() {
    for f in [
        Family::TwoCenters,
        Family::SimplyConnectedChain(3),
        Family::MorsePair,
    ] {
        let name = f.to_string();
        assert_eq!(
            gen(&name, &[]),
            serialize(&generate(&GenSpec::new(0, f)).unwrap())
        );
    }
}
