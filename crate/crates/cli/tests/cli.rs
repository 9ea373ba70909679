use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use troplog_cli::fixture::{load_fixture, parse_fixture, Fixture};

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fixture(name: &str) -> String {
    fixtures_dir()
        .join(format!("{name}.json"))
        .display()
        .to_string()
}

fn shipped() -> Vec<String> {
    let mut out: Vec<String> = std::fs::read_dir(fixtures_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| p.display().to_string())
        .collect();
    out.sort();
    out
}

fn troplog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_troplog"))
        .args(args)
        .env_remove("TROPLOG_MAX_ENUM")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn six_fixtures_are_shipped() {
    let names: Vec<String> = shipped()
        .iter()
        .map(|p| load_fixture(p).unwrap().name().to_string())
        .collect();
    assert_eq!(
        names,
        [
            "ex42_p2_d3",
            "fig1_alignment",
            "fig3_bidegree",
            "fig6_tacnode",
            "sec44_stratum",
            "sec52_conic"
        ]
    );
}

#[test]
fn fixtures_round_trip() {
    for path in shipped() {
        let first = load_fixture(&path).unwrap();
        let text = first.to_json();
        let second = parse_fixture(&path, &text).unwrap();
        assert_eq!(first, second, "{path}");
        assert_eq!(second.to_json(), text, "{path}");
    }
}

#[test]
fn every_shipped_expectation_is_tagged_and_nonempty() {
    for path in shipped() {
        let f = load_fixture(&path).unwrap();
        assert!(!f.expected().is_empty(), "{path} has no expectations");
    }
}

#[test]
fn shipped_fixtures_check_clean() {
    for path in shipped() {
        let o = troplog(&["check", &path]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{path}\n{}{}",
            stdout(&o),
            stderr(&o)
        );
        assert!(
            !stdout(&o)
                .lines()
                .any(|l| l.trim_start().starts_with("FAIL")),
            "{path}"
        );
    }
}

#[test]
fn untagged_expectation_is_rejected() {
    let text = std::fs::read_to_string(fixture("fig6_tacnode")).unwrap();
    let untagged = text.replace(
        r#""genus": { "value": 1, "provenance": "TRIVIAL" }"#,
        r#""genus": { "value": 1 }"#,
    );
    assert_ne!(text, untagged);
    let err = parse_fixture("untagged.json", &untagged).unwrap_err();
    assert!(err.to_string().contains("provenance"), "{err}");
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "untagged.json", &untagged);
    assert_eq!(troplog(&["check", &p]).status.code(), Some(2));
}

#[test]
fn unknown_fields_are_rejected() {
    let text = std::fs::read_to_string(fixture("ex42_p2_d3")).unwrap();
    let extra = text.replacen(r#""params": [],"#, r#""params": [], "colour": "red","#, 1);
    assert_ne!(text, extra);
    assert!(parse_fixture("x.json", &extra).is_err());
}

#[test]
fn mismatch_exits_one() {
    let text = std::fs::read_to_string(fixture("fig1_alignment")).unwrap();
    let wrong = text.replace(
        r#""value": "e1+e3", "provenance": "PAPER""#,
        r#""value": "e1+e4", "provenance": "PAPER""#,
    );
    assert_ne!(text, wrong);
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "wrong.json", &wrong);
    let o = troplog(&["check", &p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stdout(&o).contains("FAIL  radius_m5: expected e1+e4, computed e1+e3"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn unexpected_pass_exits_one() {
    let text = std::fs::read_to_string(fixture("fig3_bidegree")).unwrap();
    let pass = text.replace(
        r#""map_radius_all": { "value": "e1""#,
        r#""map_radius_all": { "value": "e2""#,
    );
    assert_ne!(text, pass);
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "xpass.json", &pass);
    let o = troplog(&["check", &p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("XPASS map_radius_all"));
}

#[test]
fn malformed_input_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(
        &dir,
        "bad.json",
        "{\n  \"format_version\": 1,\n  \"kind\": \"map\",\n  \"name\": oops\n}\n",
    );
    let o = troplog(&["check", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.json:4:"), "{}", stderr(&o));

    let p = write_temp(
        &dir,
        "future.json",
        r#"{"format_version": 9, "kind": "map"}"#,
    );
    let o = troplog(&["check", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("format_version 9"));

    assert_eq!(
        troplog(&["check", "/no/such/fixture.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn check_prints_the_radii_table() {
    let o = troplog(&["check", &fixture("fig3_bidegree")]);
    let out = stdout(&o);
    assert!(out.contains("map_radius_factor1     e1+e5"), "{out}");
    assert!(out.contains("XFAIL map_radius_factor0"));
    let o = troplog(&["check", &fixture("fig1_alignment")]);
    assert!(stdout(&o).contains("radius_m5              e1+e3"));
}

#[test]
fn check_writes_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("fig3.dot");
    let o = troplog(&[
        "check",
        &fixture("fig3_bidegree"),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("graph \"fig3_bidegree\""));
    assert!(text.contains("d=[1, 0]"));
}

#[test]
fn chamber_selection() {
    // Expectations hold for the fixture chamber only; another chamber may legitimately disagree.
    let o = troplog(&["check", &fixture("fig3_bidegree"), "--chamber", "generic"]);
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stderr(&o));
    assert!(stdout(&o).contains("map_radius_factor1"));
    let o = troplog(&["check", &fixture("fig1_alignment"), "--chamber", "0"]);
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stderr(&o));
    let o = troplog(&["check", &fixture("fig3_bidegree"), "--chamber", "100000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn complete_one_factor_adds_three_unit_legs() {
    let o = troplog(&["complete", &fixture("ex42_p2_d3"), "--factor", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let lifted = parse_fixture("stdout", &stdout(&o)).unwrap();
    let Fixture::Map(m) = lifted else {
        panic!("expected a map fixture")
    };
    assert_eq!(m.curve.legs.len(), 6);
    let contact = &m.map.as_ref().unwrap().contact;
    assert_eq!(contact.len(), 6);
    assert!(contact[3..]
        .iter()
        .all(|r| r.iter().sum::<u32>() == 1 && r[1] == 1));
    assert_eq!(m.target.divisors, vec![[0, 0], [0, 1]]);
    assert!(stderr(&o).contains("added 3 legs"));
}

#[test]
fn complete_all_is_balanced_and_idempotent() {
    let o = troplog(&["complete", &fixture("ex42_p2_d3"), "--all"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("balancing: every vertex balanced"));
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "full.json", &stdout(&o));
    let again = troplog(&["complete", &p, "--all"]);
    assert_eq!(stdout(&again), stdout(&o));
    assert!(stderr(&again).contains("nothing to add"));
    let check = troplog(&["check", &p]);
    assert!(stdout(&check).contains("balanced               yes"));
}

#[test]
fn complete_needs_a_map() {
    let o = troplog(&["complete", &fixture("sec44_stratum"), "--all"]);
    assert_eq!(o.status.code(), Some(2));
    let o = troplog(&["complete", &fixture("ex42_p2_d3")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dims_flags_equal_strata() {
    let o = troplog(&[
        "dims",
        "--genus",
        "1",
        "--markings",
        "0",
        "--target",
        "p1xp1",
        "--degree",
        "2,2",
        "--stratum",
        &fixture("sec44_stratum"),
    ]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.contains("stratum split                    8"), "{out}");
    assert!(out.contains("not logarithmically smooth"));
}

#[test]
fn dims_genus_zero() {
    let o = troplog(&[
        "dims",
        "--genus",
        "0",
        "--markings",
        "2",
        "--target",
        "p2",
        "--degree",
        "2",
        "--divisor",
        "0:0",
        "--contact",
        "1;1",
    ]);
    let out = stdout(&o);
    assert!(out.contains("expected dimension               7"), "{out}");
    assert!(out.contains("relative expected dimension      5"));
    let o = troplog(&[
        "dims",
        "--genus",
        "0",
        "--markings",
        "0",
        "--target",
        "p2",
        "--degree",
        "2",
    ]);
    assert!(stdout(&o).contains("expected dimension               5"));
    assert!(!stdout(&o).contains("flag"));
}

#[test]
fn dims_rejects_inconsistent_contact() {
    let o = troplog(&[
        "dims",
        "--genus",
        "0",
        "--markings",
        "2",
        "--target",
        "p2",
        "--degree",
        "2",
        "--divisor",
        "0:0",
        "--contact",
        "1;2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("contact orders inconsistent with degree"));
    let o = troplog(&["dims", "--genus", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumerate_line_counts() {
    let o = troplog(&[
        "enumerate",
        "--target",
        "p1",
        "--degree",
        "1",
        "--max-vertices",
        "1",
    ]);
    let out = stdout(&o);
    assert!(out.starts_with("s000 V=1 E=0 | v0[g=1 d=(1)]"), "{out}");
    assert!(out.contains("# 2 strata"));

    let o = troplog(&[
        "enumerate",
        "--target",
        "p1",
        "--degree",
        "1",
        "--max-vertices",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    assert_eq!(stdout(&o), "# 0 strata, 0 well-spaced\n");
}

#[test]
fn enumerate_quadric_is_deterministic_and_contains_split() {
    let args = [
        "enumerate",
        "--target",
        "p1xp1",
        "--degree",
        "2,2",
        "--max-vertices",
        "2",
    ];
    let a = troplog(&args);
    let b = troplog(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("V=2 E=1 | v0[g=0 d=(0,2)] v1[g=1 d=(2,0)] | v0-v1:x1 |"));
}

#[test]
fn enumerate_dot_and_guard() {
    let dir = tempfile::tempdir().unwrap();
    let o = troplog(&[
        "enumerate",
        "--target",
        "p1",
        "--degree",
        "1",
        "--dot",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut files: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    files.sort();
    assert_eq!(files, ["s000.dot", "s001.dot"]);

    let o = Command::new(env!("CARGO_BIN_EXE_troplog"))
        .args([
            "enumerate",
            "--target",
            "p1xp1",
            "--degree",
            "2,2",
            "--max-vertices",
            "2",
        ])
        .env("TROPLOG_MAX_ENUM", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("search space too large"));
}

#[test]
fn contract_reports_singularity() {
    let o = troplog(&["contract", &fixture("fig1_alignment"), "--m", "5"]);
    let out = stdout(&o);
    assert!(out.contains("radius      e1+e3"), "{out}");
    assert!(out.contains("m=6"));
    let o = troplog(&["contract", &fixture("fig6_tacnode"), "--radius", "0"]);
    assert!(stdout(&o).contains("singularity tacnode (m=2)"));
    let o = troplog(&["contract", &fixture("fig6_tacnode"), "--radius", "zz"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn threshold_is_limited_to_two_or_three() {
    let o = troplog(&["check", &fixture("ex42_p2_d3"), "--threshold", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = troplog(&["check", &fixture("ex42_p2_d3"), "--threshold", "4"]);
    assert_eq!(o.status.code(), Some(2));
}
