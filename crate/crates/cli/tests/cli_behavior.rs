//! End-to-end tests that drive the `stratal` binary: output contracts,
//! exit codes, and pipelines that feed one command's output into another.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../samples")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stratal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn path_arg(p: &PathBuf) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn volume_of_the_triangle_prints_the_expected_class() {
    let out = run(&["volume", path_arg(&sample("triangle.json"))]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "+[a] +[b] +[c] -[ab] -[bc] -[ca]\n");
}

#[test]
fn valid_documents_exit_zero() {
    for name in [
        "edge.json",
        "triangle.json",
        "filled-triangle.json",
        "square.json",
        "tetrahedron.json",
        "cone.json",
        "cone3.json",
        "obstruction.json",
    ] {
        let out = run(&["validate", path_arg(&sample(name))]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        assert!(stdout(&out).contains("OK"), "{name}: {}", stdout(&out));
    }
}

#[test]
fn structural_violations_exit_one_with_a_witness() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    // The faces of XY are listed in the wrong order, so the deletion words
    // disagree with the face references.
    write!(
        file,
        r#"{{
  "name": "broken",
  "base": "k",
  "vertices": [
    {{ "id": "X", "order": 0, "class": "a" }},
    {{ "id": "Y", "order": 1, "class": "b" }}
  ],
  "strata": [
    {{ "id": "X", "vertices": ["X"], "class": "a" }},
    {{ "id": "Y", "vertices": ["Y"], "class": "b" }},
    {{ "id": "XY", "vertices": ["X", "Y"], "faces": ["X", "Y"], "class": "ab" }}
  ]
}}"#
    )
    .unwrap();
    let out = run(&["validate", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("INVALID"), "{text}");
    assert!(text.contains("face-word"), "{text}");
}

#[test]
fn missing_files_and_bad_json_exit_two() {
    let out = run(&["validate", "no-such-file.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error:"), "{}", stderr(&out));

    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{{ \"name\": ").unwrap();
    let out = run(&["validate", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));
}

#[test]
fn unknown_center_exits_two() {
    let out = run(&[
        "subdivide",
        path_arg(&sample("triangle.json")),
        "--star",
        "NOPE",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("NOPE"), "{}", stderr(&out));
}

#[test]
fn subdivision_output_validates_and_subdivides_again() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("bary.json");
    let out = run(&["subdivide", path_arg(&sample("edge.json")), "--barycentric"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    std::fs::write(&first, stdout(&out)).unwrap();

    let out = run(&["validate", first.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    let out = run(&["subdivide", first.to_str().unwrap(), "--star", "D0D1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let second = dir.path().join("star.json");
    std::fs::write(&second, stdout(&out)).unwrap();
    let out = run(&["validate", second.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn blowup_with_a_profile_document() {
    let out = run(&[
        "subdivide",
        path_arg(&sample("tetrahedron.json")),
        "--blowup",
        "D0D1",
        "--profile",
        path_arg(&sample("profile-split-center.json")),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let dir = tempfile::tempdir().unwrap();
    let derived = dir.path().join("blowup.json");
    std::fs::write(&derived, stdout(&out)).unwrap();
    let out = run(&["validate", derived.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn homology_reports_match_known_groups() {
    let out = run(&["homology", path_arg(&sample("edge.json")), "--constant"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("H_0 = Z\n"), "{text}");
    assert!(text.contains("H_1 = 0"), "{text}");

    let out = run(&[
        "homology",
        path_arg(&sample("square.json")),
        "--realization",
        path_arg(&sample("realization-twisted.json")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("H_0 = Z/2"), "{text}");
    assert!(text.contains("H_1 = 0"), "{text}");

    let out = run(&["homology", path_arg(&sample("tetrahedron.json")), "--constant"]);
    let text = stdout(&out);
    assert!(text.contains("H_0 = Z\n"), "{text}");
    assert!(text.contains("H_1 = 0"), "{text}");
    assert!(text.contains("H_2 = Z\n"), "{text}");
    assert!(text.contains("Euler characteristic: 2"), "{text}");
}

#[test]
fn resolve_terminates_smooth_and_requires_a_lattice() {
    let out = run(&["resolve", path_arg(&sample("cone.json"))]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("smooth after"), "{text}");
    assert!(text.contains("step 1:"), "{text}");

    let out = run(&["resolve", path_arg(&sample("edge.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("lattice"), "{}", stderr(&out));
}

#[test]
fn volume_quotients_and_point_checks() {
    let out = run(&[
        "volume",
        path_arg(&sample("edge.json")),
        "--quotient",
        path_arg(&sample("quotient-point.json")),
        "--point",
        "a",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("trivial"), "{text}");
    assert!(!text.contains("non-trivial"), "{text}");

    let out = run(&["volume", path_arg(&sample("obstruction.json")), "--point", "pt"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("+2[Z] -[Q]"), "{text}");
    assert!(text.contains("non-trivial"), "{text}");

    let out = run(&[
        "volume",
        path_arg(&sample("obstruction.json")),
        "--quotient",
        path_arg(&sample("quotient-collapse.json")),
        "--point",
        "pt",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("trivial"), "{text}");
    assert!(!text.contains("non-trivial"), "{text}");
}

#[test]
fn compare_and_verify_pass_on_samples() {
    let out = run(&["compare", path_arg(&sample("triangle.json"))]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("all checks passed"));

    let out = run(&["verify", path_arg(&sample("edge.json")), "--suite", "full"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("all checks passed"));

    let out = run(&["verify", "--seed", "3", "--cases", "3", "--suite", "maps"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("3 random case(s)"), "{text}");
    assert!(text.contains("all checks passed"), "{text}");
}

#[test]
fn json_mode_emits_machine_readable_reports() {
    let out = run(&["--json", "validate", path_arg(&sample("cone.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(value["ok"], serde_json::Value::Bool(true));
    assert_eq!(value["command"], "validate");

    let out = run(&["--json", "volume", path_arg(&sample("triangle.json"))]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(value["display"], "+[a] +[b] +[c] -[ab] -[bc] -[ca]");
    assert_eq!(value["class"]["a"], 1);
    assert_eq!(value["class"]["ab"], -1);

    let out = run(&["--json", "resolve", path_arg(&sample("cone.json"))]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(value["smooth"], serde_json::Value::Bool(true));
    assert_eq!(value["steps"].as_array().unwrap().len(), 4);
}
