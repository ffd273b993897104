//! Black-box tests of the command-line driver: exit codes, witnesses, and
//! the shape of the machine-readable reports.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn validate_passes_on_good_fixture() {
    let out = run(&["validate", &fixture("setlike_gh.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ok"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn validate_fails_with_witness() {
    let out = run(&["validate", &fixture("broken_counit.json")]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL"));
    assert!(text.contains("witness: x"));
}

#[test]
fn parse_error_exits_2_with_position() {
    let out = run(&["validate", &fixture("bad_fraction.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line"), "stderr: {err}");
    assert!(err.contains("zero denominator"), "stderr: {err}");
}

#[test]
fn missing_file_exits_2() {
    let out = run(&["validate", "no-such-file.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pointed_rejects_matrix_coalgebra() {
    let out = run(&["pointed", &fixture("matrix2.json")]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("not pointed"));
}

#[test]
fn conilpotency_index_table() {
    let out = run(&["conilpotency", &fixture("path_uvw_L2.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let index = &v["data"]["index"];
    assert_eq!(index["a"], 1);
    assert_eq!(index["b"], 1);
    assert_eq!(index["ba"], 2);
    assert_eq!(v["data"]["conilpotent"], true);
}

#[test]
fn antipode_of_z3_sends_g_to_g_squared() {
    let out = run(&["antipode", &fixture("group_z3.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let images = v["data"]["images"].as_array().unwrap();
    assert!(images.contains(&serde_json::json!("S(g1) = g2")));
    assert!(images.contains(&serde_json::json!("S(g2) = g1")));
}

#[test]
fn antipode_refusal_names_witness() {
    let out = run(&["antipode", &fixture("monoid_idem.json")]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("m has no inverse"));
}

#[test]
fn pathcoalg_emits_reparseable_file() {
    let out = run(&["pathcoalg", &fixture("quiver_uvw.json"), "2", "--emit"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let def = coalg::format::DefinitionFile::parse_str(&text).unwrap();
    let sc = def.simply_colored().unwrap();
    assert_eq!(sc.dim(), 6);
    assert_eq!(sc.colors().len(), 3);
}

#[test]
fn equalizer_reports_setlike_part() {
    let out = run(&["equalizer", &fixture("equalizer_rescale.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["data"]["dim"], 2);
    assert_eq!(v["data"]["basis"][0], "g");
    assert_eq!(v["data"]["basis"][1], "h");
}

#[test]
fn coequalizer_merges_endpoint_colors() {
    let out = run(&["coequalizer", &fixture("coequalizer_merge.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["data"]["colors"][0], "u~v");
    assert_eq!(v["data"]["dim"], 1);
}

#[test]
fn product_is_flagged_approximate() {
    let out = run(&["product", &fixture("product_pair.json"), "--max-words", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["data"]["approximate"], true);
    assert_eq!(v["data"]["truncation"], 2);
    assert_eq!(v["data"]["dim"], 4);
}

#[test]
fn out_flag_writes_report_to_file() {
    let dir = std::env::temp_dir().join("coalg-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run(&[
        "validate",
        &fixture("setlike_gh.json"),
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(v["status"], "ok");
    std::fs::remove_file(&path).ok();
}

#[test]
fn pointedness_depends_on_the_field() {
    // The same structure constants: split over GF(5), not over Q.
    let out = run(&["pointed", &fixture("circle_q.json")]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("extension field"));

    let out = run(&["pointed", &fixture("circle_f5.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["data"]["pointed"], true);
    assert_eq!(v["data"]["setlikes"].as_array().unwrap().len(), 2);
}
