use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn hitsymp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitsymp")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("hitsymp-cli-{}-{name}", std::process::id()))
}

fn read_json(path: &Path) -> Value {
    let v = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    std::fs::remove_file(path).ok();
    v
}

#[test]
fn suite_run_passes_and_writes_a_report() {
    let out = scratch("fox.json");
    let o = hitsymp(&["--seed", "5", "--json", out.to_str().unwrap(), "suite", "run", "fox"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS fox.identity"));
    let report = read_json(&out);
    assert_eq!(report["schema"], 1);
    assert_eq!(report["suite"], "fox");
    assert_eq!(report["environment"]["config"]["seed"], 5);
    for c in report["checks"].as_array().unwrap() {
        let pass = c["defect"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap();
        assert_eq!(c["pass"].as_bool().unwrap(), pass);
    }
}

#[test]
fn failing_check_sets_exit_code() {
    let o = hitsymp(&["--tol", "bd.rotation=0", "--tol", "bd.swap=0", "suite", "run", "bd"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn bad_arguments_fail() {
    assert!(!hitsymp(&["suite", "run", "nope"]).status.success());
    assert!(!hitsymp(&["--tol", "nope=1", "suite", "run", "fox"]).status.success());
    assert!(!hitsymp(&["--tol", "bd.swap=-1", "suite", "run", "bd"]).status.success());
}

#[test]
fn rep_check_accepts_fixtures_and_names_bad_fields() {
    for name in ["genus2.json", "pants.json", "torus.json"] {
        let o = hitsymp(&["rep", "check", "--rep", &fixture(name)]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = hitsymp(&["rep", "check", "--rep", &fixture("malformed.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("images[1][2]"));
}

#[test]
fn generated_representation_roundtrips_through_check() {
    let out = scratch("rep.json");
    let path = out.to_str().unwrap();
    let o = hitsymp(&["--seed", "3", "rep", "generate", "--surface", "torus", "--out", path]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(&out).unwrap();
    assert!(hitsymp(&["rep", "check", "--rep", path]).status.success());
    let o = hitsymp(&["--seed", "3", "rep", "generate", "--surface", "torus", "--out", path]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);
    std::fs::remove_file(out).ok();
}

#[test]
fn bd_commands_read_flag_files() {
    let out = scratch("triple.json");
    let o = hitsymp(&["--json", out.to_str().unwrap(), "bd", "triple", "--flags", &fixture("flags_triple.json")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out);
    let t = v["triple_ratios"][0]["value"].as_f64().unwrap();
    assert!((t - 1.0).abs() < 1e-8);
    assert!(hitsymp(&["bd", "rotation", "--flags", &fixture("flags_triple.json")]).status.success());
    let o = hitsymp(&["bd", "double", "--flags", &fixture("flags_quadruple.json")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!hitsymp(&["bd", "double", "--flags", &fixture("flags_triple.json")]).status.success());
}

#[test]
fn cut_verify_reports_trials() {
    let out = scratch("cut.json");
    let o = hitsymp(&[
        "--trials", "3", "--json", out.to_str().unwrap(),
        "cut", "verify", "--kind", "nonseparating-genus2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out);
    assert_eq!(v["trials"].as_array().unwrap().len(), 3);
    assert_eq!(v["pass"], true);
}

#[test]
fn aa_verify_matches_the_sign() {
    for chart in ["canonical", "exponential", "coupled"] {
        let o = hitsymp(&["aa", "verify", "--chart", chart]);
        assert!(o.status.success(), "{chart}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert!(!hitsymp(&["aa", "verify", "--chart", "nope"]).status.success());
}

#[test]
fn same_seed_same_output() {
    let a = hitsymp(&["--seed", "9", "suite", "run", "bd"]);
    let b = hitsymp(&["--seed", "9", "suite", "run", "bd"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn words_accept_names_and_codes() {
    let rep = fixture("genus2.json");
    let by_name = hitsymp(&["rep", "invariants", "--rep", &rep, "--word", "x1 y1 X1 y1^-1"]);
    let by_code = hitsymp(&["rep", "invariants", "--rep", &rep, "--word", "1 2 -1 -2"]);
    assert!(by_name.status.success(), "{}", String::from_utf8_lossy(&by_name.stderr));
    assert_eq!(by_name.stdout, by_code.stdout);
    let bad = hitsymp(&["rep", "invariants", "--rep", &rep, "--word", "z1"]);
    assert_eq!(bad.status.code(), Some(1));
}
