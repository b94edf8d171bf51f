use std::path::PathBuf;

use hitsymp::bonahon_dreyer::{rotation_check, triple_ratio};
use hitsymp::harness::io::{
    flags_from_json, flags_to_json, read_representation, representation_from_json, representation_to_json,
    write_representation,
};
use hitsymp::harness::{run_suite, Suite, SuiteConfig};
use hitsymp::Error;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

#[test]
fn representation_fixtures_roundtrip_byte_identically() {
    for name in ["genus2.json", "pants.json", "torus.json"] {
        let text = read(name);
        let rep = representation_from_json(&text).unwrap();
        assert_eq!(representation_to_json(&rep), text, "{name}");
        assert!(rep.relator_residual() < 1e-10, "{name}");
    }
}

#[test]
fn flag_fixtures_roundtrip_byte_identically() {
    for name in ["flags_triple.json", "flags_quadruple.json"] {
        let text = read(name);
        let flags = flags_from_json(&text).unwrap();
        assert_eq!(flags_to_json(&flags), text, "{name}");
    }
}

#[test]
fn triple_fixture_is_fuchsian() {
    let f = flags_from_json(&read("flags_triple.json")).unwrap();
    let t = triple_ratio(&f[0], &f[1], &f[2], 1, 1, 1).unwrap();
    assert!((t - 1.0).abs() < 1e-8, "{t}");
    assert!(rotation_check(&f[0], &f[1], &f[2]).unwrap() < 1e-9);
}

#[test]
fn malformed_fixture_names_the_field() {
    match representation_from_json(&read("malformed.json")) {
        Err(Error::Schema { field, .. }) => assert_eq!(field, "images[1][2]"),
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn file_helpers_write_what_they_read() {
    let rep = read_representation(&fixture("pants.json")).unwrap();
    let out = std::env::temp_dir().join(format!("hitsymp-harness-{}.json", std::process::id()));
    write_representation(&out, &rep).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), read("pants.json"));
    std::fs::remove_file(out).ok();
}

#[test]
fn reports_are_deterministic() {
    let cfg = SuiteConfig::with_seed(42);
    for suite in [Suite::Fox, Suite::Bd, Suite::Decomposition] {
        let a = run_suite(suite, &cfg).unwrap().to_json();
        let b = run_suite(suite, &cfg).unwrap().to_json();
        assert_eq!(a, b, "{}", suite.name());
    }
}

#[test]
fn different_seeds_give_different_trials() {
    let a = run_suite(Suite::Bd, &SuiteConfig::with_seed(1)).unwrap();
    let b = run_suite(Suite::Bd, &SuiteConfig::with_seed(2)).unwrap();
    assert_ne!(a.checks, b.checks);
}

#[test]
fn records_are_sorted_and_consistent() {
    let report = run_suite(Suite::All, &SuiteConfig::default()).unwrap();
    assert!(report.passed(), "{report}");
    assert!(report.errors.is_empty());
    assert!(report.checks.windows(2).all(|w| w[0].name <= w[1].name));
    assert!(report.checks.iter().all(|c| c.consistent()));
    let names: Vec<_> = report.checks.iter().map(|c| c.name.as_str()).collect();
    for prefix in ["fox.", "pairing.", "decomposition.", "moment.", "bd.", "aa."] {
        assert!(names.iter().any(|n| n.starts_with(prefix)), "{prefix}");
    }
}

#[test]
fn tightened_tolerance_fails_the_suite() {
    let mut cfg = SuiteConfig::default();
    cfg.set_tolerance("bd.rotation=0").unwrap();
    cfg.set_tolerance("bd.swap=0").unwrap();
    let report = run_suite(Suite::Bd, &cfg).unwrap();
    let worst = report.checks.iter().filter(|c| c.name.starts_with("bd.rotation") || c.name.starts_with("bd.swap"));
    assert!(worst.clone().any(|c| !c.pass), "{report}");
    assert!(worst.clone().all(|c| c.tolerance == 0.0));
}

#[test]
fn bad_configs_are_rejected() {
    let mut cfg = SuiteConfig::default();
    assert!(cfg.set_tolerance("no.such.check=1").is_err());
    assert!(cfg.set_tolerance("bd.rotation=-1").is_err());
    assert!(cfg.set_tolerance("bd.rotation").is_err());
    cfg.n = 1;
    assert!(cfg.validate().is_err());
}

#[test]
fn report_json_parses_back() {
    let report = run_suite(Suite::Fox, &SuiteConfig::with_seed(3)).unwrap();
    let back: hitsymp::harness::Report = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.schema, 1);
}
