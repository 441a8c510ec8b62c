mod common;

use std::path::PathBuf;

use common::oracle::{evaluate, oracle, random_function};
use common::rng;
use jets::frontend::{builtin_names, builtin_source, parse_session, render_reports, run_session, Format};
use jets::jetcore::render_poly;
use jets::{DiffPoly, Value};

fn skew_non_hamiltonian_residual() -> DiffPoly {
    let s = parse_session(builtin_source("skew_non_hamiltonian").unwrap()).unwrap();
    let outcome = run_session(&s, None).unwrap().remove(0);
    assert!(!outcome.report.passed());
    match outcome.report.residual_value("hamiltonian_identity") {
        Some(Value::Polys(v)) => v[0].clone(),
        other => panic!("unexpected residual {other:?}"),
    }
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Compare against a committed file; `JETS_BLESS=1` rewrites it instead.
fn assert_golden(name: &str, actual: &str) {
    let path = golden_dir().join(name);
    if std::env::var("JETS_BLESS").is_ok_and(|v| v == "1") {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} differs from the committed golden file");
}

#[test]
fn skew_non_hamiltonian_residual_matches_brute_force_expansion() {
    let residual = skew_non_hamiltonian_residual();
    assert!(!residual.is_zero());
    let mut r = rng(99);
    let mut nonzero_seen = false;
    for _ in 0..50 {
        let (w, p, q) = (random_function(&mut r), random_function(&mut r), random_function(&mut r));
        let expected = oracle(&w, &p, &q);
        nonzero_seen |= !expected.0.is_empty();
        assert_eq!(evaluate(&residual, &w, &p, &q), expected);
    }
    assert!(nonzero_seen);
}

#[test]
fn skew_non_hamiltonian_residual_matches_golden_file() {
    let residual = skew_non_hamiltonian_residual();
    let bases = vec!["x".to_string()];
    assert_golden("skew_non_hamiltonian.txt", &format!("{}\n", render_poly(&residual, &bases)));
}

#[test]
fn builtin_sessions_reproduce_recorded_verdicts() {
    for name in builtin_names() {
        let s = parse_session(builtin_source(name).unwrap()).unwrap();
        assert!(!s.checks.is_empty(), "{name}");
        for o in run_session(&s, None).unwrap() {
            assert!(o.as_expected(), "{name}: {} gave {}", o.check.label(), o.verdict().as_str());
        }
    }
}

#[test]
fn builtin_json_reports_match_golden_files() {
    for name in builtin_names() {
        let s = parse_session(builtin_source(name).unwrap()).unwrap();
        let json = render_reports(&run_session(&s, None).unwrap(), Format::Json);
        assert_golden(&format!("{name}.json"), &json);
    }
}
