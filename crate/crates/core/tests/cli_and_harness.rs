use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use sectorial::harness::{
    verify_area_equivalence, verify_hinfty_characterization, verify_square_equivalence, Construction, SuiteContext,
    TestOperator, Workbench,
};
use sectorial::symbols;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sectorial"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_inputs(dir: &Path) {
    std::fs::write(dir.join("a.json"), r#"{"n": 2, "entries": [[1, 0], [0, 0], [0, 0], [3, 0]]}"#).unwrap();
    std::fs::write(dir.join("j.json"), r#"{"n": 2, "entries": [[2, 0], [1, 0], [0, 0], [2, 0]]}"#).unwrap();
    std::fs::write(dir.join("x.json"), r#"{"n": 2, "entries": [[0.6, 0], [0, 0.8]]}"#).unwrap();
}

fn ctx(samples: usize) -> SuiteContext {
    SuiteContext {
        samples,
        seed: 7,
        tol: 1e-8,
        c_max: None,
    }
}

fn diag() -> TestOperator {
    TestOperator::build(Construction::PositiveDiagonal(vec![1.0, 2.0, 4.0]))
}

#[test]
fn minimal_truncation_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.json"),
        r#"{"suites": ["truncation"], "operators": ["positive-diagonal:1,2,4"], "symbols": ["Gk:1"], "samples": 1}"#,
    )
    .unwrap();
    let out = run(&["verify", "--config", "c.json", "--out", "out"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/cases.csv")).unwrap();
    assert!(csv.lines().count() > 9);
    assert!(csv.starts_with("suite,operator,symbol,alpha,beta,epsilon,delta,sample_id,lhs,rhs,bound,ratio,pass\n"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn malformed_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"suites": ["truncation"], "samples": "many"}"#).unwrap();
    let out = run(&["verify", "--config", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "--config", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_sectorial_prints_certificate() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path());
    let v = json(&run(&["check-sectorial", "--matrix", "a.json", "--resolution", "0.01", "--grid", "50"], dir.path()));
    assert_eq!(v["omega"], 0.0);
    assert_eq!(v["k_table"].as_array().unwrap().len(), 7);
}

#[test]
fn fcalc_reports_oracle_difference() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path());
    let v = json(&run(&["fcalc", "--matrix", "j.json", "--symbol", "phi", "--oracle"], dir.path()));
    assert_eq!(v["oracle"]["oracle"], "jordan");
    assert!(v["oracle"]["difference"].as_f64().unwrap() < 1e-8);
    let entries = v["result"]["matrix"]["entries"].as_array().unwrap();
    assert!((entries[1][0].as_f64().unwrap() + 1.0 / 27.0).abs() < 1e-8);
    let bad = run(&["fcalc", "--matrix", "j.json", "--symbol", "nope"], dir.path());
    assert!(!bad.status.success());
}

#[test]
fn square_and_area_commands() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path());
    let v = json(&run(&["square", "--matrix", "a.json", "--symbol", "Gk:1", "--x", "x.json"], dir.path()));
    assert!((v["value"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-7);
    let v = json(&run(
        &["area", "--matrix", "a.json", "--symbol", "Gk:1", "--x", "x.json", "--alpha", "0.7853981633974483", "--adjoint"],
        dir.path(),
    ));
    assert!((v["value"]["value"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-6);
    let v = json(&run(
        &["square", "--matrix", "a.json", "--symbol", "Gk:1", "--x", "x.json", "--epsilon", "1e6"],
        dir.path(),
    ));
    assert!(v["value"]["value"].as_f64().unwrap() < 1e-12);
}

#[test]
fn square_equivalence_examples() {
    let jordan = TestOperator::build(Construction::Jordan(2.0));
    let mut bench = Workbench::new(vec![diag(), jordan], ctx(20), &[]).unwrap();
    let g1 = symbols::from_name("Gk:1").unwrap();
    let g2 = symbols::from_name("Gk:2").unwrap();
    let same = verify_square_equivalence(&mut bench, &g1, &g1).unwrap();
    assert!(same.cases.iter().all(|c| (c.ratio - 1.0).abs() < 1e-12));
    // kappa_{G1} = 1/2 and kappa_{G2}^2 = int u^3 e^{-2u} du = 3/8
    let r = verify_square_equivalence(&mut bench, &g1, &g2).unwrap();
    let expected = 0.5 / (3.0f64 / 8.0).sqrt();
    for c in r.cases.iter().filter(|c| c.operator.starts_with("positive-diagonal")) {
        assert!((c.ratio - expected).abs() < 1e-6 * expected);
    }
    let jordan: Vec<f64> = r.cases.iter().filter(|c| c.operator == "jordan:2").map(|c| c.ratio).collect();
    assert_eq!(jordan.len(), 20);
    let (lo, hi) = jordan.iter().fold((f64::MAX, 0.0f64), |(l, h), &q| (l.min(q), h.max(q)));
    assert!(lo > 0.0 && hi.is_finite() && hi / lo < 2.0);
}

#[test]
fn area_equivalence_examples() {
    let mut bench = Workbench::new(vec![diag()], ctx(10), &[]).unwrap();
    let g1 = symbols::from_name("Gk:1").unwrap();
    let alpha = PI / 5.0;
    let r = verify_area_equivalence(&mut bench, &g1, &g1, alpha, alpha, true).unwrap();
    let expected_mixed = 2.0 * (alpha.tan() / 2.0).sqrt();
    for c in &r.cases {
        if c.symbol == "Gk:1/Gk:1" {
            assert!((c.ratio - 1.0).abs() < 1e-12);
        } else if c.symbol.ends_with(":square") {
            assert!((c.ratio - expected_mixed).abs() < 1e-5 * expected_mixed);
        } else {
            // on a positive spectrum |f_s(z lambda)| <= e^{|s| alpha} < sup |f_s|
            assert!(c.symbol.starts_with("fs:"));
            assert!(c.ratio <= 1.0 + 1e-6);
        }
    }
    assert_eq!(r.constants.iter().filter(|c| c.name.starts_with("K_weighted")).count(), 2);
}

#[test]
fn hinfty_constants_on_jordan_block_are_finite() {
    let jordan = TestOperator::build(Construction::Jordan(2.0));
    let mut bench = Workbench::new(vec![jordan], ctx(10), &[]).unwrap();
    let g1 = symbols::from_name("Gk:1").unwrap();
    let r = verify_hinfty_characterization(&mut bench, &g1, &[PI / 6.0]).unwrap();
    for name in ["C_square", "C_square_adjoint"] {
        let v = r.constant(name, "jordan:2").unwrap();
        assert!(v.is_finite() && v >= 1.0 - 1e-9, "{name} = {v}");
    }
    let k = r.constant("K_emp", "jordan:2").unwrap();
    assert!(k.is_finite() && k > 0.0);
    assert!(r.constant(&format!("C_area@{:.6}", PI / 6.0), "jordan:2").unwrap().is_finite());
}
