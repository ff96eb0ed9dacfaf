//! A small verification run written to a temporary directory.

use sectorial::harness::{run_suites, ExperimentConfig};

fn main() -> sectorial::Result<()> {
    let config = ExperimentConfig::parse(
        r#"{
            "suites": ["square-equivalence", "area-equivalence", "truncation"],
            "operators": ["positive-diagonal:1,2,4", "jordan:2"],
            "symbols": ["Gk:1", "phi"],
            "alphas": [0.5235987755982988],
            "betas": [0.39269908169872414],
            "samples": 4
        }"#,
    )?;
    let report = run_suites(&config)?;
    for r in &report.reports {
        let symbol = r.cases.first().map_or("", |c| c.symbol.as_str());
        println!("{} [{symbol}]: {} cases, {} failed", r.suite, r.cases.len(), r.failures());
        for c in &r.constants {
            println!("  {:<28} {:<26} {:<12} {:.6}", c.name, c.operator, c.symbol, c.value);
        }
    }
    let dir = std::env::temp_dir().join("sectorial-verify-example");
    report.write_to(&dir)?;
    println!("passed = {}, written to {}", report.passed, dir.display());
    Ok(())
}
