//! Verification suites over the operator catalog.

use std::collections::HashMap;
use std::path::Path;

use num_complex::Complex64;

use super::catalog::{resolve_operators, TestOperator};
use super::config::ExperimentConfig;
use super::report::{Case, Constant, ExperimentReport, Skipped, VerificationReport};
use crate::error::{Error, Result};
use crate::funcalc;
use crate::linalg::{adjoint, operator_norm, ComplexMatrix};
use crate::quadratic::{self, truncation_constant, sample_vectors, QuadraticSpec};
use crate::quadrature::QuadratureSpec;
use crate::sector::{certify, SectorialCertificate};
use crate::symbols::{self, make_fs, Symbol, FS_DEFAULT_ANGLE};

/// Symbols over which the empirical calculus constant is maximized.
pub const K_EMP_SYMBOLS: [&str; 7] = ["phi", "Gk:1", "Gk:2", "fs:1", "fs:2", "semigroup:1", "resolvent:-1,0"];
/// Slack allowed above the contractive bound on self-adjoint operators.
pub const CONTRACTIVE_SLACK: f64 = 1e-6;
/// Slack allowed above the truncation constant.
pub const TRUNCATION_SLACK: f64 = 1e-4;
/// Multipliers `f_s` used for the weighted area functional.
pub const WEIGHTED_POWERS: [f64; 2] = [1.0, 2.0];

/// Shared run parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteContext {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub c_max: Option<f64>,
}

impl SuiteContext {
    pub fn from_config(config: &ExperimentConfig) -> Self {
        SuiteContext {
            samples: config.samples,
            seed: config.seed,
            tol: config.tol,
            c_max: config.c_max,
        }
    }

    fn spec(&self) -> QuadraticSpec {
        QuadraticSpec::with_tol(self.tol)
    }

    fn within_c_max(&self, ratio: f64) -> bool {
        ratio.is_finite()
            && ratio >= 0.0
            && self.c_max.is_none_or(|c| ratio <= c * (1.0 + 1e-12) && ratio * c >= 1.0 - 1e-12)
    }
}

/// A catalog member with its certificate and sample vectors.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub op: TestOperator,
    pub cert: SectorialCertificate,
    pub adjoint: ComplexMatrix,
    pub xs: Vec<Vec<Complex64>>,
}

impl Prepared {
    pub fn new(op: TestOperator, ctx: &SuiteContext) -> Result<Self> {
        let cert = certify(&op.matrix)?;
        let xs = sample_vectors(op.matrix.dim(), ctx.samples, ctx.seed);
        let adjoint = adjoint(&op.matrix);
        Ok(Prepared { op, cert, adjoint, xs })
    }

    fn matrix(&self, adjoint: bool) -> &ComplexMatrix {
        if adjoint {
            &self.adjoint
        } else {
            &self.op.matrix
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    op: usize,
    symbol: String,
    /// Aperture bits; `None` for square functions.
    alpha: Option<u64>,
    truncation: Option<u64>,
    adjoint: bool,
}

/// Square and area function values for the prepared operators, computed on
/// demand and cached so that suites share them.
pub struct Workbench {
    pub ops: Vec<Prepared>,
    pub ctx: SuiteContext,
    /// Square-function truncations computed alongside any requested one.
    epsilons: Vec<f64>,
    cache: HashMap<Key, Vec<f64>>,
}

fn truncation_bits(t: Option<f64>) -> Option<u64> {
    t.map(f64::to_bits)
}

impl Workbench {
    /// `epsilons` are the truncations of the truncation suite; they are
    /// computed together with any other request on the same radial nodes.
    pub fn new(ops: Vec<TestOperator>, ctx: SuiteContext, epsilons: &[f64]) -> Result<Self> {
        let ops = ops.into_iter().map(|op| Prepared::new(op, &ctx)).collect::<Result<_>>()?;
        Ok(Workbench {
            ops,
            ctx,
            epsilons: epsilons.to_vec(),
            cache: HashMap::new(),
        })
    }

    fn group(&self, requested: Option<f64>, alpha: Option<f64>) -> Vec<Option<f64>> {
        let mut out = vec![requested];
        let shrink = alpha.map_or(1.0, |a| 1.0 - a.sin());
        if !self.epsilons.is_empty() {
            out.push(None);
            out.extend(self.epsilons.iter().map(|e| Some(e * shrink)));
        }
        let mut seen = Vec::new();
        out.retain(|t| {
            let fresh = !seen.contains(t);
            seen.push(*t);
            fresh
        });
        out
    }

    /// `||x||_F` (or `G_epsilon(F)(x)`) for every sample of operator `op`.
    pub fn square(&mut self, op: usize, f: &Symbol, epsilon: Option<f64>, adjoint: bool) -> Result<Vec<f64>> {
        let key = |t: Option<f64>| Key {
            op,
            symbol: f.label().to_string(),
            alpha: None,
            truncation: truncation_bits(t),
            adjoint,
        };
        if let Some(v) = self.cache.get(&key(epsilon)) {
            return Ok(v.clone());
        }
        let group = self.group(epsilon, None);
        let p = &self.ops[op];
        let values =
            quadratic::square_function_multi(p.matrix(adjoint), &p.cert, f, &p.xs, &group, &self.ctx.spec())?;
        for (t, vals) in group.iter().zip(values) {
            self.cache.insert(key(*t), vals.iter().map(|v| v.value).collect());
        }
        Ok(self.cache[&key(epsilon)].clone())
    }

    /// `||x||_{F,alpha}` (or `S_{alpha,delta}(F)(x)`) for every sample of operator `op`.
    pub fn area(
        &mut self,
        op: usize,
        f: &Symbol,
        alpha: f64,
        delta: Option<f64>,
        adjoint: bool,
    ) -> Result<Vec<f64>> {
        let key = |t: Option<f64>| Key {
            op,
            symbol: f.label().to_string(),
            alpha: Some(alpha.to_bits()),
            truncation: truncation_bits(t),
            adjoint,
        };
        if let Some(v) = self.cache.get(&key(delta)) {
            return Ok(v.clone());
        }
        let group = if adjoint { vec![delta] } else { self.group(delta, Some(alpha)) };
        let p = &self.ops[op];
        let values = quadratic::area_function_multi(
            p.matrix(adjoint),
            &p.cert,
            f,
            &p.xs,
            alpha,
            &group,
            None,
            &self.ctx.spec(),
        )?;
        for (t, vals) in group.iter().zip(values) {
            self.cache.insert(key(*t), vals.iter().map(|v| v.value).collect());
        }
        Ok(self.cache[&key(delta)].clone())
    }

    /// `(\int_{Sigma_alpha} ||f(A) F(zA) x||^2 dm(z)/|z|^2)^{1/2}` for every sample.
    pub fn weighted_area(&mut self, op: usize, f: &Symbol, big_f: &Symbol, alpha: f64) -> Result<Vec<f64>> {
        let p = &self.ops[op];
        let quad = QuadratureSpec::with_tol(self.ctx.tol / 10.0);
        let b = funcalc::apply(&p.op.matrix, &p.cert, f, None, &quad)?.matrix;
        let values = quadratic::area_function_batch(
            &p.op.matrix,
            &p.cert,
            big_f,
            &p.xs,
            alpha,
            None,
            Some(b),
            &self.ctx.spec(),
        )?;
        Ok(values.iter().map(|v| v.value).collect())
    }

    fn admissible(&self, op: usize, f: &Symbol, alpha: f64) -> bool {
        quadratic::check_alpha(&self.ops[op].cert, f, alpha).is_ok()
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 && rhs == 0.0 {
        1.0
    } else {
        lhs / rhs
    }
}

/// `max(r, 1/r)` over the ratios.
fn spread(ratios: impl IntoIterator<Item = f64>) -> f64 {
    ratios.into_iter().fold(1.0, |acc, r| acc.max(r).max(1.0 / r))
}

fn skipped(report: &mut VerificationReport, p: &Prepared, f: &Symbol, alpha: f64) {
    report.skipped.push(Skipped {
        operator: p.op.name.clone(),
        symbol: f.label().to_string(),
        reason: format!(
            "aperture {alpha} not below {:.6}",
            quadratic::max_alpha(&p.cert, f)
        ),
    });
}

/// Ratios `||x||_F / ||x||_G` per operator and sample.
pub fn verify_square_equivalence(bench: &mut Workbench, f: &Symbol, g: &Symbol) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("square-equivalence");
    let ctx = bench.ctx;
    let pair = format!("{}/{}", f.label(), g.label());
    for op in 0..bench.ops.len() {
        let lhs = bench.square(op, f, None, false)?;
        let rhs = bench.square(op, g, None, false)?;
        let name = bench.ops[op].op.name.clone();
        let mut ratios = Vec::new();
        for (i, (&l, &r)) in lhs.iter().zip(&rhs).enumerate() {
            let q = ratio(l, r);
            ratios.push(q);
            report.cases.push(Case {
                suite: report.suite.clone(),
                operator: name.clone(),
                symbol: pair.clone(),
                alpha: None,
                beta: None,
                epsilon: None,
                delta: None,
                sample_id: Some(i),
                lhs: l,
                rhs: r,
                bound: ctx.c_max,
                ratio: q,
                pass: ctx.within_c_max(q),
            });
        }
        report.constants.push(Constant {
            name: "C_square_equivalence".into(),
            operator: name,
            symbol: pair.clone(),
            value: spread(ratios),
        });
    }
    Ok(report)
}

/// Ratios `||x||_{F,alpha} / ||x||_{G,beta}`, the mixed ratios
/// `||x||_{F,alpha} / ||x||_G` and the weighted functional with `f = f_s`.
pub fn verify_area_equivalence(
    bench: &mut Workbench,
    f: &Symbol,
    g: &Symbol,
    alpha: f64,
    beta: f64,
    weighted: bool,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("area-equivalence");
    let ctx = bench.ctx;
    let pair = format!("{}/{}", f.label(), g.label());
    for op in 0..bench.ops.len() {
        let p = bench.ops[op].clone();
        if !bench.admissible(op, f, alpha) {
            skipped(&mut report, &p, f, alpha);
            continue;
        }
        if !bench.admissible(op, g, beta) {
            skipped(&mut report, &p, g, beta);
            continue;
        }
        let lhs = bench.area(op, f, alpha, None, false)?;
        let rhs = bench.area(op, g, beta, None, false)?;
        let square = bench.square(op, g, None, false)?;
        let mut ratios = Vec::new();
        let mut mixed = Vec::new();
        for (i, ((&l, &r), &sq)) in lhs.iter().zip(&rhs).zip(&square).enumerate() {
            let q = ratio(l, r);
            ratios.push(q);
            report.cases.push(Case {
                suite: report.suite.clone(),
                operator: p.op.name.clone(),
                symbol: pair.clone(),
                alpha: Some(alpha),
                beta: Some(beta),
                epsilon: None,
                delta: None,
                sample_id: Some(i),
                lhs: l,
                rhs: r,
                bound: ctx.c_max,
                ratio: q,
                pass: ctx.within_c_max(q),
            });
            let m = ratio(l, sq);
            mixed.push(m);
            report.cases.push(Case {
                suite: report.suite.clone(),
                operator: p.op.name.clone(),
                symbol: format!("{}/{}:square", f.label(), g.label()),
                alpha: Some(alpha),
                beta: None,
                epsilon: None,
                delta: None,
                sample_id: Some(i),
                lhs: l,
                rhs: sq,
                bound: ctx.c_max,
                ratio: m,
                pass: ctx.within_c_max(m),
            });
        }
        report.constants.push(Constant {
            name: format!("C_area_equivalence@{alpha:.6},{beta:.6}"),
            operator: p.op.name.clone(),
            symbol: pair.clone(),
            value: spread(ratios),
        });
        report.constants.push(Constant {
            name: format!("C_area_square@{alpha:.6}"),
            operator: p.op.name.clone(),
            symbol: pair.clone(),
            value: spread(mixed),
        });
        if !weighted {
            continue;
        }
        for s in WEIGHTED_POWERS {
            let fs = make_fs(s, FS_DEFAULT_ANGLE)?;
            let values = bench.weighted_area(op, &fs, f, alpha)?;
            let sup = fs.sup_norm().value;
            let label = format!("fs:{s}*{}/{}", f.label(), g.label());
            let mut worst: f64 = 0.0;
            for (i, (&l, &r)) in values.iter().zip(&rhs).enumerate() {
                let q = ratio(l, sup * r);
                worst = worst.max(q);
                report.cases.push(Case {
                    suite: report.suite.clone(),
                    operator: p.op.name.clone(),
                    symbol: label.clone(),
                    alpha: Some(alpha),
                    beta: Some(beta),
                    epsilon: None,
                    delta: None,
                    sample_id: Some(i),
                    lhs: l,
                    rhs: sup * r,
                    bound: None,
                    ratio: q,
                    pass: q.is_finite(),
                });
            }
            report.constants.push(Constant {
                name: format!("K_weighted@s={s}"),
                operator: p.op.name.clone(),
                symbol: label,
                value: worst,
            });
        }
    }
    Ok(report)
}

/// `max ||f(A)|| / ||f||_sup` over [`K_EMP_SYMBOLS`], with the per-symbol ratios.
pub fn k_emp(a: &ComplexMatrix, cert: &SectorialCertificate, tol: f64) -> Result<(f64, Vec<(String, f64, f64)>)> {
    let quad = QuadratureSpec::with_tol(tol);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for name in K_EMP_SYMBOLS {
        let f = symbols::from_name(name)?;
        let value = operator_norm(&funcalc::apply(a, cert, &f, None, &quad)?.matrix);
        let sup = f.sup_norm().value;
        worst = worst.max(value / sup);
        rows.push((name.to_string(), value, sup));
    }
    Ok((worst, rows))
}

/// Measures `C_square` and `C_area` for `A` and `A*` against `||x||`, and the
/// empirical calculus constant `K_emp`.
pub fn verify_hinfty_characterization(
    bench: &mut Workbench,
    f: &Symbol,
    alphas: &[f64],
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("hinfty");
    let ctx = bench.ctx;
    for op in 0..bench.ops.len() {
        let p = bench.ops[op].clone();
        let norms: Vec<f64> = p.xs.iter().map(|x| crate::linalg::vector_norm(x)).collect();
        let push_rows = |report: &mut VerificationReport, values: &[f64], symbol: String, alpha: Option<f64>| {
            let mut ratios = Vec::new();
            for (i, (&v, &n)) in values.iter().zip(&norms).enumerate() {
                let q = ratio(v, n);
                ratios.push(q);
                report.cases.push(Case {
                    suite: report.suite.clone(),
                    operator: p.op.name.clone(),
                    symbol: symbol.clone(),
                    alpha,
                    beta: None,
                    epsilon: None,
                    delta: None,
                    sample_id: Some(i),
                    lhs: v,
                    rhs: n,
                    bound: ctx.c_max,
                    ratio: q,
                    pass: ctx.within_c_max(q),
                });
            }
            spread(ratios)
        };
        for adjoint in [false, true] {
            let suffix = if adjoint { "_adjoint" } else { "" };
            let label = if adjoint { format!("{}*", f.label()) } else { f.label().to_string() };
            let sq = bench.square(op, f, None, adjoint)?;
            let c = push_rows(&mut report, &sq, label.clone(), None);
            report.constants.push(Constant {
                name: format!("C_square{suffix}"),
                operator: p.op.name.clone(),
                symbol: f.label().to_string(),
                value: c,
            });
            for &alpha in alphas {
                if !bench.admissible(op, f, alpha) {
                    skipped(&mut report, &p, f, alpha);
                    continue;
                }
                let area = bench.area(op, f, alpha, None, adjoint)?;
                let c = push_rows(&mut report, &area, label.clone(), Some(alpha));
                report.constants.push(Constant {
                    name: format!("C_area{suffix}@{alpha:.6}"),
                    operator: p.op.name.clone(),
                    symbol: f.label().to_string(),
                    value: c,
                });
            }
        }
        let (k, rows) = k_emp(&p.op.matrix, &p.cert, ctx.tol)?;
        let bound = p.op.is_self_adjoint().then_some(1.0 + CONTRACTIVE_SLACK);
        for (name, value, sup) in rows {
            let q = value / sup;
            report.cases.push(Case {
                suite: report.suite.clone(),
                operator: p.op.name.clone(),
                symbol: name,
                alpha: None,
                beta: None,
                epsilon: None,
                delta: None,
                sample_id: None,
                lhs: value,
                rhs: sup,
                bound,
                ratio: q,
                pass: q.is_finite() && bound.is_none_or(|b| q <= b),
            });
        }
        report.constants.push(Constant {
            name: "K_emp".into(),
            operator: p.op.name.clone(),
            symbol: K_EMP_SYMBOLS.join(","),
            value: k,
        });
    }
    Ok(report)
}

/// Ratios `G_epsilon(F)(x) / S_{alpha, epsilon (1 - sin alpha)}(F)(x)` against
/// `2 / sqrt(pi sin alpha)`.
pub fn verify_truncation_comparison(
    bench: &mut Workbench,
    f: &Symbol,
    alphas: &[f64],
    epsilons: &[f64],
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("truncation");
    for op in 0..bench.ops.len() {
        let p = bench.ops[op].clone();
        for &alpha in alphas {
            if !bench.admissible(op, f, alpha) {
                skipped(&mut report, &p, f, alpha);
                continue;
            }
            let bound = truncation_constant(alpha);
            for &eps in epsilons {
                let delta = eps * (1.0 - alpha.sin());
                let lhs = bench.square(op, f, Some(eps), false)?;
                let rhs = bench.area(op, f, alpha, Some(delta), false)?;
                for (i, (&l, &r)) in lhs.iter().zip(&rhs).enumerate() {
                    let q = if l == 0.0 && r == 0.0 { 0.0 } else { l / r };
                    report.cases.push(Case {
                        suite: report.suite.clone(),
                        operator: p.op.name.clone(),
                        symbol: f.label().to_string(),
                        alpha: Some(alpha),
                        beta: None,
                        epsilon: Some(eps),
                        delta: Some(delta),
                        sample_id: Some(i),
                        lhs: l,
                        rhs: r,
                        bound: Some(bound),
                        ratio: q,
                        pass: q <= bound + TRUNCATION_SLACK,
                    });
                }
            }
        }
    }
    Ok(report)
}

fn parse_symbols(names: &[String]) -> Result<Vec<Symbol>> {
    names
        .iter()
        .map(|n| symbols::from_name(n).map_err(|e| Error::ConfigParse(format!("symbol {n:?}: {e}"))))
        .collect()
}

/// Runs every suite named in `config`, in the order given.
pub fn run_suites(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let ops = resolve_operators(&config.operators).map_err(|e| Error::ConfigParse(e.to_string()))?;
    let syms = parse_symbols(&config.symbols)?;
    let ctx = SuiteContext::from_config(config);
    let truncation = config.suites.iter().any(|s| s == "truncation");
    let mut bench = Workbench::new(ops, ctx, if truncation { &config.epsilons } else { &[] })?;
    let f = &syms[0];
    let others: Vec<&Symbol> = if syms.len() > 1 { syms[1..].iter().collect() } else { vec![f] };
    let mut reports = Vec::new();
    for suite in &config.suites {
        match suite.as_str() {
            "square-equivalence" => {
                for g in &others {
                    reports.push(verify_square_equivalence(&mut bench, f, g)?);
                }
            }
            "area-equivalence" => {
                for (gi, g) in others.iter().enumerate() {
                    for (ai, &alpha) in config.alphas.iter().enumerate() {
                        for (bi, &beta) in config.betas.iter().enumerate() {
                            let weighted = gi == 0 && ai == 0 && bi == 0;
                            reports.push(verify_area_equivalence(&mut bench, f, g, alpha, beta, weighted)?);
                        }
                    }
                }
            }
            "hinfty" => reports.push(verify_hinfty_characterization(&mut bench, f, &config.alphas)?),
            "truncation" => {
                for g in &syms {
                    reports.push(verify_truncation_comparison(&mut bench, g, &config.alphas, &config.epsilons)?);
                }
            }
            other => return Err(Error::ConfigParse(format!("unknown suite {other:?}"))),
        }
    }
    Ok(ExperimentReport::new(config.clone(), reports))
}

/// Loads the config, runs it and writes `report.json` and `cases.csv` to `out_dir`.
pub fn run_experiment(config_path: impl AsRef<Path>, out_dir: impl AsRef<Path>) -> Result<ExperimentReport> {
    let config = ExperimentConfig::load(config_path)?;
    let report = run_suites(&config)?;
    report.write_to(out_dir)?;
    Ok(report)
}

/// `0` when every case passes, `1` on failed cases, `2` for config errors and
/// `3` for any other error.
pub fn exit_code(outcome: &Result<ExperimentReport>) -> i32 {
    match outcome {
        Ok(report) if report.passed => 0,
        Ok(_) => 1,
        Err(Error::ConfigParse(_)) => 2,
        Err(_) => 3,
    }
}
