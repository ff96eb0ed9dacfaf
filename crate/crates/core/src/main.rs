use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use sectorial::funcalc::{self, CalculusReport, QuadratureSpec};
use sectorial::harness::{exit_code, run_experiment};
use sectorial::quadratic::{self, QuadraticSpec};
use sectorial::sector::{self, RadiusGrid};
use sectorial::{io, linalg, symbols, Result};

#[derive(Parser)]
#[command(name = "sectorial", version, about = "Functional calculus and quadratic estimates for sectorial matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the sectoriality angle and resolvent constants.
    CheckSectorial {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        /// Radii per ray in the resolvent scan.
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Compute f(A) by the contour calculus.
    Fcalc {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        symbol: String,
        /// Contour half-angle; defaults to midway between omega and the symbol's angle.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Half-angle of the symbol's domain, overriding the registry default.
        #[arg(long)]
        theta: Option<f64>,
        /// Also compare against the spectral (or 2x2 Jordan) oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Square function of each sample vector.
    Square {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Area integral function of a vector.
    Area {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        delta: Option<f64>,
        /// Use the adjoint matrix.
        #[arg(long)]
        adjoint: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Run verification suites from a config file.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "verify-out")]
        out: PathBuf,
    },
}

fn print(value: serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::CheckSectorial { matrix, resolution, grid } => {
            let a = io::read_matrix(matrix)?;
            let cert = sector::estimate_type(&a, resolution, &RadiusGrid::with_points(grid))?;
            print(serde_json::to_value(cert)?)
        }
        Command::Fcalc { matrix, symbol, gamma, tol, theta, oracle } => {
            let a = io::read_matrix(matrix)?;
            let f = symbols::from_name_with_angle(&symbol, theta)?;
            let cert = sector::certify(&a)?;
            let result = funcalc::apply(&a, &cert, &f, gamma, &QuadratureSpec::with_tol(tol))?;
            let mut out = json!({ "symbol": f.label(), "result": CalculusReport::from(&result) });
            if oracle {
                out["oracle"] = serde_json::to_value(funcalc::oracle_comparison(&a, &f, &result.matrix)?)?;
            }
            print(out)
        }
        Command::Square { matrix, symbol, x, epsilon, tol } => {
            let a = io::read_matrix(matrix)?;
            let x = io::read_vector(x)?;
            let f = symbols::from_name(&symbol)?;
            let cert = sector::certify(&a)?;
            let spec = QuadraticSpec::with_tol(tol);
            let v = quadratic::square_function_batch(&a, &cert, &f, &[x], epsilon, &spec)?;
            print(json!({ "symbol": f.label(), "epsilon": epsilon, "value": v[0] }))
        }
        Command::Area { matrix, symbol, x, alpha, delta, adjoint, tol } => {
            let mut a = io::read_matrix(matrix)?;
            let x = io::read_vector(x)?;
            let f = symbols::from_name(&symbol)?;
            let cert = sector::certify(&a)?;
            if adjoint {
                a = linalg::adjoint(&a);
            }
            let spec = QuadraticSpec::with_tol(tol);
            let v = quadratic::area_function_batch(&a, &cert, &f, &[x], alpha, delta, None, &spec)?;
            print(json!({
                "symbol": f.label(),
                "alpha": alpha,
                "delta": delta,
                "adjoint": adjoint,
                "value": v[0],
            }))
        }
        Command::Verify { .. } => unreachable!("handled in main"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Verify { config, out } = cli.command {
        let outcome = run_experiment(&config, &out);
        match &outcome {
            Ok(report) => {
                for r in &report.reports {
                    let status = if r.passed() { "pass" } else { "FAIL" };
                    eprintln!("{status} {} ({} cases, {} failed)", r.suite, r.cases.len(), r.failures());
                }
                eprintln!("wrote {}", out.display());
            }
            Err(e) => eprintln!("error: {e}"),
        }
        return ExitCode::from(exit_code(&outcome) as u8);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
