//! Area integral functions over cones of several apertures, set against the
//! square function bound.

use std::f64::consts::PI;

use sectorial::harness::{Construction, TestOperator};
use sectorial::quadratic::{self, QuadraticSpec};
use sectorial::{sector, symbols};

fn main() -> sectorial::Result<()> {
    let spec = QuadraticSpec::with_tol(1e-8);
    let g1 = symbols::from_name("Gk:1")?;
    let op = TestOperator::build(Construction::RotatedNormal(PI / 6.0));
    let cert = sector::certify(&op.matrix)?;
    let x = quadratic::sample_vectors(op.matrix.dim(), 1, 3).remove(0);
    let square = quadratic::square_function(&op.matrix, &cert, &g1, &x, &spec)?.value;
    println!("{}: ||x||_G1 = {square:.10}", op.name);
    println!("  admissible apertures below {:.6}", quadratic::max_alpha(&cert, &g1));
    for alpha in [PI / 12.0, PI / 6.0, PI / 4.0] {
        let area = quadratic::area_function(&op.matrix, &cert, &g1, &x, alpha, &spec)?.value;
        let adj = quadratic::adjoint_area_function(&op.matrix, &cert, &g1, &x, alpha, &spec)?.value;
        let c = quadratic::truncation_constant(alpha);
        println!(
            "  alpha = {alpha:.4}: area = {area:.10}, adjoint = {adj:.10}, square <= {c:.4} * area: {}",
            square <= c * area
        );
    }
    Ok(())
}
