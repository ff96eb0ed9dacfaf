//! Square functions and their truncations for a diagonal matrix and a Jordan block.

use sectorial::harness::{Construction, TestOperator};
use sectorial::quadratic::{self, QuadraticSpec};
use sectorial::{linalg, sector, symbols};

fn main() -> sectorial::Result<()> {
    let spec = QuadraticSpec::with_tol(1e-8);
    let g1 = symbols::from_name("Gk:1")?;
    for op in [
        TestOperator::build(Construction::PositiveDiagonal(vec![1.0, 2.0, 4.0])),
        TestOperator::build(Construction::Jordan(2.0)),
    ] {
        let cert = sector::certify(&op.matrix)?;
        let x = quadratic::sample_vectors(op.matrix.dim(), 1, 1).remove(0);
        let full = quadratic::square_function(&op.matrix, &cert, &g1, &x, &spec)?;
        println!("{}: |x| = {:.6}, ||x||_G1 = {:.10}", op.name, linalg::vector_norm(&x), full.value);
        for eps in [0.01, 0.1, 1.0] {
            let t = quadratic::square_function_truncated(&op.matrix, &cert, &g1, &x, eps, &spec)?;
            println!("  eps = {eps:<5} truncated = {:.10}", t.value);
        }
    }
    Ok(())
}
