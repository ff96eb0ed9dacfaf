//! Contour-integral functional calculus compared with the eigendecomposition
//! and, for a Jordan block, with the closed form.

use sectorial::harness::{Construction, TestOperator, DEFAULT_SEED};
use sectorial::quadrature::QuadratureSpec;
use sectorial::{funcalc, sector, symbols};

fn main() -> sectorial::Result<()> {
    let quad = QuadratureSpec::with_tol(1e-10);
    let ops = [
        TestOperator::build(Construction::RandomSectorial(DEFAULT_SEED)),
        TestOperator::build(Construction::Jordan(2.0)),
    ];
    for op in &ops {
        let cert = sector::certify(&op.matrix)?;
        for name in ["phi", "Gk:1", "Gk:3", "resolvent:-1,0"] {
            let f = symbols::from_name(name)?;
            let r = funcalc::apply(&op.matrix, &cert, &f, None, &quad)?;
            let cmp = funcalc::oracle_comparison(&op.matrix, &f, &r.matrix)?;
            println!(
                "{:<24} {:<16} nodes {:>5}  gamma {:.4}  |f(A) - {}| = {:.2e}",
                op.name, name, r.nodes_used, r.contour_angle_used, cmp.oracle, cmp.difference
            );
        }
    }
    Ok(())
}
