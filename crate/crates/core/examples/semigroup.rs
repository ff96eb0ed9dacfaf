//! Imaginary powers and the analytic semigroup of a rotated normal matrix.

use std::f64::consts::PI;

use num_complex::Complex64;
use sectorial::harness::{Construction, TestOperator};
use sectorial::quadrature::QuadratureSpec;
use sectorial::{funcalc, linalg, sector};

fn main() -> sectorial::Result<()> {
    let quad = QuadratureSpec::with_tol(1e-10);
    let op = TestOperator::build(Construction::RotatedNormal(PI / 6.0));
    let cert = sector::certify(&op.matrix)?;
    println!("{}: omega = {:.6}", op.name, cert.omega);
    for s in [-1.0, 0.5, 2.0] {
        let p = funcalc::imaginary_power(&op.matrix, &cert, s, None, &quad)?;
        // for a normal matrix ||A^{is}|| = max e^{-s arg lambda}
        println!("  ||A^(i{s})|| = {:.8}", linalg::operator_norm(&p.matrix));
    }
    let limit = PI / 2.0 - cert.omega;
    for (r, frac) in [(0.1, 0.0), (1.0, 0.5), (10.0, -0.9)] {
        let z = Complex64::from_polar(r, frac * limit);
        let t = funcalc::semigroup(&op.matrix, &cert, z, &quad)?;
        println!("  ||T({z:.3})|| = {:.8}", linalg::operator_norm(&t.matrix));
    }
    let a = funcalc::semigroup(&op.matrix, &cert, Complex64::new(0.3, 0.0), &quad)?;
    let b = funcalc::semigroup(&op.matrix, &cert, Complex64::new(0.7, 0.0), &quad)?;
    let ab = funcalc::semigroup(&op.matrix, &cert, Complex64::new(1.0, 0.0), &quad)?;
    println!("  ||T(0.3) T(0.7) - T(1)|| = {:.2e}", (&(&a.matrix * &b.matrix) - &ab.matrix).max_abs());
    Ok(())
}
