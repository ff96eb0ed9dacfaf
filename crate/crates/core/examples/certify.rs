//! Sectoriality type and resolvent bounds for the built-in test operators.

use sectorial::harness::catalog;
use sectorial::sector;

fn main() -> sectorial::Result<()> {
    for op in catalog() {
        let cert = sector::certify(&op.matrix)?;
        println!("{} (n = {})", op.name, op.matrix.dim());
        println!("  omega = {:.6}, spectral radius = {:.4}", cert.omega, cert.spectral_radius);
        for (theta, k) in &cert.k_table {
            println!("  K({theta:.4}) = {k:.6}");
        }
    }
    Ok(())
}
