mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use sectorial::linalg::{adjoint, ComplexMatrix};
use sectorial::sector::{estimate_k_theta, estimate_type, RadiusGrid};

/// `max_j sup_{t > 0, arg z = +-theta} |z| / |z - lambda_j|`: along a ray the
/// ratio is `1 / |1 - s e^{i phi}|` with `phi = arg lambda - arg z`, whose sup
/// over `s > 0` is `1 / |sin phi|` when `cos phi > 0` and 1 otherwise.
fn scalar_k(eigenvalues: &[Complex64], theta: f64) -> f64 {
    let mut best: f64 = 1.0;
    for lambda in eigenvalues {
        for ray in [theta, -theta] {
            let phi = lambda.arg() - ray;
            if phi.cos() > 0.0 {
                best = best.max(1.0 / phi.sin().abs());
            }
        }
    }
    best
}

#[test]
fn scalar_one_on_imaginary_axis() {
    let k = estimate_k_theta(&ComplexMatrix::from_real_diagonal(&[1.0]), PI / 2.0, &RadiusGrid::default()).unwrap();
    assert!((k - 1.0).abs() < 1e-9, "{k}");
}

#[test]
fn jordan_block_has_type_zero_and_finite_k() {
    let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
    let cert = estimate_type(&a, 1e-3, &RadiusGrid::default()).unwrap();
    assert!(cert.omega <= 1e-3);
    let k = estimate_k_theta(&a, PI / 2.0, &RadiusGrid::default()).unwrap();
    assert!(k.is_finite() && k > 1.0);
    assert!(cert.k_table.iter().all(|&(_, k)| k >= 1.0 - 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normal_k_matches_scalar_oracle(seed in any::<u64>(), n in 1usize..5, frac in 0.2f64..0.9) {
        let mut r = rng(seed);
        let spectrum = sector_spectrum(n, 0.6, &mut r);
        let (a, _) = normal_with_spectrum(&spectrum, &mut r);
        let omega = spectrum.iter().map(|z| z.arg().abs()).fold(0.0, f64::max);
        let theta = omega + frac * (PI - omega);
        let got = estimate_k_theta(&a, theta, &RadiusGrid::default()).unwrap();
        let oracle = scalar_k(&spectrum, theta);
        prop_assert!((got - oracle).abs() <= 1e-6 * oracle, "{} vs {}", got, oracle);
    }

    #[test]
    fn type_is_unitarily_invariant(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let a = &gaussian_matrix(n, &mut r).scale_real(0.3) + &ComplexMatrix::from_diagonal(&sector_spectrum(n, 0.5, &mut r));
        let u = random_unitary(n, &mut r);
        let b = &(&u * &a) * &adjoint(&u);
        let res = 1e-3;
        let grid = RadiusGrid::with_points(60);
        let (Ok(ca), Ok(cb)) = (estimate_type(&a, res, &grid), estimate_type(&b, res, &grid)) else {
            return Ok(());
        };
        prop_assert!((ca.omega - cb.omega).abs() <= res + 1e-12);
        if ca.omega == cb.omega {
            for ((_, ka), (_, kb)) in ca.k_table.iter().zip(&cb.k_table) {
                prop_assert!((ka - kb).abs() <= 1e-6 * ka);
            }
        }
    }

    #[test]
    fn type_is_dilation_invariant(seed in any::<u64>(), n in 1usize..5, log_r in -3.0f64..3.0) {
        let mut r = rng(seed);
        let (a, _) = normal_with_spectrum(&sector_spectrum(n, 0.8, &mut r), &mut r);
        let grid = RadiusGrid::with_points(60);
        let ca = estimate_type(&a, 1e-3, &grid).unwrap();
        let cb = estimate_type(&a.scale_real(log_r.exp()), 1e-3, &grid).unwrap();
        prop_assert!((ca.omega - cb.omega).abs() <= 1e-3 + 1e-12);
        if ca.omega == cb.omega {
            for ((_, ka), (_, kb)) in ca.k_table.iter().zip(&cb.k_table) {
                prop_assert!((ka - kb).abs() <= 1e-6 * ka);
            }
        }
    }
}
