//! Test-only generators and oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use sectorial::linalg::{adjoint, ComplexMatrix};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

pub fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let data = (0..n * n).map(|_| gaussian(rng)).collect();
    ComplexMatrix::from_row_major(n, data).unwrap()
}

pub fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

/// Unitary from modified Gram-Schmidt on the columns of a Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = gaussian_matrix(n, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let q = &done[k];
            let proj: Complex64 = q.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
            for (v, qi) in rest[0].iter_mut().zip(q) {
                *v -= proj * qi;
            }
        }
        let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            u[(i, j)] = *v;
        }
    }
    u
}

/// `U D U*` with the given eigenvalues.
pub fn normal_with_spectrum(eigenvalues: &[Complex64], rng: &mut ChaCha8Rng) -> (ComplexMatrix, ComplexMatrix) {
    let u = random_unitary(eigenvalues.len(), rng);
    let a = &(&u * &ComplexMatrix::from_diagonal(eigenvalues)) * &adjoint(&u);
    (a, u)
}

/// Eigenvalues with moduli in `[0.5, 4]` and arguments in `[-max_arg, max_arg]`.
pub fn sector_spectrum(n: usize, max_arg: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let r = rng.random_range(0.5f64.ln()..4f64.ln()).exp();
            let t = if max_arg > 0.0 { rng.random_range(-max_arg..=max_arg) } else { 0.0 };
            Complex64::from_polar(r, t)
        })
        .collect()
}

pub fn mat_vec(a: &ComplexMatrix, x: &[Complex64]) -> Vec<Complex64> {
    a.mul_vec(x)
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).max_abs()
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut m: Vec<Vec<f64>>) -> Vec<f64> {
    let n = m.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        let scale: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = cs * mkp - sn * mkq;
                    m[k][q] = sn * mkp + cs * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = cs * mpk - sn * mqk;
                    m[q][k] = sn * mpk + cs * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// `||A||` as the square root of the top eigenvalue of `A* A`, through the real
/// symmetric embedding `[[Re, -Im], [Im, Re]]`.
pub fn jacobi_norm(a: &ComplexMatrix) -> f64 {
    let h = &adjoint(a) * a;
    let n = h.dim();
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let v = h[(i, j)];
            m[i][j] = v.re;
            m[i + n][j + n] = v.re;
            m[i][j + n] = -v.im;
            m[i + n][j] = v.im;
        }
    }
    jacobi_eigenvalues(m).into_iter().fold(0.0, f64::max).sqrt()
}

/// Composite Simpson rule on `[a, b]` with `n` panels, rounded up to even.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}
