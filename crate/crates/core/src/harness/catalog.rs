//! Test operators with reproducible constructions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{adjoint, ComplexMatrix};

/// Seed of the default random member and of the default sample vectors.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;
/// Dimension of random catalog members.
pub const RANDOM_DIM: usize = 4;
/// Largest eigenvalue argument of random catalog members.
pub const RANDOM_MAX_ARG: f64 = PI / 6.0;

/// How a test operator is built.
#[derive(Debug, Clone, PartialEq)]
pub enum Construction {
    PositiveDiagonal(Vec<f64>),
    /// `diag(e^{i beta}, 2 e^{-i beta})`
    RotatedNormal(f64),
    /// The 2x2 Jordan block `[[lambda, 1], [0, lambda]]`.
    Jordan(f64),
    /// `tridiag(-1, 2, -1)` of size `n`.
    TridiagonalLaplacian(usize),
    /// `U D U*` with Haar-like unitary `U` and eigenvalues in the sector of
    /// half-angle [`RANDOM_MAX_ARG`], moduli in `[1/2, 4]`.
    RandomSectorial(u64),
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Construction::PositiveDiagonal(d) => {
                let parts: Vec<String> = d.iter().map(|v| v.to_string()).collect();
                write!(f, "positive-diagonal:{}", parts.join(","))
            }
            Construction::RotatedNormal(beta) => write!(f, "rotated-normal:{beta}"),
            Construction::Jordan(lambda) => write!(f, "jordan:{lambda}"),
            Construction::TridiagonalLaplacian(n) => write!(f, "tridiagonal-laplacian:{n}"),
            Construction::RandomSectorial(seed) => write!(f, "random-sectorial:{seed}"),
        }
    }
}

/// Reals written either as numbers or as `pi`, `pi/k`, `c*pi`, `c*pi/k`.
fn parse_real(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Some(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (t, 1.0),
    };
    let coefficient = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(c) => c.trim_end_matches('*').trim().parse::<f64>().ok()?,
        None => return None,
    };
    Some(coefficient * PI / den)
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownOperator(s.to_string());
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let real = |t: &str| parse_real(t).ok_or_else(bad);
        match kind.trim() {
            "positive-diagonal" | "diag" => {
                let values = args.split(',').map(real).collect::<Result<Vec<_>>>()?;
                if values.is_empty() || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(bad());
                }
                Ok(Construction::PositiveDiagonal(values))
            }
            "rotated-normal" => {
                let beta = real(args)?;
                if !(beta.abs() < PI / 2.0) {
                    return Err(bad());
                }
                Ok(Construction::RotatedNormal(beta))
            }
            "jordan" => {
                let lambda = real(args)?;
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(bad());
                }
                Ok(Construction::Jordan(lambda))
            }
            "tridiagonal-laplacian" | "laplacian" => {
                let n: usize = args.trim().parse().map_err(|_| bad())?;
                if n == 0 {
                    return Err(bad());
                }
                Ok(Construction::TridiagonalLaplacian(n))
            }
            "random-sectorial" => {
                let seed = args.trim();
                let seed = match seed.strip_prefix("0x") {
                    Some(hex) => u64::from_str_radix(hex, 16),
                    None => seed.parse(),
                }
                .map_err(|_| bad())?;
                Ok(Construction::RandomSectorial(seed))
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for Construction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Construction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A catalog member.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestOperator {
    pub name: String,
    pub matrix: ComplexMatrix,
    pub construction: Construction,
    /// Sectoriality angle when known from the construction.
    pub known_omega: Option<f64>,
}

impl TestOperator {
    pub fn build(construction: Construction) -> TestOperator {
        let (matrix, known_omega) = match &construction {
            Construction::PositiveDiagonal(d) => (ComplexMatrix::from_real_diagonal(d), Some(0.0)),
            Construction::RotatedNormal(beta) => (
                ComplexMatrix::from_diagonal(&[
                    Complex64::from_polar(1.0, *beta),
                    Complex64::from_polar(2.0, -beta),
                ]),
                Some(beta.abs()),
            ),
            Construction::Jordan(lambda) => (
                ComplexMatrix::from_real_rows(&[&[*lambda, 1.0], &[0.0, *lambda]]),
                Some(0.0),
            ),
            Construction::TridiagonalLaplacian(n) => (laplacian(*n), Some(0.0)),
            Construction::RandomSectorial(seed) => random_sectorial(*seed),
        };
        TestOperator {
            name: construction.to_string(),
            matrix,
            construction,
            known_omega,
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        let d = &self.matrix - &adjoint(&self.matrix);
        d.max_abs() == 0.0
    }

    pub fn is_positive_diagonal(&self) -> bool {
        matches!(self.construction, Construction::PositiveDiagonal(_))
    }
}

impl FromStr for TestOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(TestOperator::build(s.parse()?))
    }
}

fn laplacian(n: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(2.0, 0.0);
        if i > 0 {
            a[(i, i - 1)] = Complex64::new(-1.0, 0.0);
            a[(i - 1, i)] = Complex64::new(-1.0, 0.0);
        }
    }
    a
}

fn random_sectorial(seed: u64) -> (ComplexMatrix, Option<f64>) {
    let n = RANDOM_DIM;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaussian = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    });
    let qr = gaussian.qr();
    // fix the phases of R's diagonal so U is Haar distributed
    let r = qr.r();
    let mut u = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    let mut omega: f64 = 0.0;
    let eigenvalues: Vec<Complex64> = (0..n)
        .map(|_| {
            let modulus = (rng.random_range(0.5f64.ln()..4f64.ln())).exp();
            let arg = rng.random_range(-RANDOM_MAX_ARG..RANDOM_MAX_ARG);
            omega = omega.max(arg.abs());
            Complex64::from_polar(modulus, arg)
        })
        .collect();
    let u = ComplexMatrix::from_nalgebra(&u);
    let d = ComplexMatrix::from_diagonal(&eigenvalues);
    (&(&u * &d) * &adjoint(&u), Some(omega))
}

/// The default catalog: diag(1,2,4), rotated-normal(pi/6), Jordan(2), the
/// n = 16 second-difference matrix and one seeded random sectorial matrix.
pub fn catalog() -> Vec<TestOperator> {
    [
        Construction::PositiveDiagonal(vec![1.0, 2.0, 4.0]),
        Construction::RotatedNormal(PI / 6.0),
        Construction::Jordan(2.0),
        Construction::TridiagonalLaplacian(16),
        Construction::RandomSectorial(DEFAULT_SEED),
    ]
    .into_iter()
    .map(TestOperator::build)
    .collect()
}

/// Expands descriptors, with `"catalog"` standing for the default catalog.
pub fn resolve_operators(descriptors: &[String]) -> Result<Vec<TestOperator>> {
    let mut out = Vec::new();
    for d in descriptors {
        if d.trim() == "catalog" {
            out.extend(catalog());
        } else {
            out.push(d.parse()?);
        }
    }
    Ok(out)
}
