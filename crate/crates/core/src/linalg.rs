//! Dense complex linear algebra: the matrix type, LU-based resolvents,
//! operator norms and the eigen/Jordan oracles used for verification.
//!
//! Production paths (resolvents, norms) never assume diagonalizability.
//! The eigendecomposition exists for the oracles and for reading off the
//! spectrum when certifying sectoriality.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::Symbol;

/// Reciprocal condition number below which a factorization is treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-14;

/// Largest dimension for which [`operator_norm`] uses a full SVD.
pub const SVD_NORM_LIMIT: usize = 64;

const POWER_ITERATIONS: usize = 400;

/// Dense `n x n` complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile")]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

/// On-disk layout shared by matrices and vectors: `{"n": .., "entries": [[re, im], ..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = Error;

    fn try_from(file: MatrixFile) -> Result<Self> {
        if file.n == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if file.entries.len() != file.n * file.n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for n = {}, found {}",
                file.n * file.n,
                file.n,
                file.entries.len()
            )));
        }
        let data = file
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(file.n, data)
    }
}

impl From<ComplexMatrix> for MatrixFile {
    fn from(m: ComplexMatrix) -> Self {
        MatrixFile {
            n: m.n,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("entries must be finite".into()));
        }
        Ok(ComplexMatrix { n, data })
    }

    /// Convenience constructor from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let data: Vec<Complex64> = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), n, "rows must form a square matrix");
                row.iter().copied()
            })
            .collect();
        ComplexMatrix { n, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// `self + alpha * I`.
    pub fn shift(&self, alpha: Complex64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] += alpha;
        }
        m
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: Complex64, other: &ComplexMatrix) {
        debug_assert_eq!(self.n, other.n);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex64::new(0.0, 0.0), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn one_norm(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let n = m.nrows();
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        let lu = LuFactorization::new(self)?;
        if lu.rcond() < SINGULAR_RCOND {
            return Err(Error::SingularOperator);
        }
        Ok(lu.inverse())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n);
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n);
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.6e}{:+.6e}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn vector_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    singular: bool,
    rcond: f64,
    inverse: Option<ComplexMatrix>,
}

impl LuFactorization {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= factor * u;
                }
            }
        }
        let mut fact = LuFactorization {
            n,
            lu,
            perm,
            singular,
            rcond: 0.0,
            inverse: None,
        };
        if !singular {
            let inv = fact.solve_identity();
            let inv_norm = inv.one_norm();
            let a_norm = a.one_norm();
            fact.rcond = if a_norm == 0.0 || !inv_norm.is_finite() {
                0.0
            } else {
                1.0 / (a_norm * inv_norm)
            };
            fact.inverse = Some(inv);
        }
        Ok(fact)
    }

    /// Reciprocal 1-norm condition number (0 when exactly singular).
    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    pub fn is_singular(&self) -> bool {
        self.singular || self.rcond < SINGULAR_RCOND
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    pub fn inverse(&self) -> ComplexMatrix {
        match &self.inverse {
            Some(inv) => inv.clone(),
            None => self.solve_identity(),
        }
    }

    /// Consumes the factorization, returning the inverse computed for the condition estimate.
    pub fn into_inverse(self) -> ComplexMatrix {
        match self.inverse {
            Some(inv) => inv,
            None => self.solve_identity(),
        }
    }

    fn solve_identity(&self) -> ComplexMatrix {
        let n = self.n;
        let mut inv = ComplexMatrix::zeros(n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// A resolvent together with its numerical diagnostics.
#[derive(Debug, Clone)]
pub struct Resolvent {
    pub matrix: ComplexMatrix,
    pub rcond: f64,
    /// `||(zI - A) R - I||_F`
    pub residual: f64,
}

/// `R(z, A) = (zI - A)^{-1}` via a pivoted LU factorization.
pub fn resolvent(a: &ComplexMatrix, z: Complex64) -> Result<ComplexMatrix> {
    resolvent_with_diagnostics(a, z).map(|r| r.matrix)
}

pub fn resolvent_with_diagnostics(a: &ComplexMatrix, z: Complex64) -> Result<Resolvent> {
    let shifted = a.scale_real(-1.0).shift(z);
    let lu = LuFactorization::new(&shifted)?;
    if lu.is_singular() {
        return Err(Error::SingularResolvent {
            z,
            rcond: lu.rcond(),
        });
    }
    let matrix = lu.inverse();
    let residual = (&(&shifted * &matrix) - &ComplexMatrix::identity(a.n)).frobenius_norm();
    Ok(Resolvent {
        matrix,
        rcond: lu.rcond(),
        residual,
    })
}

/// `R(z, A)` without the residual check; used on quadrature nodes.
pub fn resolvent_fast(a: &ComplexMatrix, z: Complex64) -> Result<ComplexMatrix> {
    let shifted = a.scale_real(-1.0).shift(z);
    let lu = LuFactorization::new(&shifted)?;
    if lu.is_singular() {
        return Err(Error::SingularResolvent {
            z,
            rcond: lu.rcond(),
        });
    }
    Ok(lu.into_inverse())
}

/// Entrywise conjugate transpose.
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.n;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(j, i)] = a[(i, j)].conj();
        }
    }
    out
}

/// Largest singular value. Full SVD up to [`SVD_NORM_LIMIT`], a fixed-length
/// power iteration on `A* A` beyond it.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.n <= SVD_NORM_LIMIT {
        singular_values(a).into_iter().fold(0.0, f64::max)
    } else {
        power_method_norm(a, POWER_ITERATIONS)
    }
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    a.to_nalgebra()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

/// Power iteration on `A* A` from a fixed start vector.
pub fn power_method_norm(a: &ComplexMatrix, iterations: usize) -> f64 {
    let n = a.n;
    let ah = adjoint(a);
    // deterministic, generic start vector
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.5 * (i as f64).sin(), 0.25 * (i as f64 + 1.0).cos()))
        .collect();
    let mut sigma_sq = 0.0;
    for _ in 0..iterations {
        let norm = vector_norm(&v);
        if norm == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        let w = ah.mul_vec(&a.mul_vec(&v));
        sigma_sq = v
            .iter()
            .zip(&w)
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>();
        v = w;
    }
    sigma_sq.max(0.0).sqrt()
}

/// Eigenvalues from a complex Schur decomposition.
pub fn eigenvalues(a: &ComplexMatrix) -> Vec<Complex64> {
    let schur = nalgebra::linalg::Schur::new(a.to_nalgebra());
    let (_, t) = schur.unpack();
    (0..a.n).map(|i| t[(i, i)]).collect()
}

/// `A = V diag(eigenvalues) V^{-1}` when the eigenvector matrix is well conditioned.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: ComplexMatrix,
    pub eigenvectors_inverse: ComplexMatrix,
    /// 2-norm condition number of the eigenvector matrix.
    pub condition: f64,
    pub diagonalizable: bool,
    /// `||V diag(lambda) V^{-1} - A||_F` (infinite when V is singular)
    pub reconstruction_error: f64,
}

/// Default cap on the eigenvector condition number accepted by the oracles.
pub const DEFAULT_CONDITION_CAP: f64 = 1e8;

pub fn spectral_decomposition(a: &ComplexMatrix, condition_cap: f64) -> SpectralDecomposition {
    let n = a.n;
    let schur = nalgebra::linalg::Schur::new(a.to_nalgebra());
    let (q, t) = schur.unpack();
    let t_norm = t.norm().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * t_norm;

    // eigenvectors of the triangular factor by back substitution
    let mut w = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        w[(k, k)] = Complex64::new(1.0, 0.0);
        let lambda = t[(k, k)];
        for j in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for l in j + 1..=k {
                s += t[(j, l)] * w[(l, k)];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            w[(j, k)] = -s / denom;
        }
    }
    let mut v = &q * &w;
    for k in 0..n {
        let norm = v.column(k).norm();
        if norm > 0.0 {
            v.column_mut(k).unscale_mut(norm);
        }
    }
    let eigenvalues: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let sv = v.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };

    let eigenvectors = ComplexMatrix::from_nalgebra(&v);
    let (eigenvectors_inverse, reconstruction_error) = match eigenvectors.inverse() {
        Ok(inv) => {
            let rebuilt = &(&eigenvectors * &ComplexMatrix::from_diagonal(&eigenvalues)) * &inv;
            let err = (&rebuilt - a).frobenius_norm();
            (inv, err)
        }
        Err(_) => (ComplexMatrix::zeros(n), f64::INFINITY),
    };
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        eigenvectors_inverse,
        condition,
        diagonalizable: condition <= condition_cap && reconstruction_error.is_finite(),
        reconstruction_error,
    }
}

/// Oracle `f(A) = V f(Lambda) V^{-1}` for diagonalizable `A`.
pub fn spectral_oracle(a: &ComplexMatrix, f: &Symbol) -> Result<ComplexMatrix> {
    spectral_oracle_with_cap(a, f, DEFAULT_CONDITION_CAP)
}

pub fn spectral_oracle_with_cap(
    a: &ComplexMatrix,
    f: &Symbol,
    condition_cap: f64,
) -> Result<ComplexMatrix> {
    let dec = spectral_decomposition(a, condition_cap);
    if !dec.diagonalizable {
        return Err(Error::NotDiagonalizable {
            condition: dec.condition,
        });
    }
    let mut values = Vec::with_capacity(dec.eigenvalues.len());
    for &lambda in &dec.eigenvalues {
        if !f.domain_contains(lambda) {
            return Err(Error::EigenvalueOutsideDomain {
                eigenvalue: lambda,
                half_angle: f.half_angle(),
            });
        }
        values.push(f.eval(lambda));
    }
    Ok(&(&dec.eigenvectors * &ComplexMatrix::from_diagonal(&values)) * &dec.eigenvectors_inverse)
}

/// Oracle for a 2x2 Jordan block: `f(J) = [[f(l), f'(l)], [0, f(l)]]`.
///
/// When `f_prime` is `None` the derivative comes from a Cauchy integral on a
/// small circle inside the domain sector (trapezoid rule, spectrally accurate).
pub fn jordan_oracle_2x2(
    lambda: Complex64,
    f: &Symbol,
    f_prime: Option<Complex64>,
) -> Result<ComplexMatrix> {
    if !f.domain_contains(lambda) {
        return Err(Error::EigenvalueOutsideDomain {
            eigenvalue: lambda,
            half_angle: f.half_angle(),
        });
    }
    let value = f.eval(lambda);
    let derivative = match f_prime {
        Some(d) => d,
        None => cauchy_derivative(f, lambda),
    };
    Ok(ComplexMatrix::from_rows(&[
        vec![value, derivative],
        vec![Complex64::new(0.0, 0.0), value],
    ]))
}

fn cauchy_derivative(f: &Symbol, lambda: Complex64) -> Complex64 {
    let gap = (f.half_angle() - lambda.arg().abs()).min(std::f64::consts::FRAC_PI_2);
    let radius = 0.25 * lambda.norm() * gap.sin().min(1.0);
    let nodes = 64;
    let sum = (0..nodes).fold(Complex64::new(0.0, 0.0), |acc, k| {
        let e = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / nodes as f64);
        acc + f.eval(lambda + e * radius) / e
    });
    sum / (nodes as f64 * radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn resolvent_of_diagonal() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let r = resolvent(&a, c(-1.0, 0.0)).unwrap();
        assert!(close(&r, &ComplexMatrix::from_real_diagonal(&[-0.5, -1.0 / 3.0]), 1e-15));
    }

    #[test]
    fn resolvent_of_identity() {
        let r = resolvent(&ComplexMatrix::identity(2), c(2.0, 0.0)).unwrap();
        assert!(close(&r, &ComplexMatrix::identity(2), 1e-15));
    }

    #[test]
    fn resolvent_of_jordan_at_zero() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let r = resolvent_with_diagnostics(&a, c(0.0, 0.0)).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -1.0]]);
        assert!(close(&r.matrix, &expected, 1e-15));
        assert!(r.residual < 1e-14);
    }

    #[test]
    fn resolvent_at_eigenvalue_is_singular() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let err = resolvent(&a, c(2.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::SingularResolvent { .. }));
        // near-spectrum: rcond ~ 1e-16
        let err = resolvent(&a, c(2.0 + 1e-16 * 2.0, 0.0));
        assert!(err.is_err());
    }

    #[test]
    fn operator_norm_small_cases() {
        assert!((operator_norm(&ComplexMatrix::from_real_diagonal(&[1.0, 2.0])) - 2.0).abs() < 1e-14);
        let shift = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!((operator_norm(&shift) - 1.0).abs() < 1e-14);
        assert_eq!(operator_norm(&ComplexMatrix::zeros(3)), 0.0);
    }

    #[test]
    fn power_method_agrees_with_svd() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.5), c(0.2, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 0.0), c(2.0, 0.0), c(0.3, 0.3)],
            vec![c(-0.4, 0.0), c(0.0, 0.1), c(0.5, 0.0)],
        ]);
        let svd = operator_norm(&a);
        let pm = power_method_norm(&a, 400);
        assert!((svd - pm).abs() / svd < 1e-10, "{svd} vs {pm}");
    }

    #[test]
    fn adjoint_examples() {
        let a = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(2.0, 0.0)]]);
        let expected =
            ComplexMatrix::from_rows(&[vec![c(0.0, -1.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(2.0, 0.0)]]);
        assert_eq!(adjoint(&a), expected);
        assert_eq!(adjoint(&adjoint(&a)), a);
        let h = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), c(1.0, 1.0)], vec![c(1.0, -1.0), c(3.0, 0.0)]]);
        assert_eq!(adjoint(&h), h);
    }

    #[test]
    fn spectral_oracle_diagonal_examples() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 3.0]);
        let phi = symbols::make_phi(2.0).unwrap();
        let got = spectral_oracle(&a, &phi).unwrap();
        assert!(close(&got, &ComplexMatrix::from_real_diagonal(&[0.25, 3.0 / 16.0]), 1e-14));

        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let exp = symbols::make_exponential(1.0, 1.0).unwrap();
        let got = spectral_oracle(&a, &exp).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[(-1.0f64).exp(), (-2.0f64).exp()]);
        assert!(close(&got, &expected, 1e-14));
    }

    #[test]
    fn spectral_oracle_rejects_jordan_block() {
        let a = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[0.0, 2.0]]);
        let phi = symbols::make_phi(2.0).unwrap();
        assert!(matches!(
            spectral_oracle(&a, &phi),
            Err(Error::NotDiagonalizable { .. })
        ));
    }

    #[test]
    fn spectral_oracle_rejects_eigenvalue_outside_domain() {
        let a = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), Complex64::from_polar(1.0, 1.2)]);
        let g1 = symbols::make_gk(1, 1.0).unwrap();
        assert!(matches!(
            spectral_oracle(&a, &g1),
            Err(Error::EigenvalueOutsideDomain { .. })
        ));
    }

    #[test]
    fn jordan_oracle_examples() {
        let phi = symbols::make_phi(2.0).unwrap();
        let got = jordan_oracle_2x2(c(2.0, 0.0), &phi, Some(c(-1.0 / 27.0, 0.0))).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[2.0 / 9.0, -1.0 / 27.0], &[0.0, 2.0 / 9.0]]);
        assert!(close(&got, &expected, 1e-15));
        // Cauchy-circle derivative reproduces phi'(2) = (1 - 2)/(1 + 2)^3
        let auto = jordan_oracle_2x2(c(2.0, 0.0), &phi, None).unwrap();
        assert!(close(&auto, &expected, 1e-12));

        let g1 = symbols::make_gk(1, 1.4).unwrap();
        let got = jordan_oracle_2x2(c(1.0, 0.0), &g1, None).unwrap();
        let e1 = (-1.0f64).exp();
        assert!(close(&got, &ComplexMatrix::from_real_rows(&[&[e1, 0.0], &[0.0, e1]]), 1e-12));

        let one = symbols::constant(c(1.0, 0.0), 2.0).unwrap();
        let got = jordan_oracle_2x2(c(3.0, 0.0), &one, None).unwrap();
        assert!(close(&got, &ComplexMatrix::identity(2), 1e-14));
    }

    #[test]
    fn matrix_file_rejects_wrong_entry_count() {
        let bad = r#"{"n": 2, "entries": [[1,0],[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
        let good = r#"{"n": 1, "entries": [[1.5,-2]]}"#;
        let m: ComplexMatrix = serde_json::from_str(good).unwrap();
        assert_eq!(m[(0, 0)], c(1.5, -2.0));
    }
}
