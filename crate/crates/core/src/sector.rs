//! Sector geometry, contours and numerical sectoriality certificates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::quadrature::{gauss_panels, QuadratureSpec, Rule};

/// Default angular resolution used when scanning for the type.
pub const DEFAULT_SCAN_RESOLUTION: f64 = 1e-3;

/// Eigenvalues with modulus below this (relative to the spectral radius) count as zero.
const ZERO_EIGENVALUE: f64 = 1e-12;
/// Eigenvalues with `|arg| > pi - NEGATIVE_AXIS_SLACK` are taken to be on the negative axis.
const NEGATIVE_AXIS_SLACK: f64 = 1e-8;
const BOUNDARY_SLACK: f64 = 1e-9;
const GOLDEN_ITERATIONS: usize = 60;

/// The open sector `{ z != 0 : |arg z| < half_angle }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    half_angle: f64,
}

impl Sector {
    pub fn new(half_angle: f64) -> Result<Sector> {
        check_open_angle(half_angle)?;
        Ok(Sector { half_angle })
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z != Complex64::new(0.0, 0.0) && z.arg().abs() < self.half_angle
    }

    /// Membership in the closure, which includes 0.
    pub fn closure_contains(&self, z: Complex64) -> bool {
        z == Complex64::new(0.0, 0.0) || z.arg().abs() <= self.half_angle
    }
}

fn check_open_angle(angle: f64) -> Result<()> {
    if !(angle > 0.0 && angle < PI) {
        return Err(Error::AngleOutOfRange {
            angle,
            lower: 0.0,
            upper: PI,
        });
    }
    Ok(())
}

/// The boundary of the sector of half-angle `gamma`, run counterclockwise around it:
/// in along `t e^{i gamma}`, then out along `t e^{-i gamma}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    gamma: f64,
}

impl Contour {
    pub fn new(gamma: f64) -> Result<Contour> {
        check_open_angle(gamma)?;
        Ok(Contour { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `-t e^{i gamma}` for `t <= 0` and `t e^{-i gamma}` for `t >= 0`.
    pub fn point(&self, t: f64) -> Complex64 {
        if t <= 0.0 {
            Complex64::from_polar(-t, self.gamma)
        } else {
            Complex64::from_polar(t, -self.gamma)
        }
    }

    pub fn nodes(&self, quad: &QuadratureSpec) -> Result<Vec<(Complex64, Complex64)>> {
        contour_nodes(self.gamma, quad)
    }
}

/// `{ |z| > inner_radius, |arg z| < half_angle }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSector {
    pub half_angle: f64,
    pub inner_radius: f64,
}

impl TruncatedSector {
    pub fn new(half_angle: f64, inner_radius: f64) -> Result<TruncatedSector> {
        check_open_angle(half_angle)?;
        if !(inner_radius >= 0.0) {
            return Err(Error::InvalidQuadratureSpec(format!(
                "inner radius {inner_radius} is negative"
            )));
        }
        Ok(TruncatedSector {
            half_angle,
            inner_radius,
        })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() > self.inner_radius && z != Complex64::new(0.0, 0.0) && z.arg().abs() < self.half_angle
    }
}

/// Log-spaced radii `[lower_factor * rho, upper_factor * rho]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusGrid {
    pub points: usize,
    pub lower_factor: f64,
    pub upper_factor: f64,
}

impl Default for RadiusGrid {
    fn default() -> Self {
        RadiusGrid {
            points: 200,
            lower_factor: 1e-6,
            upper_factor: 1e6,
        }
    }
}

impl RadiusGrid {
    pub fn with_points(points: usize) -> Self {
        RadiusGrid {
            points,
            ..Default::default()
        }
    }

    pub fn radii(&self, rho: f64) -> Vec<f64> {
        let rho = if rho > 0.0 { rho } else { 1.0 };
        let (lo, hi) = (self.lower_factor.ln(), self.upper_factor.ln());
        let m = self.points.max(2);
        (0..m)
            .map(|i| rho * (lo + (hi - lo) * i as f64 / (m - 1) as f64).exp())
            .collect()
    }
}

/// Estimated type and resolvent constants of a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorialCertificate {
    pub omega: f64,
    /// `(theta, K_theta)` pairs for a grid of angles in `(omega, pi)`.
    pub k_table: Vec<(f64, f64)>,
    pub scan_resolution: f64,
    pub ray_radius_grid: RadiusGrid,
    pub spectral_radius: f64,
    /// Smallest nonzero eigenvalue modulus (0 if all eigenvalues vanish).
    pub min_modulus: f64,
}

impl SectorialCertificate {
    /// The tabulated `K` at the largest table angle not exceeding `theta`
    /// (`K_theta` is nonincreasing in `theta`), if any.
    pub fn k_bound(&self, theta: f64) -> Option<f64> {
        self.k_table
            .iter()
            .filter(|(t, _)| *t <= theta)
            .map(|(_, k)| *k)
            .next_back()
    }
}

struct SpectrumSummary {
    max_arg: f64,
    spectral_radius: f64,
    min_modulus: f64,
    nonzero: Vec<Complex64>,
}

fn summarize(a: &ComplexMatrix) -> SpectrumSummary {
    let eig = linalg::eigenvalues(a);
    let rho = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let zero = ZERO_EIGENVALUE * rho.max(1.0);
    let nonzero: Vec<Complex64> = eig.into_iter().filter(|z| z.norm() > zero).collect();
    SpectrumSummary {
        max_arg: nonzero.iter().map(|z| z.arg().abs()).fold(0.0, f64::max),
        spectral_radius: rho,
        min_modulus: nonzero.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min).min(rho),
        nonzero,
    }
}

/// Estimates the type `omega` of `A` and tabulates `K_theta` on
/// `theta_j = omega + (pi - omega) j / 8`, `j = 1..7`.
pub fn estimate_type(
    a: &ComplexMatrix,
    scan_resolution: f64,
    grid: &RadiusGrid,
) -> Result<SectorialCertificate> {
    if !(scan_resolution > 0.0 && scan_resolution < 1.0) {
        return Err(Error::AngleOutOfRange {
            angle: scan_resolution,
            lower: 0.0,
            upper: 1.0,
        });
    }
    let summary = summarize(a);
    if let Some(bad) = summary
        .nonzero
        .iter()
        .find(|z| z.arg().abs() > PI - NEGATIVE_AXIS_SLACK)
    {
        return Err(Error::NotSectorial { eigenvalue: *bad });
    }
    let steps = (summary.max_arg / scan_resolution - 1e-9).ceil().max(0.0);
    let mut omega = steps * scan_resolution;
    if omega >= PI {
        omega = summary.max_arg;
    }
    let mut k_table = Vec::with_capacity(7);
    for j in 1..8 {
        let theta = omega + (PI - omega) * j as f64 / 8.0;
        k_table.push((theta, estimate_k_theta(a, theta, grid)?));
    }
    Ok(SectorialCertificate {
        omega,
        k_table,
        scan_resolution,
        ray_radius_grid: *grid,
        spectral_radius: summary.spectral_radius,
        min_modulus: if summary.min_modulus.is_finite() { summary.min_modulus } else { 0.0 },
    })
}

/// Convenience wrapper with the default resolution and radius grid.
pub fn certify(a: &ComplexMatrix) -> Result<SectorialCertificate> {
    estimate_type(a, DEFAULT_SCAN_RESOLUTION, &RadiusGrid::default())
}

fn ray_value(a: &ComplexMatrix, z: Complex64) -> Result<f64> {
    let r = linalg::resolvent(a, z)?;
    Ok(linalg::operator_norm(&r) * z.norm())
}

/// `sup ||z R(z, A)||` over the rays `arg z = +-theta`: grid sampling, golden-section
/// refinement of the best grid cells, and the limit 1 at infinity.
pub fn estimate_k_theta(a: &ComplexMatrix, theta: f64, grid: &RadiusGrid) -> Result<f64> {
    check_open_angle(theta)?;
    let summary = summarize(a);
    if let Some(bad) = summary
        .nonzero
        .iter()
        .find(|z| z.arg().abs() >= theta - BOUNDARY_SLACK)
    {
        return Err(Error::EigenvalueOnBoundary {
            eigenvalue: *bad,
            theta,
        });
    }
    let radii = grid.radii(summary.spectral_radius);
    let mut best = 1.0f64;
    for sign in [1.0, -1.0] {
        let dir = Complex64::from_polar(1.0, sign * theta);
        let values = radii
            .iter()
            .map(|&r| ray_value(a, dir * r))
            .collect::<Result<Vec<f64>>>()?;
        best = best.max(values.iter().cloned().fold(0.0, f64::max));
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
        for &i in order.iter().take(3) {
            let lo = radii[i.saturating_sub(1)].ln();
            let hi = radii[(i + 1).min(radii.len() - 1)].ln();
            let refined = golden_max(|x| ray_value(a, dir * x.exp()), lo, hi)?;
            best = best.max(refined);
        }
    }
    Ok(best)
}

fn golden_max(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = f1.max(f2);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        }
        best = best.max(f1).max(f2);
    }
    Ok(best)
}

/// Nodes and weights with `integral over Gamma_gamma of g(z) dz ~ sum w_k g(z_k)` under
/// `z = e^{u -+ i gamma}`, `dz = z du`.
///
/// Lower-ray nodes come first (outward, weight `+z du`), then the upper ray
/// (inward, weight `-z du`), so each upper node and weight is the negated
/// conjugate of its lower partner.
pub fn contour_nodes(gamma: f64, quad: &QuadratureSpec) -> Result<Vec<(Complex64, Complex64)>> {
    check_open_angle(gamma)?;
    quad.validate()?;
    let (lo, hi) = quad.window();
    let rule: Vec<(f64, f64)> = match quad.rule {
        Rule::Trapezoid => {
            let m = quad.node_count.unwrap_or(256);
            let h = (hi - lo) / (m - 1) as f64;
            (0..m)
                .map(|j| {
                    let w = if j == 0 || j == m - 1 { 0.5 * h } else { h };
                    (lo + j as f64 * h, w)
                })
                .collect()
        }
        Rule::GaussPanels { order, panels } => gauss_panels(order, panels, lo, hi),
    };
    let lower: Vec<(Complex64, Complex64)> = rule
        .iter()
        .map(|&(u, w)| {
            let z = Complex64::from_polar(u.exp(), -gamma);
            (z, z * w)
        })
        .collect();
    let upper: Vec<(Complex64, Complex64)> = lower.iter().map(|&(z, w)| (z.conj(), -w.conj())).collect();
    Ok(lower.into_iter().chain(upper).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// sup over the ray at angle theta of |z| / |z - lambda|
    fn scalar_ray_sup(lambda: Complex64, theta: f64) -> f64 {
        let rotated = lambda * Complex64::from_polar(1.0, -theta);
        if rotated.re > 0.0 {
            lambda.norm() / rotated.im.abs()
        } else {
            1.0
        }
    }

    #[test]
    fn positive_diagonal_has_type_zero() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 4.0]);
        let cert = estimate_type(&a, 1e-3, &RadiusGrid::default()).unwrap();
        assert!(cert.omega <= 1e-3);
        assert_eq!(cert.k_table.len(), 7);
        assert!(cert.k_table.iter().all(|(_, k)| *k >= 1.0 - 1e-12));
    }

    #[test]
    fn rotated_normal_type() {
        let a = ComplexMatrix::from_diagonal(&[
            Complex64::from_polar(1.0, PI / 6.0),
            Complex64::from_polar(2.0, -PI / 6.0),
        ]);
        let cert = estimate_type(&a, 1e-3, &RadiusGrid::default()).unwrap();
        assert!((cert.omega - PI / 6.0).abs() <= 1e-3);
        assert!(cert.omega >= PI / 6.0 - 1e-12);
    }

    #[test]
    fn jordan_type_and_k() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let cert = estimate_type(&a, 1e-3, &RadiusGrid::default()).unwrap();
        assert!(cert.omega <= 1e-3);
        let k = estimate_k_theta(&a, PI / 2.0, &RadiusGrid::default()).unwrap();
        assert!(k.is_finite() && k > 1.0);
    }

    #[test]
    fn negative_eigenvalue_is_not_sectorial() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            estimate_type(&a, 1e-3, &RadiusGrid::default()),
            Err(Error::NotSectorial { .. })
        ));
    }

    #[test]
    fn zero_matrix_is_sectorial() {
        let a = ComplexMatrix::zeros(3);
        let cert = estimate_type(&a, 1e-3, &RadiusGrid::default()).unwrap();
        assert_eq!(cert.omega, 0.0);
        assert!(cert.k_table.iter().all(|(_, k)| (*k - 1.0).abs() < 1e-12));
    }

    #[test]
    fn scalar_k_on_imaginary_axis() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0]);
        let k = estimate_k_theta(&a, PI / 2.0, &RadiusGrid::default()).unwrap();
        assert!((k - 1.0).abs() < 1e-9);
    }

    #[test]
    fn diagonal_k_matches_scalar_formula() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let theta = 3.0 * PI / 4.0;
        let k = estimate_k_theta(&a, theta, &RadiusGrid::default()).unwrap();
        let expected = [1.0, 2.0]
            .iter()
            .map(|&l| scalar_ray_sup(c(l, 0.0), theta))
            .fold(1.0, f64::max);
        assert!((k - expected).abs() <= 1e-6 * expected);
        // theta below pi/2: the sup 1/sin(theta) is interior to the ray
        let k = estimate_k_theta(&a, PI / 3.0, &RadiusGrid::default()).unwrap();
        let expected = 1.0 / (PI / 3.0).sin();
        assert!((k - expected).abs() <= 1e-6 * expected, "{k} vs {expected}");
    }

    #[test]
    fn k_grows_as_theta_approaches_omega() {
        let a = ComplexMatrix::from_diagonal(&[
            Complex64::from_polar(1.0, PI / 6.0),
            Complex64::from_polar(2.0, -PI / 6.0),
        ]);
        let ks: Vec<f64> = [0.9, 0.7, 0.6, 0.55]
            .iter()
            .map(|&t| estimate_k_theta(&a, t, &RadiusGrid::default()).unwrap())
            .collect();
        assert!(ks.windows(2).all(|w| w[1] > w[0]), "{ks:?}");
        assert!(matches!(
            estimate_k_theta(&a, PI / 6.0, &RadiusGrid::default()),
            Err(Error::EigenvalueOnBoundary { .. })
        ));
    }

    #[test]
    fn contour_nodes_are_symmetric() {
        let quad = QuadratureSpec {
            node_count: Some(64),
            ..Default::default()
        };
        let nodes = contour_nodes(1.0, &quad).unwrap();
        assert_eq!(nodes.len(), 128);
        for k in 0..64 {
            let (z, w) = nodes[k];
            let (zu, wu) = nodes[64 + k];
            assert_eq!(zu, z.conj());
            assert_eq!(wu, -w.conj());
            assert!((z.arg() + 1.0).abs() < 1e-14);
        }
    }

    /// (2 pi i)^{-1} times the contour integral of phi(z) / (z (z - lambda))
    /// gives phi(lambda) / lambda.
    fn phi_moment_error(gamma: f64, nodes_per_ray: usize) -> f64 {
        let lambda = c(1.5, 0.4);
        let quad = QuadratureSpec {
            node_count: Some(nodes_per_ray),
            u_min: Some(-36.0),
            u_max: Some(36.0),
            ..Default::default()
        };
        let phi = |z: Complex64| z / ((1.0 + z) * (1.0 + z));
        let sum: Complex64 = contour_nodes(gamma, &quad)
            .unwrap()
            .iter()
            .map(|&(z, w)| w * phi(z) / (z * (z - lambda)))
            .sum();
        let value = sum / c(0.0, 2.0 * PI);
        (value - phi(lambda) / lambda).norm()
    }

    #[test]
    fn contour_reproduces_phi_moment() {
        assert!(phi_moment_error(1.2, 1024) < 1e-10);
    }

    #[test]
    fn doubling_nodes_reduces_error() {
        let errors: Vec<f64> = [32, 64, 128].iter().map(|&m| phi_moment_error(1.2, m)).collect();
        assert!(errors[1] * 10.0 <= errors[0], "{errors:?}");
        assert!(errors[2] * 10.0 <= errors[1] || errors[2] < 1e-13, "{errors:?}");
    }

    #[test]
    fn gauss_panel_contour() {
        let quad = QuadratureSpec {
            rule: Rule::GaussPanels { order: 16, panels: 72 },
            u_min: Some(-36.0),
            u_max: Some(36.0),
            ..Default::default()
        };
        let lambda = c(2.0, -0.3);
        let sum: Complex64 = contour_nodes(1.0, &quad)
            .unwrap()
            .iter()
            .map(|&(z, w)| w * (-z).exp() * z / (z - lambda))
            .sum();
        let value = sum / c(0.0, 2.0 * PI);
        let err = (value - lambda * (-lambda).exp()).norm();
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn truncated_sector_membership() {
        let s = TruncatedSector::new(PI / 4.0, 1.0).unwrap();
        assert!(s.contains(c(2.0, 0.5)));
        assert!(!s.contains(c(0.5, 0.0)));
        assert!(!s.contains(c(2.0, 3.0)));
        assert!(Sector::new(PI).is_err());
        let contour = Contour::new(1.0).unwrap();
        assert_eq!(contour.point(-2.0), Complex64::from_polar(2.0, 1.0));
        assert_eq!(contour.point(2.0), Complex64::from_polar(2.0, -1.0));
    }
}
