//! Quadrature rules and the shared [`QuadratureSpec`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the contour rays are parametrized; only the log substitution
/// `z = e^{u +- i gamma}`, `dz = z du` is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    #[default]
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Rule {
    Trapezoid,
    GaussPanels { order: usize, panels: usize },
}

/// Discretization parameters for contour and ray integrals.
///
/// Unset window bounds and node counts are derived from the symbol's decay
/// certificate and the analyticity strip of the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub transform: Transform,
    pub u_min: Option<f64>,
    pub u_max: Option<f64>,
    /// Initial nodes per ray.
    pub node_count: Option<usize>,
    pub rule: Rule,
    pub target_tol: f64,
    pub max_refinements: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            transform: Transform::Log,
            u_min: None,
            u_max: None,
            node_count: None,
            rule: Rule::Trapezoid,
            target_tol: 1e-10,
            max_refinements: 6,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(target_tol: f64) -> Self {
        QuadratureSpec {
            target_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidQuadratureSpec(msg));
        if !(self.target_tol > 0.0 && self.target_tol < 1.0) {
            return bad(format!("target_tol {} not in (0, 1)", self.target_tol));
        }
        if let (Some(lo), Some(hi)) = (self.u_min, self.u_max) {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return bad(format!("window [{lo}, {hi}] is empty or infinite"));
            }
        }
        if let Some(n) = self.node_count {
            if n < 16 {
                return bad(format!("node_count {n} below 16"));
            }
        }
        if let Rule::GaussPanels { order, panels } = self.rule {
            if order == 0 || panels == 0 {
                return bad("gauss panels need positive order and panel count".into());
            }
        }
        Ok(())
    }

    /// The window, defaulting to `[-40, 40]` when unset.
    pub fn window(&self) -> (f64, f64) {
        (self.u_min.unwrap_or(-40.0), self.u_max.unwrap_or(40.0))
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter().zip(&w).map(|(x, w)| (mid + half * x, half * w)).collect()
}

/// Composite Gauss-Legendre with `panels` equal panels on `[a, b]`.
pub fn gauss_panels(order: usize, panels: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let width = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let lo = a + p as f64 * width;
            gauss_legendre_on(order, lo, lo + width)
        })
        .collect()
}

/// The sine integral `Si(x) = \int_0^x sin(t)/t dt`.
///
/// Power series for `|x| <= 2`, otherwise the continued fraction for `E_1(ix)`
/// evaluated with the modified Lentz method.
pub fn sine_integral(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= 2.0 {
        let x2 = ax * ax;
        let mut term = ax;
        let mut sum = ax;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        use num_complex::Complex64;
        let tiny = 1e-300;
        let one = Complex64::new(1.0, 0.0);
        let mut b = Complex64::new(1.0, ax);
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = one / b;
        let mut h = d;
        for i in 1..200 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = one / (d * a + b);
            c = b + c.inv() * a;
            let del = c * d;
            h *= del;
            if (del - one).norm() < 1e-16 {
                break;
            }
        }
        // h * e^{-ix} = E_1(ix) = -Ci(x) + i (Si(x) - pi/2)
        let e1 = h * Complex64::from_polar(1.0, -ax);
        e1.im + PI / 2.0
    };
    value.copysign(x)
}
