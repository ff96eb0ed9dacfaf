//! Holomorphic functional calculus for matrices.
//!
//! `f(A) = (2 pi i)^{-1} \int_{Gamma_gamma} f(z) R(z, A) dz` is discretized with the
//! trapezoid rule in `u = ln |z|` on both rays (or with Gauss panels when asked).
//! Decaying symbols go straight through the contour integral, extended symbols
//! through `a I - b (I + rho A)^{-1} + h(A)`, and bounded symbols through the
//! regularization `f(A) = phi(A)^{-1} (f phi)(A)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, LuFactorization};
pub use crate::quadrature::{QuadratureSpec, Rule, Transform};
use crate::quadrature::gauss_panels;
use crate::sector::{self, RadiusGrid, SectorialCertificate};
use crate::symbols::{self, DecayCertificate, Symbol, SymbolClass};

/// Fraction of the analyticity strip used when choosing the trapezoid step.
const STRIP_FRACTION: f64 = 0.75;
/// Points per ray used for the contour-angle resolvent bound.
const BANK_K_GRID: usize = 60;
/// Neumann expansions are used where `|z| ||A^{-1}||` or `||A|| / |z|` is below this.
const SERIES_RATIO: f64 = 0.1;
const SERIES_TERMS: usize = 16;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A computed `f(A)` with its quadrature diagnostics.
#[derive(Debug, Clone)]
pub struct CalculusResult {
    pub matrix: ComplexMatrix,
    /// Norm of the difference between the last two refinements.
    pub quadrature_error_estimate: f64,
    pub contour_angle_used: f64,
    pub nodes_used: usize,
}

/// Summary of a calculus result, serializable for the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalculusReport {
    pub matrix: crate::linalg::MatrixFile,
    pub quadrature_error_estimate: f64,
    pub contour_angle_used: f64,
    pub nodes_used: usize,
}

impl From<&CalculusResult> for CalculusReport {
    fn from(r: &CalculusResult) -> Self {
        CalculusReport {
            matrix: r.matrix.clone().into(),
            quadrature_error_estimate: r.quadrature_error_estimate,
            contour_angle_used: r.contour_angle_used,
            nodes_used: r.nodes_used,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Ray {
    Lower,
    Upper,
}

impl Ray {
    pub(crate) const BOTH: [Ray; 2] = [Ray::Lower, Ray::Upper];

    pub(crate) fn index(self) -> usize {
        match self {
            Ray::Lower => 0,
            Ray::Upper => 1,
        }
    }
}

/// Values on the integer grid, stored densely and grown on demand.
#[derive(Debug, Clone)]
pub(crate) struct Lattice<T> {
    start: i64,
    slots: Vec<Option<T>>,
}

impl<T> Default for Lattice<T> {
    fn default() -> Self {
        Lattice {
            start: 0,
            slots: Vec::new(),
        }
    }
}

impl<T> Lattice<T> {
    pub(crate) fn get_or_try_insert_with(
        &mut self,
        k: i64,
        make: impl FnOnce() -> Result<T>,
    ) -> Result<&T> {
        if self.slots.is_empty() {
            self.start = k;
        }
        if k < self.start {
            let grow = (self.start - k) as usize;
            let mut slots = Vec::with_capacity(self.slots.len() + grow);
            slots.resize_with(grow, || None);
            slots.append(&mut self.slots);
            self.slots = slots;
            self.start = k;
        }
        let i = (k - self.start) as usize;
        if i >= self.slots.len() {
            self.slots.resize_with(i + 1, || None);
        }
        if self.slots[i].is_none() {
            self.slots[i] = Some(make()?);
        }
        Ok(self.slots[i].as_ref().expect("slot filled above"))
    }

    pub(crate) fn filled(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    /// Moves every value from `k` to `2k`.
    pub(crate) fn spread(self) -> Self {
        let mut slots = Vec::with_capacity(2 * self.slots.len());
        for (i, v) in self.slots.into_iter().enumerate() {
            if i > 0 {
                slots.push(None);
            }
            slots.push(v);
        }
        Lattice {
            start: 2 * self.start,
            slots,
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    matrix: ComplexMatrix,
    norm: f64,
    /// Real and imaginary parts, kept for real `A`.
    parts: Option<(Vec<f64>, Vec<f64>)>,
}

/// `e^{k h} phase`, the lattice point `k` on a ray.
pub(crate) fn lattice_point(h: f64, phase: Complex64, k: i64) -> Complex64 {
    phase * (k as f64 * h).exp()
}

/// Trapezoid nodes for one contour angle, on the anchored grid `u = k h`.
///
/// Stores `+- z R(z, A) / (2 pi i)` per node so that
/// `F(zeta A) ~ h sum_k F(zeta z_k) N_k`; resolvents are computed on first use and
/// shared across every symbol, dilation and rotation evaluated on the bank.
#[derive(Debug, Clone)]
pub struct ResolventBank {
    a: ComplexMatrix,
    gamma: f64,
    h: f64,
    k_gamma: f64,
    phases: [Complex64; 2],
    nodes: [Lattice<Node>; 2],
    /// For real `A` the upper node is the conjugate of the lower one.
    real: bool,
    series: TailSeries,
}

/// Neumann expansions of `z R(z, A)` for the far ends of the rays, where the
/// contour sum collapses to scalar moments against powers of `A`.
#[derive(Debug, Clone)]
struct TailSeries {
    /// For `|z| <= r0`, `z R(z) = -sum_{p >= 1} z^p A^{-p}`; holds `A^{-1}, ..., A^{-P}`.
    lower: Option<(f64, Vec<ComplexMatrix>)>,
    /// For `|z| >= r1`, `z R(z) = sum_{p >= 0} z^{-p} A^p`; holds `I, A, ..., A^P`.
    upper: Option<(f64, Vec<ComplexMatrix>)>,
}

impl TailSeries {
    fn new(a: &ComplexMatrix) -> Self {
        // moments cost about as much as direct accumulation on small matrices
        if a.dim() * a.dim() <= 2 * (SERIES_TERMS + 1) {
            return TailSeries {
                lower: None,
                upper: None,
            };
        }
        let powers = |base: &ComplexMatrix, first: ComplexMatrix| {
            let mut out = vec![first];
            while out.len() <= SERIES_TERMS {
                let next = out.last().expect("non-empty") * base;
                out.push(next);
            }
            out
        };
        let lower = a.inverse().ok().map(|inv| {
            let r0 = SERIES_RATIO / linalg::operator_norm(&inv);
            let mut p = powers(&inv, inv.clone());
            p.truncate(SERIES_TERMS);
            (r0, p)
        });
        let r1 = linalg::operator_norm(a) / SERIES_RATIO;
        let mut up = powers(a, ComplexMatrix::identity(a.dim()));
        up.truncate(SERIES_TERMS + 1);
        TailSeries {
            lower,
            upper: Some((r1, up)),
        }
    }
}

/// Options for one evaluation on a bank.
#[derive(Debug, Clone, Copy)]
pub struct BankEval {
    /// Absolute tolerance budget for truncation and skipped nodes.
    pub tol_abs: f64,
    /// Also accumulate the step-`2h` sum for an error estimate.
    pub coarse: bool,
    /// Explicit `u` window; derived from the certificate when `None`.
    pub window: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct BankSum {
    pub fine: ComplexMatrix,
    pub coarse: Option<ComplexMatrix>,
    pub nodes_used: usize,
    /// `sum |weight| ||N_k||_F`, the scale of rounding error in the sum.
    pub mass: f64,
}

impl BankSum {
    /// Floating-point noise floor of the accumulated sum.
    pub fn rounding_floor(&self) -> f64 {
        64.0 * f64::EPSILON * self.mass
    }
}

fn add_real_parts(acc: &mut [Complex64], p: Complex64, q: Complex64, x: &[f64], y: &[f64]) {
    let (ap, aq) = acc.split_at_mut(x.len());
    for (a, &x) in ap.iter_mut().zip(x) {
        a.re += p.re * x;
        a.im += p.im * x;
    }
    for (a, &y) in aq.iter_mut().zip(y) {
        a.re += q.re * y;
        a.im += q.im * y;
    }
}

impl ResolventBank {
    pub fn new(a: &ComplexMatrix, gamma: f64, h: f64) -> Result<Self> {
        let k_gamma = sector::estimate_k_theta(a, gamma, &RadiusGrid::with_points(BANK_K_GRID))?;
        Ok(ResolventBank {
            a: a.clone(),
            gamma,
            h,
            k_gamma,
            phases: [Complex64::from_polar(1.0, -gamma), Complex64::from_polar(1.0, gamma)],
            nodes: Default::default(),
            real: a.as_slice().iter().all(|z| z.im == 0.0),
            series: TailSeries::new(a),
        })
    }

    /// Trapezoid step for strip half-width `strip` and relative target `tol`,
    /// chosen so that the step-`2h` sum already meets `tol / 10`.
    pub fn step_for(strip: f64, tol: f64) -> f64 {
        PI * STRIP_FRACTION * strip / (10.0 / tol).ln()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    /// Sampled `sup ||z R(z, A)||` on the contour rays.
    pub fn resolvent_bound(&self) -> f64 {
        self.k_gamma
    }

    pub fn resolvents_computed(&self) -> usize {
        self.nodes.iter().map(Lattice::filled).sum()
    }

    /// Halves the step, keeping every node already computed.
    pub fn refine(&mut self) {
        self.h /= 2.0;
        self.nodes = std::mem::take(&mut self.nodes).map(Lattice::spread);
    }

    pub(crate) fn phase(&self, ray: Ray) -> Complex64 {
        self.phases[ray.index()]
    }

    /// `u` window outside which the certificate bounds the tail of `F(zeta z)` by `tol_abs / 4`.
    pub fn window_for(&self, cert: &DecayCertificate, zeta_modulus: f64, tol_abs: f64) -> (f64, f64) {
        let s = cert.s;
        let mut ln_r = (tol_abs * PI * s / (4.0 * cert.c * self.k_gamma)).ln() / s;
        if !(ln_r < 0.0) {
            ln_r = -1.0;
        }
        let shift = zeta_modulus.ln();
        (ln_r - shift, -ln_r - shift)
    }

    /// Lattice index range covering the `u` window.
    pub(crate) fn index_range(&self, window: (f64, f64)) -> (i64, i64) {
        ((window.0 / self.h).floor() as i64, (window.1 / self.h).ceil() as i64)
    }

    fn node(&mut self, ray: Ray, k: i64) -> Result<&Node> {
        let (h, phase, real) = (self.h, self.phases[ray.index()], self.real);
        let sign = if ray == Ray::Lower { 1.0 } else { -1.0 };
        let a = &self.a;
        self.nodes[ray.index()].get_or_try_insert_with(k, || {
            let z = lattice_point(h, phase, k);
            let r = linalg::resolvent_fast(a, z)?;
            let matrix = r.scale(z * sign / c64(0.0, 2.0 * PI));
            let norm = matrix.frobenius_norm();
            let parts = real.then(|| {
                let data = matrix.as_slice();
                (data.iter().map(|z| z.re).collect(), data.iter().map(|z| z.im).collect())
            });
            Ok(Node { matrix, norm, parts })
        })
    }

    /// `h sum_k value(ray, k) N_k` over both rays and `k_lo..=k_hi`, skipping
    /// nodes whose bounded contribution is below `skip`.
    pub(crate) fn accumulate(
        &mut self,
        (k_lo, k_hi): (i64, i64),
        coarse: bool,
        skip: f64,
        value: &mut dyn FnMut(Ray, i64) -> Complex64,
    ) -> Result<BankSum> {
        let h = self.h;
        let k0 = self.series.lower.as_ref().map_or(i64::MIN, |(r0, _)| (r0.ln() / h).floor() as i64);
        let k1 = self.series.upper.as_ref().map_or(i64::MAX, |(r1, _)| (r1.ln() / h).ceil() as i64);
        let core = (k_lo.max(k0.saturating_add(1)), k_hi.min(k1.saturating_sub(1)));
        let mut sum = if self.real {
            self.accumulate_real(core, coarse, skip, value)?
        } else {
            self.accumulate_direct(core, coarse, skip, value)?
        };
        if k_lo <= k0.min(k_hi) {
            self.add_tail(&mut sum, (k_lo, k0.min(k_hi)), false, skip, value);
        }
        if k1.max(k_lo) <= k_hi {
            self.add_tail(&mut sum, (k1.max(k_lo), k_hi), true, skip, value);
        }
        Ok(sum)
    }

    /// Adds the series form of the nodes in `range`, all on one side of the core.
    fn add_tail(
        &self,
        sum: &mut BankSum,
        (k_lo, k_hi): (i64, i64),
        upper_end: bool,
        skip: f64,
        value: &mut dyn FnMut(Ray, i64) -> Complex64,
    ) {
        let h = self.h;
        let n = self.a.dim();
        let node_bound = self.k_gamma * h / (2.0 * PI);
        let node_norm = self.k_gamma * (n as f64).sqrt() / (2.0 * PI);
        let side = if upper_end { &self.series.upper } else { &self.series.lower };
        let powers = &side.as_ref().expect("tails exist only with their series").1;
        let zero = Complex64::new(0.0, 0.0);
        let mut mu = vec![zero; powers.len()];
        let mut mu_coarse = sum.coarse.as_ref().map(|_| vec![zero; powers.len()]);
        for k in k_lo..=k_hi {
            for ray in Ray::BOTH {
                let v = value(ray, k);
                if v.norm() * node_bound < skip {
                    continue;
                }
                sum.nodes_used += 1;
                sum.mass += v.norm() * h * node_norm;
                let z = lattice_point(h, self.phases[ray.index()], k);
                let sign = if ray == Ray::Lower { 1.0 } else { -1.0 };
                // lower tail: z R(z) = -sum z^p A^{-p}; upper tail: sum z^{-p} A^p
                let (mut pw, step, c) = if upper_end {
                    (Complex64::new(1.0, 0.0), z.inv(), v * sign)
                } else {
                    (z, z, -v * sign)
                };
                let even = k % 2 == 0;
                for p in 0..powers.len() {
                    mu[p] += c * pw;
                    if let (Some(mc), true) = (mu_coarse.as_mut(), even) {
                        mc[p] += c * pw * 2.0;
                    }
                    pw *= step;
                }
            }
        }
        let scale = Complex64::new(h, 0.0) / c64(0.0, 2.0 * PI);
        for (p, m) in powers.iter().enumerate() {
            sum.fine.axpy(mu[p] * scale, m);
        }
        if let (Some(c), Some(mc)) = (sum.coarse.as_mut(), mu_coarse) {
            for (p, m) in powers.iter().enumerate() {
                c.axpy(mc[p] * scale, m);
            }
        }
    }

    fn accumulate_direct(
        &mut self,
        range: (i64, i64),
        coarse: bool,
        skip: f64,
        value: &mut dyn FnMut(Ray, i64) -> Complex64,
    ) -> Result<BankSum> {
        let n = self.a.dim();
        let h = self.h;
        let mut fine = ComplexMatrix::zeros(n);
        let mut coarse = coarse.then(|| ComplexMatrix::zeros(n));
        let node_bound = self.k_gamma * h / (2.0 * PI);
        let mut used = 0;
        let mut mass = 0.0;
        for ray in Ray::BOTH {
            for k in range.0..=range.1 {
                let v = value(ray, k);
                if v.norm() * node_bound < skip {
                    continue;
                }
                used += 1;
                let node = self.node(ray, k)?;
                mass += v.norm() * h * node.norm;
                fine.axpy(v * h, &node.matrix);
                if let Some(c) = coarse.as_mut() {
                    if k % 2 == 0 {
                        c.axpy(v * (2.0 * h), &node.matrix);
                    }
                }
            }
        }
        Ok(BankSum {
            fine,
            coarse,
            nodes_used: used,
            mass,
        })
    }

    /// With `N = X + iY` on the lower ray and `conj(N)` on the upper one,
    /// `a N + b conj(N) = (a + b) X + i (a - b) Y`.
    fn accumulate_real(
        &mut self,
        (k_lo, k_hi): (i64, i64),
        coarse: bool,
        skip: f64,
        value: &mut dyn FnMut(Ray, i64) -> Complex64,
    ) -> Result<BankSum> {
        let n = self.a.dim();
        let h = self.h;
        let node_bound = self.k_gamma * h / (2.0 * PI);
        let mut acc = vec![Complex64::new(0.0, 0.0); 2 * n * n];
        let mut acc_coarse = coarse.then(|| vec![Complex64::new(0.0, 0.0); 2 * n * n]);
        let mut used = 0;
        let mut mass = 0.0;
        for k in k_lo..=k_hi {
            let va = value(Ray::Lower, k);
            let vb = value(Ray::Upper, k);
            let keep_a = va.norm() * node_bound >= skip;
            let keep_b = vb.norm() * node_bound >= skip;
            if !keep_a && !keep_b {
                continue;
            }
            let va = if keep_a { va } else { Complex64::new(0.0, 0.0) };
            let vb = if keep_b { vb } else { Complex64::new(0.0, 0.0) };
            used += keep_a as usize + keep_b as usize;
            let node = self.node(Ray::Lower, k)?;
            mass += (va.norm() + vb.norm()) * h * node.norm;
            let (x, y) = node.parts.as_ref().expect("real bank stores parts");
            let (p, q) = ((va + vb) * h, (va - vb) * h);
            add_real_parts(&mut acc, p, q, x, y);
            if let Some(c) = acc_coarse.as_mut() {
                if k % 2 == 0 {
                    add_real_parts(c, p * 2.0, q * 2.0, x, y);
                }
            }
        }
        let assemble = |acc: Vec<Complex64>| {
            let (p, q) = acc.split_at(n * n);
            let data = p.iter().zip(q).map(|(p, q)| p + Complex64::i() * q).collect();
            ComplexMatrix::from_row_major(n, data).expect("square by construction")
        };
        Ok(BankSum {
            fine: assemble(acc),
            coarse: acc_coarse.map(assemble),
            nodes_used: used,
            mass,
        })
    }

    /// `F(zeta A)` for `F` with certificate `cert`.
    pub fn evaluate(
        &mut self,
        f: &dyn Fn(Complex64) -> Complex64,
        cert: &DecayCertificate,
        zeta: Complex64,
        opts: BankEval,
    ) -> Result<BankSum> {
        if cert.c == 0.0 {
            let n = self.a.dim();
            return Ok(BankSum {
                fine: ComplexMatrix::zeros(n),
                coarse: opts.coarse.then(|| ComplexMatrix::zeros(n)),
                nodes_used: 0,
                mass: 0.0,
            });
        }
        let window = opts
            .window
            .unwrap_or_else(|| self.window_for(cert, zeta.norm(), opts.tol_abs));
        let range = self.index_range(window);
        let count = 2 * (range.1 - range.0 + 1).max(1) as usize;
        let skip = opts.tol_abs / (8.0 * count as f64);
        let (h, phases) = (self.h, self.phases);
        self.accumulate(range, opts.coarse, skip, &mut |ray, k| {
            f(zeta * lattice_point(h, phases[ray.index()], k))
        })
    }
}

fn check_gamma(cert: &SectorialCertificate, gamma: f64, theta: f64) -> Result<()> {
    if !(gamma > cert.omega && gamma < theta) {
        return Err(Error::AngleOutOfRange {
            angle: gamma,
            lower: cert.omega,
            upper: theta,
        });
    }
    Ok(())
}

/// The default contour angle `(omega + theta) / 2`.
pub fn default_gamma(cert: &SectorialCertificate, f: &Symbol) -> f64 {
    0.5 * (cert.omega + f.half_angle())
}

/// Lower bound for `||f(A)||` from the spectrum, floored relative to the certificate.
fn magnitude_floor(a: &ComplexMatrix, f: &Symbol, cert: &DecayCertificate) -> f64 {
    let spectral = linalg::eigenvalues(a)
        .into_iter()
        .filter(|z| f.domain_contains(*z))
        .map(|z| f.eval(z).norm())
        .fold(0.0, f64::max);
    spectral.max(1e-8 * cert.peak())
}

/// `f(A)` by the contour integral, for `f` with a decay certificate.
pub fn fcalc_h0(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    gamma: Option<f64>,
    quad: &QuadratureSpec,
) -> Result<CalculusResult> {
    quad.validate()?;
    let decay = *f.certificate().ok_or_else(|| Error::WrongSymbolClass {
        symbol: f.label().to_string(),
        expected: "decaying",
    })?;
    let theta = f.half_angle();
    let gamma = gamma.unwrap_or_else(|| default_gamma(cert, f));
    check_gamma(cert, gamma, theta)?;
    let n = a.dim();
    if f.is_zero() {
        return Ok(CalculusResult {
            matrix: ComplexMatrix::zeros(n),
            quadrature_error_estimate: 0.0,
            contour_angle_used: gamma,
            nodes_used: 0,
        });
    }
    let floor = magnitude_floor(a, f, &decay);
    match quad.rule {
        Rule::Trapezoid => trapezoid_h0(a, cert, f, &decay, gamma, quad, floor),
        Rule::GaussPanels { order, panels } => {
            panels_h0(a, cert, f, &decay, gamma, quad, floor, order, panels)
        }
    }
}

fn trapezoid_h0(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    decay: &DecayCertificate,
    gamma: f64,
    quad: &QuadratureSpec,
    floor: f64,
) -> Result<CalculusResult> {
    let tol = quad.target_tol;
    let strip = (gamma - cert.omega).min(f.half_angle() - gamma);
    let mut h = ResolventBank::step_for(strip, tol);
    let mut window = match (quad.u_min, quad.u_max) {
        (None, None) => None,
        _ => Some(quad.window()),
    };
    let mut bank = ResolventBank::new(a, gamma, h)?;
    if let Some(m) = quad.node_count {
        let (lo, hi) = window.unwrap_or_else(|| bank.window_for(decay, 1.0, tol * floor));
        window = Some((lo, hi));
        h = (hi - lo) / (m - 1) as f64;
        bank = ResolventBank { h, ..bank };
    }
    let eval = |z: Complex64| f.eval(z);
    let mut last_err = f64::INFINITY;
    for _ in 0..=quad.max_refinements {
        let sum = bank.evaluate(
            &eval,
            decay,
            c64(1.0, 0.0),
            BankEval {
                tol_abs: tol * floor,
                coarse: true,
                window,
            },
        )?;
        let floor_round = sum.rounding_floor();
        let coarse = sum.coarse.expect("coarse sum requested");
        let err = (&sum.fine - &coarse).frobenius_norm();
        let scale = sum.fine.frobenius_norm().max(floor);
        if err <= tol * scale + floor_round {
            return Ok(CalculusResult {
                matrix: sum.fine,
                quadrature_error_estimate: err,
                contour_angle_used: gamma,
                nodes_used: sum.nodes_used,
            });
        }
        last_err = err / scale;
        bank.refine();
    }
    Err(Error::QuadratureNotConverged {
        estimate: last_err,
        tolerance: tol,
    })
}

#[allow(clippy::too_many_arguments)]
fn panels_h0(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    decay: &DecayCertificate,
    gamma: f64,
    quad: &QuadratureSpec,
    floor: f64,
    order: usize,
    panels: usize,
) -> Result<CalculusResult> {
    let tol = quad.target_tol;
    let (lo, hi) = match (quad.u_min, quad.u_max) {
        (None, None) => {
            let bank = ResolventBank::new(a, gamma, 1.0)?;
            bank.window_for(decay, 1.0, tol * floor)
        }
        _ => quad.window(),
    };
    let _ = cert;
    let n = a.dim();
    let sum_for = |panels: usize| -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(n);
        for (u, w) in gauss_panels(order, panels, lo, hi) {
            for (sign, angle) in [(1.0, -gamma), (-1.0, gamma)] {
                let z = Complex64::from_polar(u.exp(), angle);
                let r = linalg::resolvent_fast(a, z)?;
                out.axpy(f.eval(z) * z * (sign * w) / c64(0.0, 2.0 * PI), &r);
            }
        }
        Ok(out)
    };
    let mut panels = panels;
    let mut previous = sum_for(panels)?;
    let mut last_err = f64::INFINITY;
    for _ in 0..=quad.max_refinements {
        panels *= 2;
        let current = sum_for(panels)?;
        let err = (&current - &previous).frobenius_norm();
        let scale = current.frobenius_norm().max(floor);
        if err <= tol * scale {
            return Ok(CalculusResult {
                matrix: current,
                quadrature_error_estimate: err,
                contour_angle_used: gamma,
                nodes_used: 2 * order * panels,
            });
        }
        last_err = err / scale;
        previous = current;
    }
    Err(Error::QuadratureNotConverged {
        estimate: last_err,
        tolerance: tol,
    })
}

/// `(I + rho A)^{-1}`, or `SingularShift`.
fn shifted_inverse(a: &ComplexMatrix, rho: Complex64) -> Result<ComplexMatrix> {
    let s = a.scale(rho).shift(c64(1.0, 0.0));
    let lu = LuFactorization::new(&s)?;
    if lu.is_singular() {
        return Err(Error::SingularShift);
    }
    Ok(lu.into_inverse())
}

/// The elementary calculus on the extended class:
/// `u_A(a + b R_{-1}(rho .) + h) = a I - b (I + rho A)^{-1} + h(A)`.
pub fn u_a(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    gamma: Option<f64>,
    quad: &QuadratureSpec,
) -> Result<CalculusResult> {
    let parts = match f.class() {
        SymbolClass::Extended(parts) => parts.clone(),
        SymbolClass::Decaying(_) => return fcalc_h0(a, cert, f, gamma, quad),
        SymbolClass::Bounded { .. } => {
            return Err(Error::WrongSymbolClass {
                symbol: f.label().to_string(),
                expected: "extended",
            })
        }
    };
    let n = a.dim();
    let mut matrix = ComplexMatrix::identity(n).scale(parts.constant);
    if parts.resolvent != c64(0.0, 0.0) {
        let inv = shifted_inverse(a, parts.scale)?;
        matrix.axpy(-parts.resolvent, &inv);
    }
    let gamma = gamma.unwrap_or_else(|| default_gamma(cert, f));
    check_gamma(cert, gamma, f.half_angle())?;
    let (error, nodes) = if parts.decaying.is_zero() {
        (0.0, 0)
    } else {
        let h = fcalc_h0(a, cert, &parts.decaying, Some(gamma), quad)?;
        matrix.axpy(c64(1.0, 0.0), &h.matrix);
        (h.quadrature_error_estimate, h.nodes_used)
    };
    Ok(CalculusResult {
        matrix,
        quadrature_error_estimate: error,
        contour_angle_used: gamma,
        nodes_used: nodes,
    })
}

/// `phi(A)^{-1} = (I + A) A^{-1} (I + A)`.
pub fn phi_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let lu = LuFactorization::new(a)?;
    if lu.is_singular() {
        return Err(Error::SingularOperator);
    }
    let shift = a.shift(c64(1.0, 0.0));
    shifted_inverse(a, c64(1.0, 0.0))?;
    Ok(&(&shift * &lu.into_inverse()) * &shift)
}

/// Bounded calculus by regularization: `f(A) = phi(A)^{-1} (f phi)(A)`.
pub fn fcalc_bounded(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    gamma: Option<f64>,
    quad: &QuadratureSpec,
) -> Result<CalculusResult> {
    let phi_inv = phi_inverse(a)?;
    let phi = symbols::make_phi(f.half_angle())?;
    let regularized = symbols::multiply(f, &phi)?;
    let phi_a = &a.clone() * &shifted_inverse(a, c64(1.0, 0.0))?;
    let phi_a = &phi_a * &shifted_inverse(a, c64(1.0, 0.0))?;
    let inv_norm = linalg::operator_norm(&phi_inv);
    let condition = linalg::operator_norm(&phi_a) * inv_norm;
    let inner = QuadratureSpec {
        target_tol: (quad.target_tol / (10.0 * condition.max(1.0))).max(1e-15),
        ..*quad
    };
    let gamma = gamma.unwrap_or_else(|| default_gamma(cert, f));
    let b = fcalc_h0(a, cert, &regularized, Some(gamma), &inner)?;
    Ok(CalculusResult {
        matrix: &phi_inv * &b.matrix,
        quadrature_error_estimate: inv_norm * b.quadrature_error_estimate,
        contour_angle_used: gamma,
        nodes_used: b.nodes_used,
    })
}

/// Dispatches on the symbol class.
pub fn apply(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    gamma: Option<f64>,
    quad: &QuadratureSpec,
) -> Result<CalculusResult> {
    match f.class() {
        SymbolClass::Decaying(_) => fcalc_h0(a, cert, f, gamma, quad),
        SymbolClass::Extended(_) => u_a(a, cert, f, gamma, quad),
        SymbolClass::Bounded { .. } => fcalc_bounded(a, cert, f, gamma, quad),
    }
}

/// `A^{is}` as the bounded calculus of `z^{is}` on the sector of half-angle `(omega + pi) / 2`.
pub fn imaginary_power(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    s: f64,
    gamma: Option<f64>,
    quad: &QuadratureSpec,
) -> Result<CalculusResult> {
    let theta = 0.5 * (cert.omega + PI);
    let fs = symbols::make_fs(s, theta)?;
    fcalc_bounded(a, cert, &fs, gamma, quad)
}

/// `T_z = e^{-zA}` through the extended class; `T_0 = I`.
pub fn semigroup(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    z: Complex64,
    quad: &QuadratureSpec,
) -> Result<CalculusResult> {
    let n = a.dim();
    if z == c64(0.0, 0.0) {
        return Ok(CalculusResult {
            matrix: ComplexMatrix::identity(n),
            quadrature_error_estimate: 0.0,
            contour_angle_used: f64::NAN,
            nodes_used: 0,
        });
    }
    let limit = PI / 2.0 - cert.omega;
    let arg = z.arg();
    if !(limit > 0.0 && arg.abs() < limit) {
        return Err(Error::AngleOutOfRange {
            angle: arg,
            lower: -limit.max(0.0),
            upper: limit.max(0.0),
        });
    }
    let base_angle = 0.5 * (PI / 2.0 + cert.omega + arg.abs());
    let base = symbols::make_semigroup_symbol(z.norm(), base_angle)?;
    let symbol = if arg == 0.0 {
        base
    } else {
        symbols::dilate(&base, Complex64::from_polar(1.0, arg))?
    };
    u_a(a, cert, &symbol, None, quad)
}

/// `|| tilde f(A*) - f(A)* ||`.
pub fn adjoint_calculus_check(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    gamma: Option<f64>,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let direct = apply(a, cert, f, gamma, quad)?;
    let tilde = symbols::tilde(f)?;
    let dual = apply(&linalg::adjoint(a), cert, &tilde, gamma, quad)?;
    Ok(linalg::operator_norm(&(&dual.matrix - &linalg::adjoint(&direct.matrix))))
}

/// The decomposition `X = N(A) + R(A)`.
#[derive(Debug, Clone)]
pub struct KernelRangeSplit {
    /// Projection onto `N(A)` along `R(A)`.
    pub projection: ComplexMatrix,
    /// `A` on an orthonormal basis of `R(A)`; `None` when `A = 0`.
    pub restricted: Option<ComplexMatrix>,
    /// Columns: a kernel basis followed by an orthonormal range basis.
    pub basis: ComplexMatrix,
    pub kernel_dim: usize,
}

/// Splits off the kernel; fails when kernel and range intersect.
pub fn kernel_range_split(a: &ComplexMatrix) -> Result<KernelRangeSplit> {
    let n = a.dim();
    let svd = a.to_nalgebra().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v = svd.v_t.expect("right singular vectors requested").adjoint();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = 1e-12 * smax.max(1.0) * n as f64;
    let rank = order.iter().filter(|&&i| svd.singular_values[i] > cutoff).count();
    let kernel_dim = n - rank;

    let mut basis = ComplexMatrix::zeros(n);
    for (col, &i) in order[rank..].iter().enumerate() {
        for row in 0..n {
            basis[(row, col)] = v[(row, i)];
        }
    }
    let mut range = ComplexMatrix::zeros(n);
    for (col, &i) in order[..rank].iter().enumerate() {
        for row in 0..n {
            basis[(row, kernel_dim + col)] = u[(row, i)];
            range[(row, col)] = u[(row, i)];
        }
    }
    let lu = LuFactorization::new(&basis)?;
    if lu.rcond() < 1e-10 {
        return Err(Error::NotSectorialSplit);
    }
    let basis_inv = lu.into_inverse();
    let mut selector = ComplexMatrix::zeros(n);
    for i in 0..kernel_dim {
        selector[(i, i)] = c64(1.0, 0.0);
    }
    let projection = &(&basis * &selector) * &basis_inv;
    let restricted = (rank > 0).then(|| {
        let full = &(&linalg::adjoint(&range) * a) * &range;
        let mut r = ComplexMatrix::zeros(rank);
        for i in 0..rank {
            for j in 0..rank {
                r[(i, j)] = full[(i, j)];
            }
        }
        r
    });
    Ok(KernelRangeSplit {
        projection,
        restricted,
        basis,
        kernel_dim,
    })
}

/// Element-wise `||fcalc - oracle||` report used by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleComparison {
    pub oracle: String,
    pub difference: f64,
    pub oracle_norm: f64,
}

/// Compares against the spectral oracle, or the Jordan oracle for 2x2 Jordan blocks.
pub fn oracle_comparison(a: &ComplexMatrix, f: &Symbol, computed: &ComplexMatrix) -> Result<OracleComparison> {
    let (name, oracle) = match linalg::spectral_oracle(a, f) {
        Ok(m) => ("spectral", m),
        Err(Error::NotDiagonalizable { condition }) => {
            let is_jordan = a.dim() == 2
                && a[(1, 0)] == c64(0.0, 0.0)
                && a[(0, 0)] == a[(1, 1)]
                && a[(0, 1)] != c64(0.0, 0.0);
            if !is_jordan {
                return Err(Error::NotDiagonalizable { condition });
            }
            // f(J) for J = lambda I + b N is [[f, b f'], [0, f]]
            let unit = linalg::jordan_oracle_2x2(a[(0, 0)], f, None)?;
            let mut m = unit;
            m[(0, 1)] *= a[(0, 1)];
            ("jordan", m)
        }
        Err(e) => return Err(e),
    };
    Ok(OracleComparison {
        oracle: name.to_string(),
        difference: linalg::operator_norm(&(computed - &oracle)),
        oracle_norm: linalg::operator_norm(&oracle),
    })
}
