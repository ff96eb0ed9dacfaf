//! Square functions and area integral functions.
//!
//! With `F(zA) = F_z(A)` from the contour calculus:
//!
//! * square function `(\int_0^\infty ||F(tA)x||^2 dt/t)^{1/2}`, truncated to `t > epsilon`;
//! * area function `(\int_{-alpha}^{alpha} ds \int_0^\infty ||F(t e^{is} A)x||^2 dt/t)^{1/2}`,
//!   truncated to `t > delta`.
//!
//! Radial integrals use the trapezoid rule in `ln t` on the contour lattice, so
//! symbol values are shared between radial and contour nodes; truncated
//! integrals integrate the sinc interpolant of the same samples. Sampling
//! marches outward from the spectral window until the integrand is
//! negligible; angular integrals use Gauss-Legendre in `s`.
//! All samples `x` are processed together: each `F(zA)` is formed once and
//! applied to every sample.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcalc::{self, lattice_point, Lattice, Ray, ResolventBank};
use crate::linalg::{self, vector_norm, ComplexMatrix};
use crate::quadrature::{gauss_legendre_on, sine_integral, QuadratureSpec};
use crate::sector::SectorialCertificate;
use crate::symbols::{DecayCertificate, Symbol};

/// Margin kept between the aperture and its upper limit `theta - omega`.
pub const ALPHA_MARGIN: f64 = 1e-3;
const MARCH_RUN: usize = 4;
const MARCH_LIMIT: f64 = 400.0;

/// Tolerances for the quadratic functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticSpec {
    /// Relative tolerance on the squared functional.
    pub target_tol: f64,
    pub max_refinements: u32,
    pub angular_nodes: usize,
    pub max_angular_nodes: usize,
}

impl Default for QuadraticSpec {
    fn default() -> Self {
        QuadraticSpec {
            target_tol: 1e-8,
            max_refinements: 4,
            angular_nodes: 32,
            max_angular_nodes: 256,
        }
    }
}

impl QuadraticSpec {
    pub fn with_tol(target_tol: f64) -> Self {
        QuadraticSpec {
            target_tol,
            ..Default::default()
        }
    }

    fn inner_tol(&self) -> f64 {
        self.target_tol / 10.0
    }
}

/// Quadrature actually used for a functional value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    /// Smallest and largest `t` sampled.
    pub radial_window: (f64, f64),
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub contour_step: f64,
    pub contour_angle: f64,
}

/// A computed square or area function value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub value: f64,
    pub error_estimate: f64,
    pub grid: GridInfo,
}

/// Apertures and truncation radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub epsilon: f64,
}

/// Largest admissible aperture for `F` and `A`: `theta - omega - ALPHA_MARGIN`.
pub fn max_alpha(cert: &SectorialCertificate, f: &Symbol) -> f64 {
    f.half_angle() - cert.omega - ALPHA_MARGIN
}

pub fn check_alpha(cert: &SectorialCertificate, f: &Symbol, alpha: f64) -> Result<()> {
    let upper = max_alpha(cert, f);
    if !(alpha > 0.0 && alpha < upper) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            upper: upper.max(0.0),
        });
    }
    Ok(())
}

/// Fixed-seed complex Gaussian vectors normalized to unit length.
pub fn sample_vectors(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v: Vec<Complex64> = (0..n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect();
            let norm = vector_norm(&v);
            v.into_iter().map(|z| z / norm).collect()
        })
        .collect()
}

/// `F(e^{i h} rot)` on the contour lattice for one rotation `e^{is}`, per ray.
struct ScalarLattice {
    rot: [Complex64; 2],
    h: f64,
    values: [Lattice<Complex64>; 2],
}

impl ScalarLattice {
    fn new(bank: &ResolventBank, s: f64) -> Self {
        let rotation = Complex64::from_polar(1.0, s);
        ScalarLattice {
            rot: [rotation * bank.phase(Ray::Lower), rotation * bank.phase(Ray::Upper)],
            h: bank.step(),
            values: Default::default(),
        }
    }

    fn value(&mut self, f: &Symbol, ray: Ray, i: i64) -> Complex64 {
        let (h, rot) = (self.h, self.rot[ray.index()]);
        *self.values[ray.index()]
            .get_or_try_insert_with(i, || Ok(f.eval(lattice_point(h, rot, i))))
            .expect("symbol evaluation is infallible")
    }
}

#[derive(Debug, Clone)]
struct RadialOutcome {
    values: Vec<f64>,
    errors: Vec<f64>,
    /// Untruncated integral, the scale below which truncated values need no accuracy.
    full: Vec<f64>,
    window: (f64, f64),
    nodes: usize,
}

/// `H (1/2 + Si(pi (tau - a) / H) / pi)`: the integral over `[a, infinity)` of
/// the cardinal sine centred at `tau` with spacing `H`.
fn sinc_tail_weight(tau: f64, a: f64, step: f64) -> f64 {
    step * (0.5 + sine_integral(PI * (tau - a) / step) / PI)
}

/// Radial samples `g_j(tau) = ||B F(e^{tau + is} A) x_j||^2` on the lattice
/// `tau = i h`, keyed by `i`, with nodes `m` lattice steps apart.
struct Profile {
    nodes: BTreeMap<i64, Vec<f64>>,
    m: i64,
    h: f64,
}

impl Profile {
    fn lo(&self) -> i64 {
        *self.nodes.keys().next().expect("non-empty profile")
    }

    fn hi(&self) -> i64 {
        *self.nodes.keys().next_back().expect("non-empty profile")
    }

    fn full_line(&self, samples: usize) -> Vec<f64> {
        let step = self.m as f64 * self.h;
        let mut out = vec![0.0; samples];
        for g in self.nodes.values() {
            for (o, gj) in out.iter_mut().zip(g) {
                *o += step * gj;
            }
        }
        out
    }

    /// Step-`H` and step-`2H` approximations of `\int_a^\infty g d tau`.
    ///
    /// Truncated integrals integrate the sinc interpolant of the samples, which
    /// keeps every truncation on the same nodes.
    fn integrate(&self, a: Option<f64>, samples: usize) -> (Vec<f64>, Vec<f64>) {
        let step = self.m as f64 * self.h;
        let mut fine = vec![0.0; samples];
        let mut coarse = vec![0.0; samples];
        if let Some(a) = a {
            if a > self.hi() as f64 * self.h {
                return (fine, coarse);
            }
        }
        for (&i, g) in &self.nodes {
            let tau = i as f64 * self.h;
            let even = (i / self.m) % 2 == 0;
            let (wf, wc) = match a {
                None => (step, 2.0 * step),
                Some(a) => (
                    sinc_tail_weight(tau, a, step),
                    if even { sinc_tail_weight(tau, a, 2.0 * step) } else { 0.0 },
                ),
            };
            for j in 0..samples {
                fine[j] += wf * g[j];
                if even {
                    coarse[j] += wc * g[j];
                }
            }
        }
        (fine, coarse)
    }

    /// Bounds for the parts of the integral beyond the sampled range.
    fn tails(&self, a: Option<f64>, rate: f64, samples: usize) -> Vec<f64> {
        let (lo, hi) = (self.lo(), self.hi());
        let step = self.m as f64 * self.h;
        let lower_weight = match a {
            None => 1.0,
            Some(a) => (sinc_tail_weight(lo as f64 * self.h, a, step) / step)
                .abs()
                .max(step / (PI * (a - lo as f64 * self.h).abs().max(step))),
        };
        (0..samples)
            .map(|j| (self.nodes[&lo][j] * lower_weight + self.nodes[&hi][j]) / rate)
            .collect()
    }
}

/// Evaluates `||B F(zeta A) x_j||^2` for a batch of samples on a shared resolvent bank.
struct Engine<'a> {
    cert: &'a SectorialCertificate,
    f: &'a Symbol,
    decay: DecayCertificate,
    bank: ResolventBank,
    weight: Option<ComplexMatrix>,
    xs: &'a [Vec<Complex64>],
    tol_abs: f64,
    spec: QuadraticSpec,
    floors: Vec<f64>,
}

impl<'a> Engine<'a> {
    fn new(
        a: &ComplexMatrix,
        cert: &'a SectorialCertificate,
        f: &'a Symbol,
        max_rotation: f64,
        weight: Option<ComplexMatrix>,
        xs: &'a [Vec<Complex64>],
        spec: QuadraticSpec,
    ) -> Result<Self> {
        let decay = *f.certificate().ok_or_else(|| Error::WrongSymbolClass {
            symbol: f.label().to_string(),
            expected: "decaying",
        })?;
        let n = a.dim();
        if let Some(bad) = xs.iter().find(|x| x.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let reduced = f.half_angle() - max_rotation;
        if !(reduced > cert.omega) {
            return Err(Error::AlphaOutOfRange {
                alpha: max_rotation,
                upper: (f.half_angle() - cert.omega).max(0.0),
            });
        }
        let gamma = 0.5 * (cert.omega + reduced);
        let strip = 0.5 * (reduced - cert.omega);
        let inner = spec.inner_tol();
        let bank = ResolventBank::new(a, gamma, ResolventBank::step_for(strip, inner))?;
        let weight_norm = weight.as_ref().map(linalg::operator_norm).unwrap_or(1.0);
        let tol_abs = inner * f.sup_norm().value.max(decay.peak() * 1e-6) * bank.resolvent_bound();
        let floors = xs
            .iter()
            .map(|x| 1e-24 * vector_norm(x).powi(2) * weight_norm.powi(2))
            .collect();
        Ok(Engine {
            cert,
            f,
            decay,
            bank,
            weight,
            xs,
            tol_abs,
            spec,
            floors,
        })
    }

    fn grid(&self, radial: &RadialOutcome, angular_nodes: usize) -> GridInfo {
        GridInfo {
            radial_window: radial.window,
            radial_nodes: radial.nodes,
            angular_nodes,
            contour_step: self.bank.step(),
            contour_angle: self.bank.gamma(),
        }
    }

    /// `||B F(e^{i h} e^{is} A) x_j||^2` at lattice index `i`.
    fn squares_at(&mut self, scalars: &mut ScalarLattice, i: i64) -> Result<Vec<f64>> {
        let f = self.f;
        let h = self.bank.step();
        let window = self.bank.window_for(&self.decay, (i as f64 * h).exp(), self.tol_abs);
        let range = self.bank.index_range(window);
        let count = 2 * (range.1 - range.0 + 1).max(1) as usize;
        let skip = self.tol_abs / (8.0 * count as f64);
        let sum = self
            .bank
            .accumulate(range, false, skip, &mut |ray, k| scalars.value(f, ray, i + k))?;
        let m = match &self.weight {
            Some(b) => b * &sum.fine,
            None => sum.fine,
        };
        Ok(self
            .xs
            .iter()
            .map(|x| m.mul_vec(x).iter().map(|z| z.norm_sqr()).sum())
            .collect())
    }

    /// `\int ||F(t e^{is} A) x_j||^2 dt/t` over `t > truncation` for every sample
    /// and every requested truncation.
    fn radial(&mut self, s: f64, truncations: &[Option<f64>]) -> Result<Vec<RadialOutcome>> {
        let cuts: Vec<Option<f64>> = truncations
            .iter()
            .map(|t| match *t {
                None => Ok(None),
                Some(d) if d > 0.0 && d.is_finite() => Ok(Some(d.ln())),
                Some(d) => Err(Error::InvalidQuadratureSpec(format!(
                    "truncation radius {d} must be positive"
                ))),
            })
            .collect::<Result<_>>()?;
        let samples = self.xs.len();
        let tol = self.spec.target_tol;
        let strip = self.f.half_angle() - self.cert.omega - s.abs();
        let target_step = if cuts.iter().any(Option::is_some) {
            // the step-2H sinc sum must already meet the tolerance
            0.5 * ResolventBank::step_for(strip, tol)
        } else {
            ResolventBank::step_for(strip, tol)
        };
        let rho = if self.cert.spectral_radius > 0.0 { self.cert.spectral_radius } else { 1.0 };
        let lam = if self.cert.min_modulus > 0.0 { self.cert.min_modulus } else { rho };
        let (core_lo, core_hi) = ((-2.0f64).exp() / rho, 2f64.exp() / lam);
        let rate = (2.0 * self.decay.s).min(1.0);

        let mut scalars = ScalarLattice::new(&self.bank, s);
        let mut h = self.bank.step();
        let mut m: i64 = 1;
        while 2.0 * m as f64 * h <= target_step {
            m *= 2;
        }
        let snap = |x: f64, h: f64, m: i64, up: bool| -> i64 {
            let q = x / (h * m as f64);
            (if up { q.ceil() } else { q.floor() }) as i64 * m
        };
        let mut profile = Profile {
            nodes: BTreeMap::new(),
            m,
            h,
        };
        let mut i = snap(core_lo.ln(), h, m, false);
        while i <= snap(core_hi.ln(), h, m, true) {
            let g = self.squares_at(&mut scalars, i)?;
            profile.nodes.insert(i, g);
            i += m;
        }
        let mut scale: Option<Vec<f64>> = None;
        let mut refinements = 0;
        loop {
            // march outward until MARCH_RUN consecutive nodes are negligible
            for dir in [1i64, -1] {
                let mut run = 0;
                while run < MARCH_RUN {
                    let i = if dir > 0 { profile.hi() + m } else { profile.lo() - m };
                    if (i as f64 * h).abs() > MARCH_LIMIT {
                        return Err(Error::QuadratureNotConverged {
                            estimate: f64::INFINITY,
                            tolerance: tol,
                        });
                    }
                    let g = self.squares_at(&mut scalars, i)?;
                    let reference = match &scale {
                        Some(sc) => sc.clone(),
                        None => profile.full_line(samples),
                    };
                    let negligible = g.iter().enumerate().all(|(j, &gj)| {
                        gj / rate <= 0.05 * tol * reference[j].max(self.floors[j])
                    });
                    run = if negligible { run + 1 } else { 0 };
                    profile.nodes.insert(i, g);
                }
            }
            let full = profile.full_line(samples);
            let mut outcomes = Vec::with_capacity(cuts.len());
            let mut discretization_ok = true;
            let mut tails_ok = true;
            let mut worst = 0.0f64;
            let mut smallest = full.clone();
            for cut in &cuts {
                let (fine, coarse) = profile.integrate(*cut, samples);
                let tails = profile.tails(*cut, rate, samples);
                let mut errors = Vec::with_capacity(samples);
                for j in 0..samples {
                    let allowed = tol * fine[j].max(self.floors[j]).max(1e-9 * full[j]);
                    let disc = (fine[j] - coarse[j]).abs();
                    discretization_ok &= disc <= 0.5 * allowed;
                    tails_ok &= tails[j] <= 0.5 * allowed;
                    worst = worst.max((disc + tails[j]) / allowed * tol);
                    smallest[j] = smallest[j].min(fine[j].max(1e-9 * full[j]));
                    errors.push(disc + tails[j]);
                }
                outcomes.push(RadialOutcome {
                    values: fine,
                    errors,
                    full: full.clone(),
                    window: ((profile.lo() as f64 * h).exp(), (profile.hi() as f64 * h).exp()),
                    nodes: profile.nodes.len(),
                });
            }
            if discretization_ok && tails_ok {
                return Ok(outcomes);
            }
            if refinements >= self.spec.max_refinements {
                return Err(Error::QuadratureNotConverged {
                    estimate: worst,
                    tolerance: tol,
                });
            }
            refinements += 1;
            if !tails_ok {
                scale = Some(smallest);
            }
            if !discretization_ok {
                if m == 1 {
                    self.bank.refine();
                    h = self.bank.step();
                    scalars = ScalarLattice::new(&self.bank, s);
                    profile.nodes = std::mem::take(&mut profile.nodes)
                        .into_iter()
                        .map(|(i, g)| (2 * i, g))
                        .collect();
                    profile.h = h;
                    m = 2;
                }
                m /= 2;
                profile.m = m;
                let (lo, hi) = (profile.lo(), profile.hi());
                let mut i = lo + m;
                while i < hi {
                    let g = self.squares_at(&mut scalars, i)?;
                    profile.nodes.insert(i, g);
                    i += 2 * m;
                }
            }
        }
    }

    /// `\int_{-alpha}^{alpha} ds` of the radial integrals, Gauss-Legendre in `s`
    /// with node doubling until two rules agree.
    fn angular(
        &mut self,
        alpha: f64,
        truncations: &[Option<f64>],
    ) -> Result<Vec<(Vec<f64>, Vec<f64>, GridInfo)>> {
        let samples = self.xs.len();
        let tol = self.spec.target_tol;
        let mut n = self.spec.angular_nodes.max(2);
        let mut previous = self.angular_rule(alpha, truncations, n / 2)?;
        loop {
            let current = self.angular_rule(alpha, truncations, n)?;
            let mut results = Vec::with_capacity(truncations.len());
            let mut worst = 0.0f64;
            for (cur, prev) in current.iter().zip(&previous) {
                let errors: Vec<f64> = (0..samples)
                    .map(|j| (cur.0[j] - prev.0[j]).abs() + cur.1[j])
                    .collect();
                for j in 0..samples {
                    let scale = cur.0[j].max(self.floors[j]).max(1e-9 * cur.2.full[j]);
                    worst = worst.max(errors[j] / scale);
                }
                results.push((cur.0.clone(), errors, self.grid(&cur.2, n)));
            }
            // truncated values are held to the untruncated scale at worst
            let full_scale = &current[0].2.full;
            let converged = results.iter().all(|(v, e, _)| {
                (0..samples).all(|j| e[j] <= tol * v[j].max(self.floors[j]).max(1e-9 * full_scale[j]))
            });
            if converged {
                return Ok(results);
            }
            if n * 2 > self.spec.max_angular_nodes {
                return Err(Error::QuadratureNotConverged {
                    estimate: worst,
                    tolerance: tol,
                });
            }
            previous = current;
            n *= 2;
        }
    }

    #[allow(clippy::type_complexity)]
    fn angular_rule(
        &mut self,
        alpha: f64,
        truncations: &[Option<f64>],
        n: usize,
    ) -> Result<Vec<(Vec<f64>, Vec<f64>, RadialOutcome)>> {
        let samples = self.xs.len();
        let mut acc: Vec<(Vec<f64>, Vec<f64>, Option<RadialOutcome>)> = truncations
            .iter()
            .map(|_| (vec![0.0; samples], vec![0.0; samples], None))
            .collect();
        let mut full = vec![0.0; samples];
        for (s, w) in gauss_legendre_on(n, -alpha, alpha) {
            let outcomes = self.radial(s, truncations)?;
            for (f, r) in full.iter_mut().zip(&outcomes[0].full) {
                *f += w * r;
            }
            for (slot, r) in acc.iter_mut().zip(outcomes) {
                for j in 0..samples {
                    slot.0[j] += w * r.values[j];
                    slot.1[j] += w * r.errors[j];
                }
                if slot.2.as_ref().is_none_or(|wd| r.nodes > wd.nodes) {
                    slot.2 = Some(r);
                }
            }
        }
        Ok(acc
            .into_iter()
            .map(|(v, e, r)| {
                let mut widest = r.expect("at least one angular node");
                widest.full = full.clone();
                (v, e, widest)
            })
            .collect())
    }
}

fn to_values(squares: &[f64], errors: &[f64], grid: GridInfo) -> Vec<FunctionalValue> {
    squares
        .iter()
        .zip(errors)
        .map(|(&sq, &err)| {
            let value = sq.max(0.0).sqrt();
            let error_estimate = if value > 0.0 { err / (2.0 * value) } else { err.sqrt() };
            FunctionalValue {
                value,
                error_estimate,
                grid,
            }
        })
        .collect()
}

/// Square functions for a batch of samples and several truncations at once;
/// `Some(epsilon)` truncates to `t > epsilon`. Returns one batch per truncation.
pub fn square_function_multi(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    xs: &[Vec<Complex64>],
    epsilons: &[Option<f64>],
    spec: &QuadraticSpec,
) -> Result<Vec<Vec<FunctionalValue>>> {
    if !(f.half_angle() > cert.omega) {
        return Err(Error::AngleOutOfRange {
            angle: f.half_angle(),
            lower: cert.omega,
            upper: PI,
        });
    }
    let mut engine = Engine::new(a, cert, f, 0.0, None, xs, *spec)?;
    let outcomes = engine.radial(0.0, epsilons)?;
    Ok(outcomes
        .iter()
        .map(|r| to_values(&r.values, &r.errors, engine.grid(r, 0)))
        .collect())
}

/// Square functions for a batch of samples; `epsilon` truncates to `t > epsilon`.
pub fn square_function_batch(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    xs: &[Vec<Complex64>],
    epsilon: Option<f64>,
    spec: &QuadraticSpec,
) -> Result<Vec<FunctionalValue>> {
    square_function_multi(a, cert, f, xs, &[epsilon], spec).map(single)
}

/// Area functions for a batch of samples and several truncations `|z| > delta`
/// at once; `weight` multiplies every `F(zA)` on the left.
#[allow(clippy::too_many_arguments)]
pub fn area_function_multi(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    xs: &[Vec<Complex64>],
    alpha: f64,
    deltas: &[Option<f64>],
    weight: Option<ComplexMatrix>,
    spec: &QuadraticSpec,
) -> Result<Vec<Vec<FunctionalValue>>> {
    check_alpha(cert, f, alpha)?;
    let mut engine = Engine::new(a, cert, f, alpha, weight, xs, *spec)?;
    Ok(engine
        .angular(alpha, deltas)?
        .into_iter()
        .map(|(values, errors, grid)| to_values(&values, &errors, grid))
        .collect())
}

/// Area functions for a batch of samples; `delta` truncates to `|z| > delta`,
/// `weight` multiplies every `F(zA)` on the left.
#[allow(clippy::too_many_arguments)]
pub fn area_function_batch(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    xs: &[Vec<Complex64>],
    alpha: f64,
    delta: Option<f64>,
    weight: Option<ComplexMatrix>,
    spec: &QuadraticSpec,
) -> Result<Vec<FunctionalValue>> {
    area_function_multi(a, cert, f, xs, alpha, &[delta], weight, spec).map(single)
}

fn single<T>(mut v: Vec<T>) -> T {
    v.pop().expect("one request in, one result out")
}

pub fn square_function(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    x: &[Complex64],
    spec: &QuadraticSpec,
) -> Result<FunctionalValue> {
    square_function_batch(a, cert, f, &[x.to_vec()], None, spec).map(single)
}

pub fn square_function_truncated(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    x: &[Complex64],
    epsilon: f64,
    spec: &QuadraticSpec,
) -> Result<FunctionalValue> {
    square_function_batch(a, cert, f, &[x.to_vec()], Some(epsilon), spec).map(single)
}

pub fn area_function(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    x: &[Complex64],
    alpha: f64,
    spec: &QuadraticSpec,
) -> Result<FunctionalValue> {
    area_function_batch(a, cert, f, &[x.to_vec()], alpha, None, None, spec).map(single)
}

pub fn area_function_truncated(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    x: &[Complex64],
    alpha: f64,
    delta: f64,
    spec: &QuadraticSpec,
) -> Result<FunctionalValue> {
    area_function_batch(a, cert, f, &[x.to_vec()], alpha, Some(delta), None, spec).map(single)
}

/// The square function of `A*`; the certificate of `A` serves for `A*`.
pub fn adjoint_square_function(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    x: &[Complex64],
    spec: &QuadraticSpec,
) -> Result<FunctionalValue> {
    square_function(&linalg::adjoint(a), cert, f, x, spec)
}

pub fn adjoint_area_function(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    x: &[Complex64],
    alpha: f64,
    spec: &QuadraticSpec,
) -> Result<FunctionalValue> {
    area_function(&linalg::adjoint(a), cert, f, x, alpha, spec)
}

/// `(\int_{Sigma_alpha} ||f(A) F(zA) x||^2 dm(z)/|z|^2)^{1/2}` with `f(A)` from the calculus.
#[allow(clippy::too_many_arguments)]
pub fn weighted_area_function(
    a: &ComplexMatrix,
    cert: &SectorialCertificate,
    f: &Symbol,
    big_f: &Symbol,
    x: &[Complex64],
    alpha: f64,
    spec: &QuadraticSpec,
) -> Result<FunctionalValue> {
    let b = funcalc::apply(a, cert, f, None, &QuadratureSpec::with_tol(spec.inner_tol()))?;
    area_function_batch(a, cert, big_f, &[x.to_vec()], alpha, None, Some(b.matrix), spec).map(single)
}

/// `2 / sqrt(pi sin alpha)`, the constant comparing truncated square and area functions.
pub fn truncation_constant(alpha: f64) -> f64 {
    2.0 / (PI * alpha.sin()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sector::certify;
    use crate::symbols::{make_gk, make_phi, GK_DEFAULT_ANGLE};

    fn spec() -> QuadraticSpec {
        QuadraticSpec::default()
    }

    fn one() -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0)]
    }

    #[test]
    fn square_function_scalar_g1() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0]);
        let cert = certify(&a).unwrap();
        let g1 = make_gk(1, GK_DEFAULT_ANGLE).unwrap();
        let v = square_function(&a, &cert, &g1, &one(), &spec()).unwrap();
        assert!((v.value - 0.5).abs() < 1e-8, "{}", v.value);
        assert!(v.error_estimate < 1e-8);
        let zero = square_function(&a, &cert, &g1, &[Complex64::new(0.0, 0.0)], &spec()).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn truncated_square_function_closed_form() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0]);
        let cert = certify(&a).unwrap();
        let g1 = make_gk(1, GK_DEFAULT_ANGLE).unwrap();
        let v = square_function_truncated(&a, &cert, &g1, &one(), 1.0, &spec()).unwrap();
        let expected = (0.75 * (-2.0f64).exp()).sqrt();
        assert!((v.value - expected).abs() < 1e-8, "{} {}", v.value, expected);
        let tiny = square_function_truncated(&a, &cert, &g1, &one(), 1e-9, &spec()).unwrap();
        assert!((tiny.value - 0.5).abs() < 1e-6);
        let huge = square_function_truncated(&a, &cert, &g1, &one(), 1e6, &spec()).unwrap();
        assert!(huge.value <= 1e-12);
    }

    #[test]
    fn area_function_diagonal_model() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 4.0]);
        let cert = certify(&a).unwrap();
        let g1 = make_gk(1, GK_DEFAULT_ANGLE).unwrap();
        let xs = sample_vectors(3, 3, 7);
        for alpha in [PI / 4.0, PI / 6.0] {
            let vals = area_function_batch(&a, &cert, &g1, &xs, alpha, None, None, &spec()).unwrap();
            let expected = (alpha.tan() / 2.0).sqrt();
            for v in vals {
                assert!((v.value - expected).abs() < 1e-7 * expected, "{} vs {expected}", v.value);
            }
        }
    }

    #[test]
    fn alpha_admissibility() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0]);
        let cert = certify(&a).unwrap();
        let g1 = make_gk(1, 1.0).unwrap();
        assert!(matches!(
            area_function(&a, &cert, &g1, &one(), 1.0, &spec()),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            area_function(&a, &cert, &g1, &one(), 0.0, &spec()),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn phi_square_function_scalar() {
        // \int_0^\infty t^2 / (1 + t)^4 dt/t = 1/6
        let a = ComplexMatrix::from_real_diagonal(&[3.0]);
        let cert = certify(&a).unwrap();
        let phi = make_phi(2.5).unwrap();
        let v = square_function(&a, &cert, &phi, &one(), &spec()).unwrap();
        assert!((v.value - (1.0f64 / 6.0).sqrt()).abs() < 1e-8, "{}", v.value);
    }

    #[test]
    fn samples_are_reproducible_and_normalized() {
        let a = sample_vectors(4, 5, 42);
        let b = sample_vectors(4, 5, 42);
        assert_eq!(a, b);
        for x in &a {
            assert!((vector_norm(x) - 1.0).abs() < 1e-14);
        }
        assert_ne!(a, sample_vectors(4, 5, 43));
    }

    #[test]
    fn truncation_constant_at_pi_over_six() {
        assert!((truncation_constant(PI / 6.0) - 1.595769121605731).abs() < 1e-12);
    }
}
