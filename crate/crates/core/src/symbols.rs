//! Analytic symbols on sectors.
//!
//! Every symbol carries its domain half-angle and one of three classes:
//!
//! * decaying: `|f(z)| <= c |z|^s / (1 + |z|)^{2s}` on the sector, witnessed by a
//!   [`DecayCertificate`] that is spot-checked by sampling at construction;
//! * extended: `f = a + b R_{-1}(rho z) + h` with `h` decaying, where
//!   `R_{-1}(w) = (-1 - w)^{-1}`; `rho = 1` is the canonical basis element and
//!   other scales arise from dilation;
//! * bounded: analytic and bounded, with no further structure.
//!
//! The calculus in [`crate::funcalc`] dispatches on the class.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Evaluator = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Default half-angle for `phi` and constants.
pub const PHI_DEFAULT_ANGLE: f64 = 5.0 * PI / 6.0;
/// Default half-angle for `G_k`, exponentials and semigroup symbols (must stay below pi/2).
pub const GK_DEFAULT_ANGLE: f64 = 0.48 * PI;
/// Default half-angle for the imaginary powers `z^{is}`.
pub const FS_DEFAULT_ANGLE: f64 = PI / 2.0;

const CERT_RADII: usize = 40;
const CERT_ANGLES: usize = 25;
const SUP_RADII: usize = 601;
const SUP_HALF_ANGLES: usize = 24;
const FIT_HEADROOM: f64 = 1.25;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Witness for membership in the decaying class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub s: f64,
    /// `c = 0` certifies the zero function.
    pub c: f64,
}

impl DecayCertificate {
    pub fn bound(&self, r: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        self.c * (r / ((1.0 + r) * (1.0 + r))).powf(self.s)
    }

    /// Largest value of the bound, attained at `|z| = 1`.
    pub fn peak(&self) -> f64 {
        self.c * 0.25f64.powf(self.s)
    }
}

/// Sampled lower bound for `sup |f|` over the sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNormEstimate {
    pub value: f64,
    pub sample_count: usize,
    pub max_location: Complex64,
}

#[derive(Clone)]
pub struct ExtendedParts {
    /// coefficient of the constant function 1
    pub constant: Complex64,
    /// coefficient of `R_{-1}(scale * z)`
    pub resolvent: Complex64,
    pub scale: Complex64,
    pub decaying: Symbol,
}

#[derive(Clone)]
pub enum SymbolClass {
    Decaying(DecayCertificate),
    Extended(Arc<ExtendedParts>),
    Bounded { sup_bound: Option<f64> },
}

impl SymbolClass {
    pub fn name(&self) -> &'static str {
        match self {
            SymbolClass::Decaying(_) => "decaying",
            SymbolClass::Extended(_) => "extended",
            SymbolClass::Bounded { .. } => "bounded",
        }
    }
}

/// An analytic function on the open sector of half-angle `half_angle`.
#[derive(Clone)]
pub struct Symbol {
    label: String,
    half_angle: f64,
    class: SymbolClass,
    eval: Evaluator,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("label", &self.label)
            .field("half_angle", &self.half_angle)
            .field("class", &self.class.name())
            .finish()
    }
}

fn check_angle(label: &str, half_angle: f64) -> Result<()> {
    if !(half_angle > 0.0 && half_angle < PI) {
        return Err(Error::InvalidDomain {
            symbol: label.to_string(),
            half_angle,
        });
    }
    Ok(())
}

/// The fixed certificate sample set: 40 log-spaced radii in `[1e-4, 1e4]`
/// times 25 angles spanning the closed sector.
fn certificate_samples(half_angle: f64) -> impl Iterator<Item = Complex64> {
    (0..CERT_RADII).flat_map(move |i| {
        let r = 10f64.powf(-4.0 + 8.0 * i as f64 / (CERT_RADII - 1) as f64);
        (0..CERT_ANGLES).map(move |j| {
            let phi = half_angle * (2.0 * j as f64 / (CERT_ANGLES - 1) as f64 - 1.0);
            Complex64::from_polar(r, phi)
        })
    })
}

/// Fits `c` for a given exponent by sampling `|f(z)| (1+|z|)^{2s} / |z|^s` on
/// a wide, dense grid and adding headroom.
fn fit_certificate(f: &dyn Fn(Complex64) -> Complex64, half_angle: f64, s: f64) -> DecayCertificate {
    let mut worst: f64 = 0.0;
    for i in 0..=320 {
        let r = 10f64.powf(-8.0 + 16.0 * i as f64 / 320.0);
        for j in 0..=48 {
            let phi = half_angle * (j as f64 / 24.0 - 1.0);
            let z = Complex64::from_polar(r, phi);
            let ratio = f(z).norm() * ((1.0 + r) * (1.0 + r) / r).powf(s);
            if ratio.is_finite() {
                worst = worst.max(ratio);
            }
        }
    }
    DecayCertificate {
        s,
        c: worst * FIT_HEADROOM,
    }
}

impl Symbol {
    /// A decaying symbol; fails with [`Error::CertificateRefuted`] if sampling
    /// contradicts the certificate.
    pub fn decaying(
        label: impl Into<String>,
        half_angle: f64,
        cert: DecayCertificate,
        eval: Evaluator,
    ) -> Result<Symbol> {
        let label = label.into();
        check_angle(&label, half_angle)?;
        if !(cert.s > 0.0) || !(cert.c >= 0.0) || !cert.c.is_finite() {
            return Err(Error::CertificateRefuted {
                symbol: label,
                s: cert.s,
                c: cert.c,
                z: c64(0.0, 0.0),
            });
        }
        for z in certificate_samples(half_angle) {
            let value = eval(z).norm();
            let bound = cert.bound(z.norm());
            if !(value <= bound * (1.0 + 1e-9) + 1e-300) {
                return Err(Error::CertificateRefuted {
                    symbol: label,
                    s: cert.s,
                    c: cert.c,
                    z,
                });
            }
        }
        Ok(Symbol {
            label,
            half_angle,
            class: SymbolClass::Decaying(cert),
            eval,
        })
    }

    pub fn bounded(
        label: impl Into<String>,
        half_angle: f64,
        sup_bound: Option<f64>,
        eval: Evaluator,
    ) -> Result<Symbol> {
        let label = label.into();
        check_angle(&label, half_angle)?;
        Ok(Symbol {
            label,
            half_angle,
            class: SymbolClass::Bounded { sup_bound },
            eval,
        })
    }

    /// Assembles `a + b R_{-1}(rho z) + h`; the evaluator is built from the parts.
    pub fn extended(
        label: impl Into<String>,
        half_angle: f64,
        constant: Complex64,
        resolvent: Complex64,
        scale: Complex64,
        decaying: Symbol,
    ) -> Result<Symbol> {
        let label = label.into();
        check_angle(&label, half_angle)?;
        if decaying.certificate().is_none() {
            return Err(Error::WrongSymbolClass {
                symbol: decaying.label,
                expected: "decaying",
            });
        }
        let h = decaying.eval.clone();
        let eval: Evaluator = Arc::new(move |z| {
            constant + resolvent * resolvent_basis(scale, z) + h(z)
        });
        Ok(Symbol {
            label,
            half_angle,
            class: SymbolClass::Extended(Arc::new(ExtendedParts {
                constant,
                resolvent,
                scale,
                decaying,
            })),
            eval,
        })
    }

    pub fn zero(half_angle: f64) -> Result<Symbol> {
        Symbol::decaying(
            "0",
            half_angle,
            DecayCertificate { s: 1.0, c: 0.0 },
            Arc::new(|_| c64(0.0, 0.0)),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Symbol {
        self.label = label.into();
        self
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn class(&self) -> &SymbolClass {
        &self.class
    }

    pub fn certificate(&self) -> Option<&DecayCertificate> {
        match &self.class {
            SymbolClass::Decaying(cert) => Some(cert),
            _ => None,
        }
    }

    pub fn extended_parts(&self) -> Option<&ExtendedParts> {
        match &self.class {
            SymbolClass::Extended(parts) => Some(parts),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.certificate(), Some(cert) if cert.c == 0.0)
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    pub fn evaluator(&self) -> Evaluator {
        self.eval.clone()
    }

    /// `z != 0` and `|arg z| < half_angle`.
    pub fn domain_contains(&self, z: Complex64) -> bool {
        z != c64(0.0, 0.0) && z.arg().abs() < self.half_angle
    }

    /// A known upper bound for `sup |f|` when one is available in closed form.
    pub fn sup_bound(&self) -> Option<f64> {
        match &self.class {
            SymbolClass::Bounded { sup_bound } => *sup_bound,
            SymbolClass::Decaying(cert) => Some(cert.peak()),
            SymbolClass::Extended(parts) => {
                let h = parts.decaying.certificate().map(|c| c.peak())?;
                let r = resolvent_basis_sup(parts.scale, self.half_angle);
                Some(parts.constant.norm() + parts.resolvent.norm() * r + h)
            }
        }
    }

    /// Sampled `sup |f|` over a mirrored polar grid of the sector.
    pub fn sup_norm(&self) -> SupNormEstimate {
        sup_norm(self)
    }
}

/// `R_{-1}(rho z) = -(1 + rho z)^{-1}`
#[inline]
pub fn resolvent_basis(scale: Complex64, z: Complex64) -> Complex64 {
    -(c64(1.0, 0.0) + scale * z).inv()
}

/// `sup |R_{-1}(rho z)|` over the sector of half-angle `half_angle`.
fn resolvent_basis_sup(scale: Complex64, half_angle: f64) -> f64 {
    let phi = half_angle + scale.arg().abs();
    if phi <= PI / 2.0 {
        1.0
    } else if phi < PI {
        1.0 / phi.sin()
    } else {
        f64::INFINITY
    }
}

pub fn sup_norm(f: &Symbol) -> SupNormEstimate {
    let theta = f.half_angle * (1.0 - 1e-12);
    let mut best = SupNormEstimate {
        value: 0.0,
        sample_count: 0,
        max_location: c64(1.0, 0.0),
    };
    let consider = |z: Complex64, best: &mut SupNormEstimate| {
        let v = f.eval(z).norm();
        best.sample_count += 1;
        if v > best.value {
            best.value = v;
            best.max_location = z;
        }
    };
    for i in 0..SUP_RADII {
        let r = 10f64.powf(-6.0 + 12.0 * i as f64 / (SUP_RADII - 1) as f64);
        for j in 0..=SUP_HALF_ANGLES {
            let z = Complex64::from_polar(r, theta * j as f64 / SUP_HALF_ANGLES as f64);
            consider(z, &mut best);
            if j > 0 {
                consider(z.conj(), &mut best);
            }
        }
    }
    best
}

/// `phi(z) = z (1 + z)^{-2}`, decaying with `s = 1`, `c = 1 / cos^2(theta/2)`.
pub fn make_phi(half_angle: f64) -> Result<Symbol> {
    check_angle("phi", half_angle)?;
    let c = (1.0 + 1e-12) / (half_angle / 2.0).cos().powi(2);
    Symbol::decaying(
        "phi",
        half_angle,
        DecayCertificate { s: 1.0, c },
        Arc::new(|z| {
            let d = c64(1.0, 0.0) + z;
            z / (d * d)
        }),
    )
}

/// `G_k(z) = z^k e^{-z}` on a sector of half-angle below pi/2.
pub fn make_gk(k: u32, half_angle: f64) -> Result<Symbol> {
    let label = format!("Gk:{k}");
    if k == 0 || !(half_angle > 0.0 && half_angle < PI / 2.0) {
        return Err(Error::InvalidDomain {
            symbol: label,
            half_angle,
        });
    }
    // sup_r e^{-r cos(theta)} (1 + r)^{2k}, attained at 1 + r = 2k / cos(theta)
    let cos = half_angle.cos();
    let kk = 2.0 * k as f64;
    let c = ((cos - kk) + kk * (kk / cos).ln()).exp() * (1.0 + 1e-9);
    let power = k as i32;
    Symbol::decaying(
        label,
        half_angle,
        DecayCertificate { s: k as f64, c },
        Arc::new(move |z| z.powi(power) * (-z).exp()),
    )
}

/// `f_s(z) = z^{is}` on the principal branch; `sup |f_s| = e^{theta |s|}`.
pub fn make_fs(s: f64, half_angle: f64) -> Result<Symbol> {
    Symbol::bounded(
        format!("fs:{s}"),
        half_angle,
        Some((half_angle * s.abs()).exp()),
        Arc::new(move |z| (c64(0.0, s) * z.ln()).exp()),
    )
}

/// `e^{-tz}` as a bounded symbol (half-angle below pi/2).
pub fn make_exponential(t: f64, half_angle: f64) -> Result<Symbol> {
    let label = format!("exp:{t}");
    if !(t > 0.0) || !(half_angle > 0.0 && half_angle < PI / 2.0) {
        return Err(Error::InvalidDomain {
            symbol: label,
            half_angle,
        });
    }
    Symbol::bounded(label, half_angle, Some(1.0), Arc::new(move |z| (-z * t).exp()))
}

/// The constant symbol `a`.
pub fn constant(a: Complex64, half_angle: f64) -> Result<Symbol> {
    Symbol::extended(
        format!("const:{a}"),
        half_angle,
        a,
        c64(0.0, 0.0),
        c64(1.0, 0.0),
        Symbol::zero(half_angle)?,
    )
}

/// `R_lambda(z) = (lambda - z)^{-1}`, written as `-(1/lambda) R_{-1} + h`.
pub fn make_resolvent_symbol(lambda: Complex64, half_angle: f64) -> Result<Symbol> {
    let label = format!("resolvent:{},{}", lambda.re, lambda.im);
    check_angle(&label, half_angle)?;
    if lambda == c64(0.0, 0.0) || lambda.arg().abs() <= half_angle {
        return Err(Error::LambdaInSector { lambda, half_angle });
    }
    let one = c64(1.0, 0.0);
    let h_eval = move |z: Complex64| z * (one + lambda) / (lambda * (lambda - z) * (one + z));
    let h = if (lambda + one).norm() == 0.0 {
        Symbol::zero(half_angle)?
    } else {
        let cert = fit_certificate(&h_eval, half_angle, 1.0);
        Symbol::decaying(format!("{label}:h"), half_angle, cert, Arc::new(h_eval))?
    };
    Symbol::extended(label, half_angle, c64(0.0, 0.0), -lambda.inv(), one, h)
}

/// `e^{-tz} = [e^{-tz} - (1 + tz)^{-1}] + (1 + tz)^{-1}`; the bracket is decaying
/// with `s = 1` and `(1 + tz)^{-1} = -R_{-1}(tz)`.
pub fn make_semigroup_symbol(t: f64, half_angle: f64) -> Result<Symbol> {
    let label = format!("semigroup:{t}");
    if !(t > 0.0) || !(half_angle > 0.0 && half_angle < PI / 2.0) {
        return Err(Error::InvalidDomain {
            symbol: label,
            half_angle,
        });
    }
    let one = c64(1.0, 0.0);
    let g = move |w: Complex64| (-w).exp() - (one + w).inv();
    // certificate of g(w), then dilated by t
    let base = fit_certificate(&g, half_angle, 1.0);
    let cert = DecayCertificate {
        s: 1.0,
        c: base.c * t.max(1.0 / t),
    };
    let h = Symbol::decaying(
        format!("{label}:h"),
        half_angle,
        cert,
        Arc::new(move |z| g(z * t)),
    )?;
    Symbol::extended(label, half_angle, c64(0.0, 0.0), c64(-1.0, 0.0), c64(t, 0.0), h)
}

/// Rewrites `R_{-1}(rho z)` as `R_{-1}(z) + q(z)` with `q` decaying.
fn normalize_scale(parts: &ExtendedParts, half_angle: f64) -> Result<(Complex64, Complex64, Symbol)> {
    let one = c64(1.0, 0.0);
    if parts.scale == one {
        return Ok((parts.constant, parts.resolvent, parts.decaying.clone()));
    }
    let rho = parts.scale;
    let q = move |z: Complex64| resolvent_basis(rho, z) - resolvent_basis(one, z);
    let cert = fit_certificate(&q, half_angle, 1.0);
    let q = Symbol::decaying("q", half_angle, cert, Arc::new(q))?;
    let b = parts.resolvent;
    let h = add_decaying(&parts.decaying, &scale_decaying(&q, b)?, half_angle)?;
    Ok((parts.constant, b, h))
}

fn scale_decaying(f: &Symbol, a: Complex64) -> Result<Symbol> {
    let cert = *f.certificate().expect("decaying symbol");
    let e = f.eval.clone();
    Symbol::decaying(
        f.label.clone(),
        f.half_angle,
        DecayCertificate {
            s: cert.s,
            c: cert.c * a.norm(),
        },
        Arc::new(move |z| a * e(z)),
    )
}

fn add_decaying(f: &Symbol, g: &Symbol, half_angle: f64) -> Result<Symbol> {
    let (cf, cg) = (*f.certificate().unwrap(), *g.certificate().unwrap());
    if cf.c == 0.0 {
        return restrict(g, half_angle);
    }
    if cg.c == 0.0 {
        return restrict(f, half_angle);
    }
    let (ef, eg) = (f.eval.clone(), g.eval.clone());
    Symbol::decaying(
        format!("{}+{}", f.label, g.label),
        half_angle,
        DecayCertificate {
            s: cf.s.min(cg.s),
            c: cf.c + cg.c,
        },
        Arc::new(move |z| ef(z) + eg(z)),
    )
}

fn restrict(f: &Symbol, half_angle: f64) -> Result<Symbol> {
    let mut out = f.clone();
    out.half_angle = half_angle;
    Ok(out)
}

/// Pointwise product; classes combine as an algebra.
pub fn multiply(f: &Symbol, g: &Symbol) -> Result<Symbol> {
    let theta = f.half_angle.min(g.half_angle);
    let label = format!("{}*{}", f.label, g.label);
    let (ef, eg) = (f.eval.clone(), g.eval.clone());
    let product: Evaluator = Arc::new(move |z| ef(z) * eg(z));
    match (&f.class, &g.class) {
        (SymbolClass::Decaying(a), SymbolClass::Decaying(b)) => Symbol::decaying(
            label,
            theta,
            DecayCertificate {
                s: a.s + b.s,
                c: a.c * b.c,
            },
            product,
        ),
        (SymbolClass::Decaying(cert), SymbolClass::Bounded { .. })
        | (SymbolClass::Bounded { .. }, SymbolClass::Decaying(cert)) => {
            let bounded = if f.certificate().is_some() { g } else { f };
            let sup = match bounded.sup_bound() {
                Some(b) => b,
                None => bounded.sup_norm().value * FIT_HEADROOM,
            };
            Symbol::decaying(
                label,
                theta,
                DecayCertificate {
                    s: cert.s,
                    c: cert.c * sup,
                },
                product,
            )
        }
        (SymbolClass::Decaying(cert), SymbolClass::Extended(parts))
        | (SymbolClass::Extended(parts), SymbolClass::Decaying(cert)) => {
            // (a + b R + h) g is decaying with the exponent of g
            let r = resolvent_basis_sup(parts.scale, theta);
            let ch = parts.decaying.certificate().unwrap().c;
            Symbol::decaying(
                label,
                theta,
                DecayCertificate {
                    s: cert.s,
                    c: cert.c * (parts.constant.norm() + parts.resolvent.norm() * r + ch),
                },
                product,
            )
        }
        (SymbolClass::Extended(p), SymbolClass::Extended(q)) => {
            let (a1, b1, h1, a2, b2, h2, rho) = if p.scale == q.scale {
                (
                    p.constant,
                    p.resolvent,
                    p.decaying.clone(),
                    q.constant,
                    q.resolvent,
                    q.decaying.clone(),
                    p.scale,
                )
            } else {
                let (a1, b1, h1) = normalize_scale(p, theta)?;
                let (a2, b2, h2) = normalize_scale(q, theta)?;
                (a1, b1, h1, a2, b2, h2, c64(1.0, 0.0))
            };
            // R^2 = -R - phi(rho z)
            let a = a1 * a2;
            let b = a1 * b2 + a2 * b1 - b1 * b2;
            let r = resolvent_basis_sup(rho, theta);
            let (c1, c2) = (h1.certificate().unwrap(), h2.certificate().unwrap());
            let phi_peak = 1.0 / (((theta + rho.arg().abs()) / 2.0).cos().powi(2));
            let rho_scale = rho.norm().max(1.0 / rho.norm());
            let c = a1.norm() * c2.c
                + a2.norm() * c1.c
                + b1.norm() * r * c2.c
                + b2.norm() * r * c1.c
                + c1.c * c2.c
                + (b1 * b2).norm() * phi_peak * rho_scale;
            let s = c1.s.min(c2.s).min(1.0);
            let full = product.clone();
            let h_eval: Evaluator =
                Arc::new(move |z| full(z) - a - b * resolvent_basis(rho, z));
            let h = if c == 0.0 {
                Symbol::zero(theta)?
            } else {
                Symbol::decaying(format!("{label}:h"), theta, DecayCertificate { s, c }, h_eval)?
            };
            Symbol::extended(label, theta, a, b, rho, h)
        }
        (SymbolClass::Bounded { sup_bound: a }, SymbolClass::Bounded { sup_bound: b }) => {
            Symbol::bounded(label, theta, a.zip(*b).map(|(a, b)| a * b), product)
        }
        (SymbolClass::Bounded { .. }, SymbolClass::Extended(_))
        | (SymbolClass::Extended(_), SymbolClass::Bounded { .. }) => {
            let sup = f.sup_bound().zip(g.sup_bound()).map(|(a, b)| a * b);
            Symbol::bounded(label, theta, sup, product)
        }
    }
}

/// `tilde f(z) = conj(f(conj z))`.
pub fn tilde(f: &Symbol) -> Result<Symbol> {
    let e = f.eval.clone();
    let eval: Evaluator = Arc::new(move |z: Complex64| e(z.conj()).conj());
    let label = format!("~{}", f.label);
    match &f.class {
        SymbolClass::Decaying(cert) => Symbol::decaying(label, f.half_angle, *cert, eval),
        SymbolClass::Bounded { sup_bound } => Symbol::bounded(label, f.half_angle, *sup_bound, eval),
        SymbolClass::Extended(parts) => Symbol::extended(
            label,
            f.half_angle,
            parts.constant.conj(),
            parts.resolvent.conj(),
            parts.scale.conj(),
            tilde(&parts.decaying)?,
        ),
    }
}

/// `f_zeta(w) = f(zeta w)`; the domain shrinks by `|arg zeta|`.
pub fn dilate(f: &Symbol, zeta: Complex64) -> Result<Symbol> {
    let label = format!("{}({}*z)", f.label, zeta);
    let theta = f.half_angle - zeta.arg().abs();
    if zeta == c64(0.0, 0.0) || !(theta > 0.0) {
        return Err(Error::InvalidDomain {
            symbol: label,
            half_angle: theta,
        });
    }
    let e = f.eval.clone();
    let eval: Evaluator = Arc::new(move |w| e(zeta * w));
    match &f.class {
        SymbolClass::Decaying(cert) => {
            let r = zeta.norm();
            let c = cert.c * r.powf(cert.s).max(r.powf(-cert.s));
            Symbol::decaying(label, theta, DecayCertificate { s: cert.s, c }, eval)
        }
        SymbolClass::Bounded { sup_bound } => Symbol::bounded(label, theta, *sup_bound, eval),
        SymbolClass::Extended(parts) => Symbol::extended(
            label,
            theta,
            parts.constant,
            parts.resolvent,
            parts.scale * zeta,
            dilate(&parts.decaying, zeta)?,
        ),
    }
}

/// Looks up a symbol by registry name with its default domain.
///
/// Names: `phi`, `one`, `Gk:<k>`, `fs:<s>`, `exp:<t>`, `resolvent:<re>,<im>`,
/// `semigroup:<t>`.
pub fn from_name(name: &str) -> Result<Symbol> {
    from_name_with_angle(name, None)
}

pub fn from_name_with_angle(name: &str, half_angle: Option<f64>) -> Result<Symbol> {
    let unknown = || Error::UnknownSymbol(name.to_string());
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (name.trim(), None),
    };
    let parse = |s: &str| s.parse::<f64>().map_err(|_| unknown());
    let symbol = match (head, arg) {
        ("phi", None) => make_phi(half_angle.unwrap_or(PHI_DEFAULT_ANGLE))?,
        ("one", None) => constant(c64(1.0, 0.0), half_angle.unwrap_or(PHI_DEFAULT_ANGLE))?,
        ("Gk", Some(k)) => {
            let k: u32 = k.parse().map_err(|_| unknown())?;
            make_gk(k, half_angle.unwrap_or(GK_DEFAULT_ANGLE))?
        }
        ("fs", Some(s)) => make_fs(parse(s)?, half_angle.unwrap_or(FS_DEFAULT_ANGLE))?,
        ("exp", Some(t)) => make_exponential(parse(t)?, half_angle.unwrap_or(GK_DEFAULT_ANGLE))?,
        ("semigroup", Some(t)) => {
            make_semigroup_symbol(parse(t)?, half_angle.unwrap_or(GK_DEFAULT_ANGLE))?
        }
        ("resolvent", Some(rest)) => {
            let (re, im) = rest.split_once(',').ok_or_else(unknown)?;
            let lambda = c64(parse(re)?, parse(im)?);
            let theta = half_angle.unwrap_or(0.9 * lambda.arg().abs());
            make_resolvent_symbol(lambda, theta)?
        }
        _ => return Err(unknown()),
    };
    Ok(symbol.with_label(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn phi_values_and_decay() {
        let phi = make_phi(3.0 * PI / 4.0).unwrap();
        assert!(close(phi.eval(c64(1.0, 0.0)), c64(0.25, 0.0), 1e-16));
        assert!(phi.eval(c64(1e-9, 0.0)).norm() < 1e-8);
        assert!(phi.eval(c64(1e9, 0.0)).norm() < 1e-8);
        assert_eq!(phi.certificate().unwrap().s, 1.0);
    }

    #[test]
    fn phi_certificate_checked_on_1000_points() {
        let phi = make_phi(3.0 * PI / 4.0).unwrap();
        let cert = *phi.certificate().unwrap();
        let samples: Vec<Complex64> = certificate_samples(3.0 * PI / 4.0).collect();
        assert_eq!(samples.len(), 1000);
        for z in samples {
            assert!(phi.eval(z).norm() <= cert.bound(z.norm()) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn refuted_certificate_fails_loudly() {
        let err = Symbol::decaying(
            "bad",
            1.0,
            DecayCertificate { s: 2.0, c: 1.0 },
            Arc::new(|z: Complex64| z / ((1.0 + z) * (1.0 + z))),
        )
        .unwrap_err();
        assert!(matches!(err, Error::CertificateRefuted { .. }));
    }

    #[test]
    fn gk_values() {
        let g1 = make_gk(1, GK_DEFAULT_ANGLE).unwrap();
        let g2 = make_gk(2, GK_DEFAULT_ANGLE).unwrap();
        assert!(close(g1.eval(c64(1.0, 0.0)), c64((-1.0f64).exp(), 0.0), 1e-16));
        assert!(close(g2.eval(c64(2.0, 0.0)), c64(4.0 * (-2.0f64).exp(), 0.0), 1e-15));
        assert!(matches!(make_gk(1, PI / 2.0), Err(Error::InvalidDomain { .. })));
        assert!(matches!(make_gk(0, 1.0), Err(Error::InvalidDomain { .. })));
    }

    #[test]
    fn gk_decays_along_a_ray() {
        let g3 = make_gk(3, PI / 3.0 + 0.1).unwrap();
        let ray = Complex64::from_polar(1.0, PI / 3.0);
        let values: Vec<f64> = [10.0, 20.0, 40.0, 80.0].iter().map(|&r| g3.eval(ray * r).norm()).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        assert!(values[3] < 1e-10);
    }

    #[test]
    fn fs_modulus_and_sup() {
        let f0 = make_fs(0.0, 1.0).unwrap();
        assert!(close(f0.eval(c64(3.0, 2.0)), c64(1.0, 0.0), 1e-15));
        let s = 2.0;
        let theta = PI / 4.0;
        let fs = make_fs(s, theta).unwrap();
        // |z^{is}| = e^{-s arg z}, largest at arg z = -theta sign(s)
        let z = Complex64::from_polar(1.7, -theta);
        assert!((fs.eval(z).norm() - (theta * s).exp()).abs() < 1e-12);
        let sup = fs.sup_norm();
        assert!((sup.value / (PI / 2.0).exp() - 1.0).abs() < 0.01);
    }

    #[test]
    fn resolvent_symbol_decomposition() {
        let r = make_resolvent_symbol(c64(-1.0, 0.0), PI / 2.0).unwrap();
        assert!(close(r.eval(c64(1.0, 0.0)), c64(-0.5, 0.0), 1e-16));
        let parts = r.extended_parts().unwrap();
        assert!(close(parts.resolvent, c64(1.0, 0.0), 0.0));
        assert!(parts.decaying.is_zero());
        assert!(matches!(
            make_resolvent_symbol(c64(1.0, 0.1), PI / 2.0),
            Err(Error::LambdaInSector { .. })
        ));
    }

    #[test]
    fn resolvent_symbol_sup_matches_distance() {
        let lambda = Complex64::from_polar(2.0, 0.9 * PI);
        let theta = PI / 2.0;
        let r = make_resolvent_symbol(lambda, theta).unwrap();
        // distance from lambda to the closed right half-plane is |Re lambda|
        let dist = lambda.re.abs();
        let sup = r.sup_norm().value;
        assert!((sup * dist - 1.0).abs() < 1e-3, "sup {sup} vs {}", 1.0 / dist);
    }

    #[test]
    fn semigroup_symbol_limits() {
        let e = make_semigroup_symbol(1.0, PI / 3.0).unwrap();
        let parts = e.extended_parts().unwrap();
        assert!(parts.decaying.eval(c64(1e-6, 0.0)).norm() < 1e-11);
        assert!(close(e.eval(c64(1e-12, 0.0)), c64(1.0, 0.0), 1e-11));
        assert!(close(e.eval(c64(1.0, 0.0)), c64((-1.0f64).exp(), 0.0), 1e-15));
        assert_eq!(parts.decaying.certificate().unwrap().s, 1.0);
    }

    #[test]
    fn products() {
        let phi = make_phi(2.0).unwrap();
        let one = constant(c64(1.0, 0.0), 2.0).unwrap();
        let p = multiply(&phi, &one).unwrap();
        let g1 = make_gk(1, 1.2).unwrap();
        let gg = multiply(&g1, &g1).unwrap();
        assert_eq!(gg.certificate().unwrap().s, 2.0);
        for z in [c64(0.3, 0.1), c64(2.0, -1.0), c64(7.0, 3.0)] {
            assert!(close(p.eval(z), phi.eval(z), 1e-15));
            assert!(close(gg.eval(z), z * z * (-2.0 * z).exp(), 1e-14));
        }
        assert!((gg.half_angle() - 1.2).abs() < 1e-15);
    }

    #[test]
    fn extended_product_keeps_algebra() {
        let r = make_resolvent_symbol(c64(-1.0, 0.0), 2.0).unwrap();
        let sq = multiply(&r, &r).unwrap();
        let parts = sq.extended_parts().unwrap();
        // R^2 = -R - phi
        assert!(close(parts.resolvent, c64(-1.0, 0.0), 1e-15));
        for z in [c64(0.5, 0.2), c64(3.0, -4.0)] {
            let expected = (c64(1.0, 0.0) + z).powi(-2);
            assert!(close(sq.eval(z), expected, 1e-14));
        }
        let e = make_semigroup_symbol(2.0, 1.2).unwrap();
        let mixed = multiply(&e, &r).unwrap();
        assert!(mixed.extended_parts().is_some());
        for z in [c64(0.5, 0.2), c64(3.0, -1.0)] {
            assert!(close(mixed.eval(z), (-2.0 * z).exp() * r.eval(z), 1e-14));
        }
    }

    #[test]
    fn tilde_of_fs_is_f_minus_s() {
        let fs = make_fs(1.5, 1.0).unwrap();
        let t = tilde(&fs).unwrap();
        let fm = make_fs(-1.5, 1.0).unwrap();
        for z in [c64(0.5, 0.2), c64(3.0, -1.0), c64(1.0, 1.0)] {
            assert!(close(t.eval(z), fm.eval(z), 1e-14));
        }
        assert_eq!(t.sup_norm().value, fs.sup_norm().value);
    }

    #[test]
    fn dilation_shrinks_domain() {
        let g1 = make_gk(1, 1.4).unwrap();
        let d = dilate(&g1, Complex64::from_polar(2.0, 0.3)).unwrap();
        assert!((d.half_angle() - 1.1).abs() < 1e-15);
        assert!(dilate(&g1, Complex64::from_polar(1.0, 1.5)).is_err());
    }

    #[test]
    fn registry_names() {
        for name in ["phi", "one", "Gk:2", "fs:1", "exp:1", "semigroup:0.5", "resolvent:-2,0"] {
            let s = from_name(name).unwrap();
            assert_eq!(s.label(), name);
        }
        assert!(matches!(from_name("psi"), Err(Error::UnknownSymbol(_))));
        assert!(matches!(from_name("Gk:x"), Err(Error::UnknownSymbol(_))));
    }
}
