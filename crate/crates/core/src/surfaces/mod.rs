//! Surface catalog with orthonormal frames and curvature jets.
//!
//! Every surface is a warped chart `g = w(x)² dx² + R(x)² dy²` with the
//! frame `e₁ = (1/w)∂x`, `e₂ = (1/R)∂y`. The rotation `∂y` is a Killing
//! field, so `a₁ = 0`, `a₂ = −R′/(wR)` and `κ = e₁(a₂) − a₂²`. Jets carry
//! `κ` and its e₁-derivatives up to order four.

pub mod taylor;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};
pub use taylor::Taylor;

/// Default distance kept from frame degeneracies (`w = 0`, `R = 0`).
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// Truncation order used by the Taylor jet route. Seven coefficients are
/// consumed by κ₁₁₁₁, the eighth is slack.
pub const JET_ORDER: usize = 8;
pub type JetSeries = Taylor<JET_ORDER>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Epsilon {
    Minus,
    Zero,
    Plus,
}

impl Epsilon {
    pub fn value(self) -> f64 {
        match self {
            Epsilon::Minus => -1.0,
            Epsilon::Zero => 0.0,
            Epsilon::Plus => 1.0,
        }
    }

    pub fn from_int(v: i64) -> Option<Self> {
        match v {
            -1 => Some(Epsilon::Minus),
            0 => Some(Epsilon::Zero),
            1 => Some(Epsilon::Plus),
            _ => None,
        }
    }

    pub const ALL: [Epsilon; 3] = [Epsilon::Zero, Epsilon::Plus, Epsilon::Minus];
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value() as i64)
    }
}

/// Surfaces with a rotational Killing field. Revolution-type families use
/// `(ρ, angle)` with metric `(β+αρ²)²dρ² + ρ²dφ²`; `G2 { eps }` is the
/// profile with `(α, β) = (1, ε)`. `γ` is the additive constant of the
/// arclength coordinate and does not affect the metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SurfaceFamily {
    Plane,
    Sphere { radius: f64 },
    Hyperbolic { radius: f64 },
    Profile { alpha: f64, beta: f64, gamma: f64 },
    G2 { eps: Epsilon },
}

/// Pointwise frame data. Units: `a_i` 1/length, `kappa` 1/length²,
/// `k1 … k1111` 1/length³ … 1/length⁶.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SurfaceJet {
    pub a1: f64,
    pub a2: f64,
    pub kappa: f64,
    pub k1: f64,
    pub k11: f64,
    pub k111: f64,
    pub k1111: f64,
    /// `a₁ = 0` and `κ₂ = 0`: the frame is adapted to a Killing field.
    pub killing: bool,
}

impl SurfaceJet {
    /// Jet of a surface of constant curvature in a Killing frame.
    pub fn constant(a2: f64, kappa: f64) -> Self {
        SurfaceJet { a2, kappa, killing: true, ..Default::default() }
    }

    /// e₁(a₂), from `κ = a₂₁ − a₁₂ − a₁² − a₂²` with `a₁ ≡ 0`.
    pub fn a21(&self) -> f64 {
        self.kappa + self.a2 * self.a2
    }

    /// Jet of the same surface with metric multiplied by `s0²` (frame `e/s0`).
    pub fn rescaled(&self, s0: f64) -> Self {
        let s2 = s0 * s0;
        SurfaceJet {
            a1: self.a1 / s0,
            a2: self.a2 / s0,
            kappa: self.kappa / s2,
            k1: self.k1 / (s2 * s0),
            k11: self.k11 / (s2 * s2),
            k111: self.k111 / (s2 * s2 * s0),
            k1111: self.k1111 / (s2 * s2 * s2),
            killing: self.killing,
        }
    }

    pub fn is_constant_curvature(&self) -> bool {
        self.k1 == 0.0 && self.k11 == 0.0 && self.k111 == 0.0 && self.k1111 == 0.0
    }
}

/// Warp factors `(w, R)` of a chart point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Warp {
    pub w: f64,
    pub r: f64,
}

impl SurfaceFamily {
    pub fn sphere(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(SurfaceFamily::Sphere { radius })
    }

    pub fn hyperbolic(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(SurfaceFamily::Hyperbolic { radius })
    }

    /// The profile family; `α = 0` is the flat cone family excluded from
    /// the G₂ classification.
    pub fn profile(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::invalid("profile parameters must be finite"));
        }
        let s = SurfaceFamily::Profile { alpha, beta, gamma };
        if alpha == 0.0 {
            return Err(Error::FlatProfile(s.to_string()));
        }
        Ok(s)
    }

    pub fn g2(eps: Epsilon) -> Self {
        SurfaceFamily::G2 { eps }
    }

    /// `(α, β)` for revolution-type families.
    pub fn profile_params(&self) -> Option<(f64, f64)> {
        match *self {
            SurfaceFamily::Profile { alpha, beta, .. } => Some((alpha, beta)),
            SurfaceFamily::G2 { eps } => Some((1.0, eps.value())),
            _ => None,
        }
    }

    pub fn constant_curvature(&self) -> Option<f64> {
        match *self {
            SurfaceFamily::Plane => Some(0.0),
            SurfaceFamily::Sphere { radius } => Some(1.0 / (radius * radius)),
            SurfaceFamily::Hyperbolic { radius } => Some(-1.0 / (radius * radius)),
            _ => None,
        }
    }

    /// Warp factors at `p`, checked against the domain with the given margin.
    pub fn warp_with_margin(&self, p: [f64; 2], margin: f64) -> Result<Warp> {
        let x = p[0];
        if !x.is_finite() || !p[1].is_finite() {
            return Err(Error::domain(format!("{self}: non-finite chart point {p:?}")));
        }
        match *self {
            SurfaceFamily::Plane => Ok(Warp { w: 1.0, r: 1.0 }),
            SurfaceFamily::Sphere { radius } => {
                if x <= margin || x >= PI - margin {
                    return Err(Error::domain(format!("{self}: polar angle {x} outside (0, π)")));
                }
                Ok(Warp { w: radius, r: radius * x.sin() })
            }
            SurfaceFamily::Hyperbolic { radius } => {
                if x <= margin {
                    return Err(Error::domain(format!("{self}: radial coordinate {x} must be positive")));
                }
                Ok(Warp { w: radius, r: radius * x.sinh() })
            }
            SurfaceFamily::Profile { .. } | SurfaceFamily::G2 { .. } => {
                let (alpha, beta) = self.profile_params().unwrap_or((1.0, 0.0));
                if x <= margin {
                    return Err(Error::domain(format!("{self}: ρ = {x} must be positive")));
                }
                let w = beta + alpha * x * x;
                if w.abs() <= margin {
                    return Err(Error::domain(format!("{self}: frame degenerates at ρ = {x} (β+αρ² = {w:.3e})")));
                }
                if matches!(self, SurfaceFamily::G2 { eps: Epsilon::Minus }) && x <= 1.0 + margin {
                    return Err(Error::domain(format!("{self}: ρ = {x} must exceed 1")));
                }
                Ok(Warp { w, r: x })
            }
        }
    }

    pub fn warp(&self, p: [f64; 2]) -> Result<Warp> {
        self.warp_with_margin(p, DEFAULT_MARGIN)
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.warp(p).is_ok()
    }

    /// A representative range of the first chart coordinate, well inside
    /// the domain. Used when no explicit range is requested.
    pub fn default_range(&self) -> (f64, f64) {
        match *self {
            SurfaceFamily::Plane => (-1.0, 1.0),
            SurfaceFamily::Sphere { .. } => (0.2, PI - 0.2),
            SurfaceFamily::Hyperbolic { .. } => (0.2, 2.0),
            SurfaceFamily::G2 { eps: Epsilon::Plus } => (0.1, 3.0),
            SurfaceFamily::G2 { eps: Epsilon::Zero } => (0.5, 3.0),
            SurfaceFamily::G2 { eps: Epsilon::Minus } => (1.5, 3.0),
            SurfaceFamily::Profile { alpha, beta, .. } => {
                if alpha * beta < 0.0 {
                    let r0 = (-beta / alpha).sqrt();
                    (0.2 * r0, 0.85 * r0)
                } else {
                    (0.5, 3.0)
                }
            }
        }
    }

    pub fn jet_at(&self, p: [f64; 2]) -> Result<SurfaceJet> {
        jet_at(self, p)
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("radius must be positive and finite, got {radius}")))
    }
}

/// Analytic jet of a catalog surface at `p`.
pub fn jet_at(s: &SurfaceFamily, p: [f64; 2]) -> Result<SurfaceJet> {
    let x = p[0];
    s.warp(p)?;
    match *s {
        SurfaceFamily::Plane => Ok(SurfaceJet::constant(0.0, 0.0)),
        SurfaceFamily::Sphere { radius } => Ok(SurfaceJet::constant(-1.0 / (radius * x.tan()), 1.0 / (radius * radius))),
        SurfaceFamily::Hyperbolic { radius } => Ok(SurfaceJet::constant(-1.0 / (radius * x.tanh()), -1.0 / (radius * radius))),
        SurfaceFamily::Profile { .. } | SurfaceFamily::G2 { .. } => {
            let (alpha, beta) = s.profile_params().unwrap_or((1.0, 0.0));
            Ok(profile_jet(alpha, beta, x))
        }
    }
}

/// Closed-form jet of `(β+αρ²)²dρ² + ρ²dφ²`. With `w = β+αρ²`,
/// `κ⁽ⁿ⁾ = Pₙ(ρ)/w^{3+2n}` where `P₀ = 2α` and
/// `Pₙ₊₁ = Pₙ′·w − (3+2n)·w′·Pₙ`.
fn profile_jet(alpha: f64, beta: f64, rho: f64) -> SurfaceJet {
    let w_poly = [beta, 0.0, alpha];
    let w = beta + alpha * rho * rho;
    let mut p = vec![2.0 * alpha];
    let mut m = 3;
    let mut ks = [0.0; 5];
    for (n, k) in ks.iter_mut().enumerate() {
        *k = poly_eval(&p, rho) / w.powi(m);
        if n < 4 {
            let dp = poly_derivative(&p);
            let lhs = poly_mul(&dp, &w_poly);
            let rhs = poly_mul(&p, &[0.0, 2.0 * alpha * m as f64]);
            p = poly_sub(&lhs, &rhs);
            m += 2;
        }
    }
    SurfaceJet {
        a1: 0.0,
        a2: -1.0 / (rho * w),
        kappa: ks[0],
        k1: ks[1],
        k11: ks[2],
        k111: ks[3],
        k1111: ks[4],
        killing: true,
    }
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn poly_derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len().max(b.len()))
        .map(|k| a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0))
        .collect()
}

/// A warped metric `w(x)²dx² + R(x)²dy²` given by series-evaluable warp
/// factors. Anything implementing this gets a jet through [`taylor_jet`].
pub trait WarpedProfile {
    fn warp_series(&self, x: JetSeries) -> (JetSeries, JetSeries);
}

impl WarpedProfile for SurfaceFamily {
    fn warp_series(&self, x: JetSeries) -> (JetSeries, JetSeries) {
        match *self {
            SurfaceFamily::Plane => (JetSeries::constant(1.0), JetSeries::constant(1.0)),
            SurfaceFamily::Sphere { radius } => (JetSeries::constant(radius), x.sin() * radius),
            SurfaceFamily::Hyperbolic { radius } => (JetSeries::constant(radius), x.sinh() * radius),
            SurfaceFamily::Profile { .. } | SurfaceFamily::G2 { .. } => {
                let (alpha, beta) = self.profile_params().unwrap_or((1.0, 0.0));
                (x * x * alpha + beta, x)
            }
        }
    }
}

/// Jet of an arbitrary warped profile by truncated Taylor arithmetic.
///
/// Only the warp values at `x` are checked; callers own any wider domain.
pub fn taylor_jet<P: WarpedProfile + ?Sized>(profile: &P, x: f64) -> Result<SurfaceJet> {
    let (w, r) = profile.warp_series(JetSeries::variable(x));
    if !(w.value().is_finite() && r.value().is_finite()) || w.value().abs() <= DEFAULT_MARGIN || r.value().abs() <= DEFAULT_MARGIN {
        return Err(Error::domain(format!("warp degenerates at x = {x}: w = {}, R = {}", w.value(), r.value())));
    }
    let e1 = |f: JetSeries| f.derivative() / w;
    let a2 = -(r.derivative() / (w * r));
    let kappa = e1(a2) - a2 * a2;
    let k1 = e1(kappa);
    let k11 = e1(k1);
    let k111 = e1(k11);
    let k1111 = e1(k111);
    Ok(SurfaceJet {
        a1: 0.0,
        a2: a2.value(),
        kappa: kappa.value(),
        k1: k1.value(),
        k11: k11.value(),
        k111: k111.value(),
        k1111: k1111.value(),
        killing: true,
    })
}

/// `2α/(β+αρ²)³`.
pub fn gaussian_curvature_profile(alpha: f64, beta: f64, rho: f64) -> Result<f64> {
    let w = beta + alpha * rho * rho;
    if w == 0.0 || !w.is_finite() {
        return Err(Error::domain(format!("curvature is singular at β+αρ² = 0 (α={alpha}, β={beta}, ρ={rho})")));
    }
    Ok(2.0 * alpha / (w * w * w))
}

/// `ρ‴ρ′ρ² − 3ρ″²ρ² + ρ″ρ′²ρ + ρ′⁴` for a profile `ρ(x)` in the conformal
/// coordinate `x` of `ρ(x)²(dx² + dφ²)`.
pub fn profile_ode_residual(rho: f64, d1: f64, d2: f64, d3: f64) -> f64 {
    d3 * d1 * rho * rho - 3.0 * d2 * d2 * rho * rho + d2 * d1 * d1 * rho + d1.powi(4)
}

/// Sum of the absolute values of the terms in [`profile_ode_residual`],
/// the natural scale for judging a residual.
pub fn profile_ode_scale(rho: f64, d1: f64, d2: f64, d3: f64) -> f64 {
    (d3 * d1 * rho * rho).abs() + (3.0 * d2 * d2 * rho * rho).abs() + (d2 * d1 * d1 * rho).abs() + d1.powi(4)
}

/// `x‴ρ² + x″ρ − x′` for the inverse function `x(ρ)`.
pub fn reciprocal_ode_residual(x1: f64, x2: f64, x3: f64, rho: f64) -> f64 {
    x3 * rho * rho + x2 * rho - x1
}

/// `(ρ, ρ′, ρ″, ρ‴)` for the profile `(α, β)` written conformally as
/// `ρ(x)²(dx² + dφ²)`, so that `ρ dx = (β+αρ²) dρ`.
pub fn profile_conformal_derivatives(alpha: f64, beta: f64, rho: f64) -> Result<[f64; 4]> {
    let w = beta + alpha * rho * rho;
    if w == 0.0 || rho == 0.0 {
        return Err(Error::domain(format!("conformal coordinate degenerates at ρ = {rho}")));
    }
    // ρ′ = f(ρ) = ρ/w, and d/dx = f d/dρ
    let wr = 2.0 * alpha * rho;
    let f = rho / w;
    let n = beta - alpha * rho * rho;
    let f_r = n / (w * w);
    let f_rr = (-2.0 * alpha * rho * w - 2.0 * n * wr) / w.powi(3);
    Ok([rho, f, f * f_r, f * (f_r * f_r + f * f_rr)])
}

/// The same surface with its metric multiplied by `s0²`. Jets of the result
/// at [`scale_chart_point`] equal `jet.rescaled(|s0|)`.
pub fn scale_surface(s: &SurfaceFamily, s0: f64) -> Result<SurfaceFamily> {
    if s0 == 0.0 || !s0.is_finite() {
        return Err(Error::invalid(format!("scale factor must be finite and nonzero, got {s0}")));
    }
    let k = s0.abs();
    Ok(match *s {
        SurfaceFamily::Plane => SurfaceFamily::Plane,
        SurfaceFamily::Sphere { radius } => SurfaceFamily::Sphere { radius: radius * k },
        SurfaceFamily::Hyperbolic { radius } => SurfaceFamily::Hyperbolic { radius: radius * k },
        SurfaceFamily::G2 { .. } if k == 1.0 => *s,
        SurfaceFamily::Profile { .. } | SurfaceFamily::G2 { .. } => {
            let (alpha, beta) = s.profile_params().unwrap_or((1.0, 0.0));
            let gamma = match *s {
                SurfaceFamily::Profile { gamma, .. } => gamma,
                _ => 0.0,
            };
            SurfaceFamily::Profile { alpha: alpha / (k * k), beta, gamma }
        }
    })
}

/// Image of a chart point under the homothety of [`scale_surface`].
pub fn scale_chart_point(s: &SurfaceFamily, s0: f64, p: [f64; 2]) -> [f64; 2] {
    let k = s0.abs();
    match s {
        SurfaceFamily::Plane => [k * p[0], k * p[1]],
        SurfaceFamily::Sphere { .. } | SurfaceFamily::Hyperbolic { .. } => p,
        SurfaceFamily::Profile { .. } | SurfaceFamily::G2 { .. } => {
            if matches!(s, SurfaceFamily::G2 { .. }) && k == 1.0 {
                p
            } else {
                [k * p[0], p[1]]
            }
        }
    }
}

impl fmt::Display for SurfaceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SurfaceFamily::Plane => write!(f, "plane"),
            SurfaceFamily::Sphere { radius } => write!(f, "sphere:r={radius}"),
            SurfaceFamily::Hyperbolic { radius } => write!(f, "hyperbolic:r={radius}"),
            SurfaceFamily::Profile { alpha, beta, gamma } => {
                write!(f, "profile:alpha={alpha},beta={beta}")?;
                if gamma != 0.0 {
                    write!(f, ",gamma={gamma}")?;
                }
                Ok(())
            }
            SurfaceFamily::G2 { eps } => write!(f, "g2:eps={eps}"),
        }
    }
}

struct Param<'a> {
    key: &'a str,
    value: &'a str,
    position: usize,
}

fn parse_error(position: usize, message: impl Into<String>) -> Error {
    Error::Parse { position, message: message.into() }
}

/// Splits `k=v,k=v` starting at byte `offset` of the original string.
fn split_params(body: &str, offset: usize) -> Result<Vec<Param<'_>>> {
    let mut out: Vec<Param<'_>> = Vec::new();
    let mut start = 0;
    for piece in body.split(',') {
        let position = offset + start;
        let (key, value) = piece
            .split_once('=')
            .ok_or_else(|| parse_error(position, format!("expected key=value, found {piece:?}")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(parse_error(position, "empty parameter name"));
        }
        if out.iter().any(|p| p.key == key) {
            return Err(parse_error(position, format!("duplicate parameter {key:?}")));
        }
        out.push(Param { key, value: value.trim(), position: position + piece.find('=').unwrap_or(0) + 1 });
        start += piece.len() + 1;
    }
    Ok(out)
}

fn take_number(params: &mut Vec<Param<'_>>, key: &str) -> Result<Option<f64>> {
    let Some(idx) = params.iter().position(|p| p.key == key) else {
        return Ok(None);
    };
    let p = params.remove(idx);
    let v: f64 = p
        .value
        .parse()
        .map_err(|_| parse_error(p.position, format!("{key}: cannot parse {:?} as a number", p.value)))?;
    if !v.is_finite() {
        return Err(parse_error(p.position, format!("{key} must be finite")));
    }
    Ok(Some(v))
}

fn require(v: Option<f64>, key: &str, end: usize) -> Result<f64> {
    v.ok_or_else(|| parse_error(end, format!("missing parameter {key}")))
}

impl FromStr for SurfaceFamily {
    type Err = Error;

    /// Grammar: `plane`, `sphere:r=<v>`, `hyperbolic:r=<v>`,
    /// `profile:alpha=<v>,beta=<v>[,gamma=<v>]`, `g2:eps=<-1|0|1>`.
    /// Error positions are byte offsets into the input.
    fn from_str(input: &str) -> Result<Self> {
        let (kind, body) = match input.split_once(':') {
            Some((k, b)) => (k, Some(b)),
            None => (input, None),
        };
        let offset = kind.len() + 1;
        let end = input.len();
        let mut params = match body {
            Some(b) => split_params(b, offset)?,
            None => Vec::new(),
        };
        let surface = match kind.trim() {
            "plane" => SurfaceFamily::Plane,
            "sphere" | "hyperbolic" => {
                let r = require(take_number(&mut params, "r")?, "r", end)?;
                let built = if kind.trim() == "sphere" { SurfaceFamily::sphere(r) } else { SurfaceFamily::hyperbolic(r) };
                built.map_err(|e| parse_error(offset, e.to_string()))?
            }
            "profile" => {
                let alpha = require(take_number(&mut params, "alpha")?, "alpha", end)?;
                let beta = require(take_number(&mut params, "beta")?, "beta", end)?;
                let gamma = take_number(&mut params, "gamma")?.unwrap_or(0.0);
                SurfaceFamily::profile(alpha, beta, gamma)?
            }
            "g2" => {
                let eps = require(take_number(&mut params, "eps")?, "eps", end)?;
                let eps = (eps.fract() == 0.0)
                    .then(|| Epsilon::from_int(eps as i64))
                    .flatten()
                    .ok_or_else(|| parse_error(offset, format!("eps must be -1, 0 or 1, got {eps}")))?;
                SurfaceFamily::G2 { eps }
            }
            other => return Err(parse_error(0, format!("unknown surface kind {other:?}"))),
        };
        if let Some(p) = params.first() {
            return Err(parse_error(p.position - p.key.len() - 1, format!("unknown parameter {:?}", p.key)));
        }
        Ok(surface)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::fornberg_weights;

    #[test]
    fn g2_zero_at_one() {
        let j = jet_at(&SurfaceFamily::g2(Epsilon::Zero), [1.0, 0.0]).unwrap();
        assert!((j.kappa - 2.0).abs() < 1e-15);
        assert!((j.a2 + 1.0).abs() < 1e-15);
        assert!(j.killing && j.a1 == 0.0);
    }

    #[test]
    fn plane_and_spheres() {
        let j = jet_at(&SurfaceFamily::Plane, [0.3, -2.0]).unwrap();
        assert_eq!(j, SurfaceJet::constant(0.0, 0.0));
        let s = jet_at(&SurfaceFamily::Sphere { radius: 2.0 }, [1.0, 0.0]).unwrap();
        assert_eq!(s.kappa, 0.25);
        assert!(s.is_constant_curvature());
        let h = jet_at(&SurfaceFamily::Hyperbolic { radius: 2.0 }, [1.0, 0.0]).unwrap();
        assert_eq!(h.kappa, -0.25);
        assert!(h.is_constant_curvature());
    }

    #[test]
    fn degenerate_points_are_domain_errors() {
        let g = SurfaceFamily::g2(Epsilon::Plus);
        assert!(matches!(jet_at(&g, [0.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(jet_at(&g, [-1.0, 0.0]), Err(Error::Domain(_))));
        let m = SurfaceFamily::g2(Epsilon::Minus);
        assert!(jet_at(&m, [1.0, 0.0]).is_err());
        assert!(jet_at(&m, [1.0 + 1e-7, 0.0]).is_err());
        assert!(jet_at(&m, [1.0 + 1e-5, 0.0]).is_ok());
        let p = SurfaceFamily::profile(1.0, -5.0, 0.0).unwrap();
        assert!(jet_at(&p, [5f64.sqrt(), 0.0]).is_err());
        assert!(jet_at(&SurfaceFamily::Sphere { radius: 1.0 }, [PI, 0.0]).is_err());
    }

    #[test]
    fn curvature_profile_examples() {
        assert_eq!(gaussian_curvature_profile(1.0, 1.0, 0.0).unwrap(), 2.0);
        assert_eq!(gaussian_curvature_profile(1.0, -5.0, 2.0).unwrap(), -2.0);
        assert_eq!(gaussian_curvature_profile(0.0, 1.0, 0.7).unwrap(), 0.0);
        assert!(gaussian_curvature_profile(1.0, -4.0, 2.0).is_err());
        // the ρ → 0 limit of the ε=+1 jet approaches the same value
        let j = jet_at(&SurfaceFamily::g2(Epsilon::Plus), [1e-4, 0.0]).unwrap();
        assert!((j.kappa - 2.0).abs() < 1e-6);
    }

    // Fourth-order frame derivatives by sampling κ(ρ) on a stencil and
    // converting ρ-derivatives to e₁-derivatives through e₁ = (1/w) d/dρ.
    fn fd_jet(alpha: f64, beta: f64, rho: f64) -> [f64; 5] {
        let reach = (beta + alpha * rho * rho).abs() / (2.0 * alpha * rho).abs();
        let h = 1e-2 * rho.min(reach).min(1.0);
        let nodes: Vec<f64> = (-6..=6).map(|k| rho + k as f64 * h).collect();
        let weights = fornberg_weights(rho, &nodes, 4);
        let k = |r: f64| gaussian_curvature_profile(alpha, beta, r).unwrap();
        let vals: Vec<f64> = nodes.iter().map(|&r| k(r)).collect();
        let d: Vec<f64> = (0..=4).map(|o| weights[o].iter().zip(&vals).map(|(a, b)| a * b).sum()).collect();
        // f₁ = f′/w, iterate symbolically in terms of ρ-derivatives of κ
        let w = [beta + alpha * rho * rho, 2.0 * alpha * rho, 2.0 * alpha];
        // D f = f'/w, with f given as its first few ρ-derivatives
        let apply = |f: &[f64]| -> Vec<f64> {
            // g = f'/w; derivatives of g via Leibniz on g·w = f'
            let n = f.len() - 1;
            let mut g = vec![0.0; n];
            for m in 0..n {
                let mut acc = f[m + 1];
                for j in 1..=m.min(2) {
                    acc -= binom(m, j) * w[j] * g[m - j];
                }
                g[m] = acc / w[0];
            }
            g
        };
        let mut out = [0.0; 5];
        let mut f = d.clone();
        out[0] = f[0];
        for slot in out.iter_mut().skip(1) {
            f = apply(&f);
            *slot = f[0];
        }
        out
    }

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn analytic_jet_matches_finite_differences() {
        let cases = [(1.0, 1.0), (1.0, 0.0), (1.0, -1.0), (1.0, -5.0), (2.0, 3.0), (-0.5, 4.0)];
        for (alpha, beta) in cases {
            let s = SurfaceFamily::profile(alpha, beta, 0.0).unwrap();
            let (lo, hi) = s.default_range();
            // relative to the largest magnitude of each order over the sweep,
            // so that zero crossings of a derivative do not count
            let mut pairs = Vec::new();
            for i in 0..10 {
                let rho = lo + (hi - lo) * (i as f64 + 0.5) / 10.0;
                let j = jet_at(&s, [rho, 0.0]).unwrap();
                pairs.push(([j.kappa, j.k1, j.k11, j.k111, j.k1111], fd_jet(alpha, beta, rho), rho));
            }
            for order in 0..5 {
                let scale = pairs.iter().map(|p| p.0[order].abs()).fold(0.0, f64::max);
                for (an, fd, rho) in &pairs {
                    assert!((an[order] - fd[order]).abs() < 1e-6 * scale, "α={alpha} β={beta} ρ={rho} order {order}: {} vs {}", an[order], fd[order]);
                }
            }
        }
    }

    #[test]
    fn taylor_route_matches_closed_forms() {
        let surfaces = [
            (SurfaceFamily::Sphere { radius: 1.5 }, 0.9),
            (SurfaceFamily::Hyperbolic { radius: 0.7 }, 1.1),
            (SurfaceFamily::g2(Epsilon::Minus), 1.7),
            (SurfaceFamily::profile(0.3, -5.0, 0.0).unwrap(), 0.8),
        ];
        for (s, x) in surfaces {
            let a = jet_at(&s, [x, 0.0]).unwrap();
            let t = taylor_jet(&s, x).unwrap();
            let fields = [(a.a2, t.a2), (a.kappa, t.kappa), (a.k1, t.k1), (a.k11, t.k11), (a.k111, t.k111), (a.k1111, t.k1111)];
            for (u, v) in fields {
                assert!((u - v).abs() <= 1e-9 * (1.0 + u.abs()), "{s}: {u} vs {v}");
            }
        }
    }

    struct Bulb;

    impl WarpedProfile for Bulb {
        // dx² + (1+x²)²dy²: κ = −R″/R = −2/(1+x²)
        fn warp_series(&self, x: JetSeries) -> (JetSeries, JetSeries) {
            (JetSeries::constant(1.0), x * x + 1.0)
        }
    }

    #[test]
    fn custom_profile_through_taylor_route() {
        let x = 0.4f64;
        let j = taylor_jet(&Bulb, x).unwrap();
        let q = 1.0 + x * x;
        assert!((j.kappa + 2.0 / q).abs() < 1e-12);
        assert!((j.k1 - 4.0 * x / (q * q)).abs() < 1e-12);
        assert!((j.k11 - (4.0 / (q * q) - 16.0 * x * x / q.powi(3))).abs() < 1e-12);
    }

    #[test]
    fn g2_jets_solve_the_profile_ode() {
        for eps in Epsilon::ALL {
            let s = SurfaceFamily::g2(eps);
            let (lo, hi) = s.default_range();
            for i in 0..100 {
                let rho = lo + (hi - lo) * i as f64 / 99.0;
                let [r, d1, d2, d3] = profile_conformal_derivatives(1.0, eps.value(), rho).unwrap();
                let res = profile_ode_residual(r, d1, d2, d3);
                assert!(res.abs() < 1e-10 * profile_ode_scale(r, d1, d2, d3), "ε={eps} ρ={rho}: {res}");
            }
        }
    }

    #[test]
    fn ode_examples() {
        // x = ½ρ²: ρ = √(2x); at x = 2, ρ = 2
        let x = 2.0f64;
        let r = (2.0 * x).sqrt();
        let d1 = 1.0 / r;
        let d2 = -1.0 / r.powi(3);
        let d3 = 3.0 / r.powi(5);
        assert!(profile_ode_residual(r, d1, d2, d3).abs() < 1e-15);
        assert_eq!(profile_ode_residual(3.0, 0.0, 0.0, 0.0), 0.0);
        // ρ = eˣ is the flat α = 0 solution; ρ = sin x is not a solution
        let e = 0.5f64.exp();
        assert!(profile_ode_residual(e, e, e, e).abs() < 1e-12);
        let (s, c) = 0.5f64.sin_cos();
        assert!(profile_ode_residual(s, c, -s, -c).abs() > 1e-3);
        assert_eq!(reciprocal_ode_residual(0.0, 0.0, 0.0, 2.0), 0.0);
        assert_eq!(reciprocal_ode_residual(3.0, 6.0, 6.0, 1.0), 9.0);
        // x = ρ² + 3 ln ρ − 1 (α = 2, β = 3, γ = −1)
        let rho = 1.7f64;
        let x1 = 2.0 * rho + 3.0 / rho;
        let x2 = 2.0 - 3.0 / (rho * rho);
        let x3 = 6.0 / rho.powi(3);
        assert!(reciprocal_ode_residual(x1, x2, x3, rho).abs() < 1e-14);
    }

    #[test]
    fn scaling() {
        let s = scale_surface(&SurfaceFamily::Sphere { radius: 1.0 }, 3.0).unwrap();
        assert_eq!(s, SurfaceFamily::Sphere { radius: 3.0 });
        assert!((s.constant_curvature().unwrap() - 1.0 / 9.0).abs() < 1e-16);
        assert!(scale_surface(&SurfaceFamily::Plane, 0.0).is_err());
        let g = SurfaceFamily::g2(Epsilon::Plus);
        assert_eq!(scale_surface(&g, 1.0).unwrap(), g);
        for s in [
            SurfaceFamily::Plane,
            SurfaceFamily::Sphere { radius: 1.0 },
            SurfaceFamily::Hyperbolic { radius: 2.0 },
            SurfaceFamily::g2(Epsilon::Minus),
            SurfaceFamily::profile(1.0, -5.0, 0.0).unwrap(),
        ] {
            let (lo, hi) = s.default_range();
            let p = [0.5 * (lo + hi), 0.3];
            for s0 in [0.5, 2.0, 10.0] {
                let t = scale_surface(&s, s0).unwrap();
                let a = jet_at(&t, scale_chart_point(&s, s0, p)).unwrap();
                let b = jet_at(&s, p).unwrap().rescaled(s0);
                let pairs = [(a.a2, b.a2), (a.kappa, b.kappa), (a.k1, b.k1), (a.k11, b.k11), (a.k111, b.k111), (a.k1111, b.k1111)];
                for (u, v) in pairs {
                    assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()), "{s} × {s0}: {u} vs {v}");
                }
            }
        }
    }

    #[test]
    fn parse_roundtrip_and_errors() {
        for text in ["plane", "sphere:r=1", "hyperbolic:r=2.5", "profile:alpha=1,beta=-5", "g2:eps=-1", "profile:alpha=2,beta=3,gamma=-1"] {
            let s: SurfaceFamily = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        let err = |t: &str| match t.parse::<SurfaceFamily>() {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("{t}: {other:?}"),
        };
        assert_eq!(err("torus"), 0);
        assert_eq!(err("sphere:r=abc"), 9);
        assert_eq!(err("sphere:r=1,q=2"), 11);
        assert_eq!(err("g2:eps=2"), 3);
        assert!(matches!("profile:alpha=0,beta=1".parse::<SurfaceFamily>(), Err(Error::FlatProfile(_))));
        assert!("sphere:r=-1".parse::<SurfaceFamily>().is_err());
        assert!("profile:alpha=1".parse::<SurfaceFamily>().is_err());
        assert!("sphere:r=1,r=2".parse::<SurfaceFamily>().is_err());
    }
}
