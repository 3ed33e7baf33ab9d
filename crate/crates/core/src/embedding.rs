//! Surfaces of revolution `(β+αρ²)²dρ² + ρ²dφ²` with `α = 1` in flat ℝ³.
//!
//! The embedding is `(ρcosφ, ρsinφ, Z(ρ))` with `Z′ = √((ρ²+e)² − 1)`, so the
//! first fundamental form is `E = 1 + Z′² = (ρ²+e)²`, `G = ρ²`. For
//! `e = ±1` the height is `⅓(ρ²±2)^{3/2}`; `e = 0` needs quadrature; the
//! negative-curvature branch of `e = −5` is real only for `ρ ≤ 2`.

use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;

use crate::fd::sampled_derivative;
use crate::quadrature::{integrate, Quadrature};
use crate::surfaces::Epsilon;
use crate::{fmt_sig, Error, Result};

/// Absolute target for height quadratures.
pub const HEIGHT_TOL: f64 = 1e-12;

/// `β` of the negative-curvature profile `(ρ² − 5)²dρ² + ρ²dφ²`.
pub const NEGATIVE_BETA: f64 = -5.0;

/// Which profile a mesh samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFamily {
    G2(Epsilon),
    /// The `ρ ∈ [0, 2]` branch of `β = −5`.
    NegativeCurvature,
}

impl MeshFamily {
    pub fn tag(self) -> &'static str {
        match self {
            MeshFamily::G2(_) => "g2",
            MeshFamily::NegativeCurvature => "negative-curvature",
        }
    }

    /// The `e` of `(ρ² + e)²dρ²`.
    pub fn beta(self) -> f64 {
        match self {
            MeshFamily::G2(eps) => eps.value(),
            MeshFamily::NegativeCurvature => NEGATIVE_BETA,
        }
    }

    pub fn height(self, rho: f64) -> Result<f64> {
        match self {
            MeshFamily::G2(eps) => height(eps, rho),
            MeshFamily::NegativeCurvature => negative_curvature_height(rho),
        }
    }

    /// Radial sampling adapted to the branch point of `Z` at the end of
    /// the default range, if there is one.
    pub fn radial(self) -> Radial {
        match self {
            MeshFamily::G2(Epsilon::Plus) => Radial::Uniform,
            MeshFamily::G2(eps) => Radial::Above { rho0: lower_radius(eps) },
            MeshFamily::NegativeCurvature => Radial::Below { rho0: 2.0 },
        }
    }

    /// `κ = 2/(ρ² + e)³`.
    pub fn gaussian_curvature(self, rho: f64) -> f64 {
        2.0 / (rho * rho + self.beta()).powi(3)
    }
}

fn check_finite(rho: f64, phi: f64) -> Result<()> {
    if rho.is_finite() && phi.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("non-finite embedding coordinates ({rho}, {phi})")))
    }
}

/// Smallest admissible `ρ`, where `(ρ² + ε)² = 1`.
pub fn lower_radius(eps: Epsilon) -> f64 {
    (1.0 - eps.value()).sqrt()
}

/// `Z(ρ)`: closed forms for `ε = ±1`, quadrature from `ρ = 1` for `ε = 0`.
pub fn height(eps: Epsilon, rho: f64) -> Result<f64> {
    let r0 = lower_radius(eps);
    // the closed form is exact at the threshold, allow its rounding
    if !(rho >= r0 - 4.0 * f64::EPSILON * r0) {
        return Err(Error::domain(format!("ρ = {rho} is below the threshold {r0} for ε = {eps}")));
    }
    Ok(match eps {
        Epsilon::Plus => (rho * rho + 2.0).powf(1.5) / 3.0,
        Epsilon::Minus => (rho * rho - 2.0).max(0.0).powf(1.5) / 3.0,
        Epsilon::Zero => height_quadrature(eps, rho)?.value,
    })
}

/// `Z(ρ)` by adaptive quadrature for any `ε`, starting at the threshold
/// `ρ₀ = √(1−ε)` with the same constant as the closed forms. The branch point
/// at `ρ₀` is removed by `ρ = ρ₀ + σ²`, which turns the integrand into
/// `2σ²√((ρ+ρ₀)(ρ²+ε+1))`.
pub fn height_quadrature(eps: Epsilon, rho: f64) -> Result<Quadrature> {
    let r0 = lower_radius(eps);
    if !rho.is_finite() || rho < r0 {
        return Err(Error::domain(format!("ρ = {rho} is below the threshold {r0} for ε = {eps}")));
    }
    let e = eps.value();
    let base = if eps == Epsilon::Plus { 2f64.powf(1.5) / 3.0 } else { 0.0 };
    let f = |s: f64| {
        let x = r0 + s * s;
        2.0 * s * s * ((x + r0) * (x * x + e + 1.0)).sqrt()
    };
    let mut q = integrate(f, 0.0, (rho - r0).sqrt(), HEIGHT_TOL);
    q.value += base;
    Ok(q)
}

/// `(ρcosφ, ρsinφ, Z(ρ))` on the ε-surface.
pub fn embed_point(eps: Epsilon, rho: f64, phi: f64) -> Result<[f64; 3]> {
    check_finite(rho, phi)?;
    let z = height(eps, rho)?;
    let (s, c) = phi.sin_cos();
    Ok([rho * c, rho * s, z])
}

/// `(X² + Y² + 2ε)³ − 9Z²`, zero on the ε = ±1 surfaces.
pub fn algebraic_residual(eps: Epsilon, x: f64, y: f64, z: f64) -> Result<f64> {
    if eps == Epsilon::Zero {
        return Err(Error::invalid("the algebraic form exists only for ε = ±1"));
    }
    Ok((x * x + y * y + 2.0 * eps.value()).powi(3) - 9.0 * z * z)
}

/// `Z(ρ) = ∫₀^ρ √((x²−6)(x²−4)) dx` for `0 ≤ ρ ≤ 2`.
pub fn negative_curvature_height(rho: f64) -> Result<f64> {
    Ok(negative_curvature_quadrature(rho)?.value)
}

/// The quadrature behind [`negative_curvature_height`]: plain on `[0, 1]`,
/// then `x = 2 − τ²` to absorb the branch point at `x = 2`.
pub fn negative_curvature_quadrature(rho: f64) -> Result<Quadrature> {
    if !(0.0..=2.0).contains(&rho) {
        return Err(Error::domain(format!("ρ = {rho} is outside [0, 2] for the negative-curvature branch")));
    }
    let direct = |x: f64| ((6.0 - x * x) * (4.0 - x * x)).sqrt();
    let head = integrate(direct, 0.0, rho.min(1.0), HEIGHT_TOL);
    if rho <= 1.0 {
        return Ok(head);
    }
    let tail = integrate(negative_curvature_tail, (2.0 - rho).sqrt(), 1.0, HEIGHT_TOL);
    Ok(Quadrature {
        value: head.value + tail.value,
        error: head.error + tail.error,
        evaluations: head.evaluations + tail.evaluations,
    })
}

/// Integrand of the `x ∈ [1, 2]` part in the variable `τ = √(2 − x)`.
pub fn negative_curvature_tail(tau: f64) -> f64 {
    let x = 2.0 - tau * tau;
    2.0 * tau * tau * ((6.0 - x * x) * (2.0 + x)).sqrt()
}

pub fn embed_negative_curvature(rho: f64, phi: f64) -> Result<[f64; 3]> {
    check_finite(rho, phi)?;
    let z = negative_curvature_height(rho)?;
    let (s, c) = phi.sin_cos();
    Ok([rho * c, rho * s, z])
}

/// Radial sampling of a mesh. Rows are uniform in a parameter `q`; near a
/// square-root branch point of `Z` the substitution `ρ = ρ₀ ± q²` makes the
/// height analytic in `q`, which finite differences need.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Radial {
    /// `q = ρ`.
    Uniform,
    /// `ρ = ρ₀ + q²`, branch point below the range.
    Above { rho0: f64 },
    /// `ρ = ρ₀ − q²`, branch point above the range.
    Below { rho0: f64 },
}

impl Radial {
    fn rho(self, q: f64) -> f64 {
        match self {
            Radial::Uniform => q,
            Radial::Above { rho0 } => rho0 + q * q,
            Radial::Below { rho0 } => rho0 - q * q,
        }
    }

    /// `dρ/dq`.
    fn jacobian(self, q: f64) -> f64 {
        match self {
            Radial::Uniform => 1.0,
            Radial::Above { .. } => 2.0 * q,
            Radial::Below { .. } => -2.0 * q,
        }
    }

    /// `q` at `ρ`, for a range endpoint.
    fn param(self, rho: f64) -> Result<f64> {
        let d = match self {
            Radial::Uniform => return Ok(rho),
            Radial::Above { rho0 } => rho - rho0,
            Radial::Below { rho0 } => rho0 - rho,
        };
        if d < 0.0 {
            return Err(Error::domain(format!("ρ = {rho} is on the wrong side of the branch point for {self:?}")));
        }
        Ok(d.sqrt())
    }
}

/// Vertices on a `(ρ_i, φ_j)` grid, `φ_j = 2πj/nφ`, stored row-major in `i`
/// with `ρ` increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct RevolutionMesh {
    pub family: MeshFamily,
    pub radial: Radial,
    /// The radial parameter of each row.
    pub q: Vec<f64>,
    pub rho: Vec<f64>,
    pub phi: Vec<f64>,
    pub vertices: Vec<[f64; 3]>,
}

impl RevolutionMesh {
    /// Mesh with the family's default radial sampling.
    pub fn build(family: MeshFamily, rho_range: (f64, f64), nr: usize, nphi: usize) -> Result<Self> {
        Self::build_with(family, rho_range, nr, nphi, family.radial())
    }

    pub fn build_with(family: MeshFamily, rho_range: (f64, f64), nr: usize, nphi: usize, radial: Radial) -> Result<Self> {
        let (a, b) = rho_range;
        if nr < 2 || nphi < 3 {
            return Err(Error::invalid(format!("mesh needs nr ≥ 2 and nφ ≥ 3, got {nr}×{nphi}")));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid(format!("invalid ρ range [{a}, {b}]")));
        }
        // heights first: a range outside the family's domain is a domain error
        family.height(a)?;
        family.height(b)?;
        let (qa, qb) = (radial.param(a)?, radial.param(b)?);
        let q: Vec<f64> = (0..nr).map(|i| qa + (qb - qa) * i as f64 / (nr - 1) as f64).collect();
        let rho: Vec<f64> = q
            .iter()
            .enumerate()
            .map(|(i, &s)| match i {
                0 => a,
                _ if i + 1 == nr => b,
                _ => radial.rho(s),
            })
            .collect();
        let phi: Vec<f64> = (0..nphi).map(|j| TAU * j as f64 / nphi as f64).collect();
        let heights: Vec<f64> = rho.iter().map(|&r| family.height(r)).collect::<Result<_>>()?;
        let mut vertices = Vec::with_capacity(nr * nphi);
        for (&r, &z) in rho.iter().zip(&heights) {
            for &p in &phi {
                let (s, c) = p.sin_cos();
                vertices.push([r * c, r * s, z]);
            }
        }
        Ok(RevolutionMesh { family, radial, q, rho, phi, vertices })
    }

    pub fn nr(&self) -> usize {
        self.rho.len()
    }

    pub fn nphi(&self) -> usize {
        self.phi.len()
    }

    pub fn vertex(&self, i: usize, j: usize) -> [f64; 3] {
        self.vertices[i * self.nphi() + j]
    }

    /// Quads `(i,j), (i+1,j), (i+1,j+1), (i,j+1)`, closed around in `φ`.
    pub fn quads(&self) -> Vec<[usize; 4]> {
        let m = self.nphi();
        let mut out = Vec::with_capacity((self.nr() - 1) * m);
        for i in 0..self.nr() - 1 {
            for j in 0..m {
                let k = (j + 1) % m;
                out.push([i * m + j, (i + 1) * m + j, (i + 1) * m + k, i * m + k]);
            }
        }
        out
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        let eps = match self.family {
            MeshFamily::G2(e) => e.to_string(),
            MeshFamily::NegativeCurvature => format!("{}", NEGATIVE_BETA),
        };
        writeln!(out, "# family={} eps={} nr={} nphi={}", self.family.tag(), eps, self.nr(), self.nphi())?;
        for i in 0..self.nr() {
            for j in 0..self.nphi() {
                let [x, y, z] = self.vertex(i, j);
                writeln!(out, "{i} {j} {} {} {}", fmt_sig(x), fmt_sig(y), fmt_sig(z))?;
            }
        }
        for q in self.quads() {
            writeln!(out, "q {} {} {} {}", q[0], q[1], q[2], q[3])?;
        }
        Ok(())
    }

    /// Tangents and second derivatives in the `(q, φ)` chart: sampled
    /// stencils along `q`, trigonometric differentiation around `φ`.
    fn derivatives(&self) -> Result<Vec<Jet>> {
        let (nr, m) = (self.nr(), self.nphi());
        let dq = self.q[1] - self.q[0];
        let column = |j: usize, c: usize| -> Vec<f64> { (0..nr).map(|i| self.vertex(i, j)[c]).collect() };
        let mut d_q = vec![[0.0; 3]; nr * m];
        let mut d_qq = vec![[0.0; 3]; nr * m];
        for j in 0..m {
            for c in 0..3 {
                let col = column(j, c);
                let first = sampled_derivative(&col, dq, 1)?;
                let second = sampled_derivative(&col, dq, 2)?;
                for i in 0..nr {
                    d_q[i * m + j][c] = first[i];
                    d_qq[i * m + j][c] = second[i];
                }
            }
        }
        let d = periodic_derivative_row(m);
        let around = |field: &[[f64; 3]], i: usize, j: usize| -> [f64; 3] {
            let mut acc = [0.0; 3];
            for (k, dk) in d.iter().enumerate() {
                let jj = (j + k) % m;
                for c in 0..3 {
                    acc[c] += dk * field[i * m + jj][c];
                }
            }
            acc
        };
        let d_p: Vec<[f64; 3]> = (0..nr * m).map(|k| around(&self.vertices, k / m, k % m)).collect();
        let mut out = Vec::with_capacity(nr * m);
        for k in 0..nr * m {
            let (i, j) = (k / m, k % m);
            out.push(Jet { q: d_q[k], p: d_p[k], qq: d_qq[k], qp: around(&d_q, i, j), pp: around(&d_p, i, j) });
        }
        Ok(out)
    }

    /// First fundamental form `(E, F, G)` per vertex in the `(q, φ)` chart.
    pub fn first_fundamental_form(&self) -> Result<Vec<[f64; 3]>> {
        Ok(self.derivatives()?.iter().map(|d| [dot(&d.q, &d.q), dot(&d.q, &d.p), dot(&d.p, &d.p)]).collect())
    }

    /// Gaussian curvature `(LN − M²)/(EG − F²)` on interior vertices
    /// (`0 < i < nr − 1`), as rows `(i, j, K)`. Chart independent.
    pub fn gaussian_curvature(&self) -> Result<Vec<(usize, usize, f64)>> {
        let d = self.derivatives()?;
        let m = self.nphi();
        let mut out = Vec::new();
        for i in 1..self.nr() - 1 {
            for j in 0..m {
                let v = &d[i * m + j];
                let n = cross(&v.q, &v.p);
                let area2 = dot(&n, &n);
                let (e, f, g) = (dot(&v.q, &v.q), dot(&v.q, &v.p), dot(&v.p, &v.p));
                // L, M, N against the unnormalized normal: divide by |n|² once
                let (l, mm, nn) = (dot(&v.qq, &n), dot(&v.qp, &n), dot(&v.pp, &n));
                out.push((i, j, (l * nn - mm * mm) / (area2 * (e * g - f * f))));
            }
        }
        Ok(out)
    }
}

struct Jet {
    q: [f64; 3],
    p: [f64; 3],
    qq: [f64; 3],
    qp: [f64; 3],
    pp: [f64; 3],
}

/// Row `d_k` of the trigonometric differentiation matrix on `m` equispaced
/// nodes of the circle: `f′(φ_j) ≈ Σ_k d_k f(φ_{j+k})`. Exact on
/// trigonometric polynomials of degree below `m/2`.
fn periodic_derivative_row(m: usize) -> Vec<f64> {
    let h = TAU / m as f64;
    (0..m)
        .map(|k| {
            if k == 0 {
                return 0.0;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let x = 0.5 * k as f64 * h;
            // the row multiplies f(φ_{j+k}), hence the leading minus
            if m % 2 == 0 {
                -0.5 * sign / x.tan()
            } else {
                -0.5 * sign / x.sin()
            }
        })
        .collect()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Largest componentwise deviation of the FD first fundamental form from
/// `(ρ² + e)²dρ² + ρ²dφ²`, compared in the mesh's `(q, φ)` chart, each
/// relative to `max(1, |expected|)`.
pub fn induced_metric_residual(mesh: &RevolutionMesh) -> Result<f64> {
    let beta = mesh.family.beta();
    induced_metric_residual_against(mesh, |rho| [(rho * rho + beta).powi(2), 0.0, rho * rho])
}

/// [`induced_metric_residual`] against an arbitrary metric `ρ ↦ (E, F, G)`
/// given in the `(ρ, φ)` chart.
pub fn induced_metric_residual_against<T: Fn(f64) -> [f64; 3]>(mesh: &RevolutionMesh, target: T) -> Result<f64> {
    let forms = mesh.first_fundamental_form()?;
    let m = mesh.nphi();
    let mut worst: f64 = 0.0;
    for (k, got) in forms.iter().enumerate() {
        let i = k / m;
        let [e, f, g] = target(mesh.rho[i]);
        let jac = mesh.radial.jacobian(mesh.q[i]);
        let want = [e * jac * jac, f * jac, g];
        for c in 0..3 {
            worst = worst.max((got[c] - want[c]).abs() / want[c].abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Build the mesh, then write it in one piece: a domain error leaves no file.
pub fn emit_mesh(family: MeshFamily, rho_range: (f64, f64), nr: usize, nphi: usize, path: &Path) -> Result<RevolutionMesh> {
    let mesh = RevolutionMesh::build(family, rho_range, nr, nphi)?;
    let mut buf = Vec::new();
    mesh.write(&mut buf)?;
    std::fs::write(path, buf)?;
    Ok(mesh)
}

/// Default `ρ` ranges: the figure ranges for `ε = ±1` and the negative
/// branch, and a start just past the branch point for `ε = 0`.
pub fn default_range(family: MeshFamily) -> (f64, f64) {
    match family {
        MeshFamily::G2(Epsilon::Plus) => (0.0, 2.0),
        MeshFamily::G2(Epsilon::Zero) => (1.1, 3.0),
        MeshFamily::G2(Epsilon::Minus) => (1.5, 3.0),
        MeshFamily::NegativeCurvature => (0.5, 2.0),
    }
}
