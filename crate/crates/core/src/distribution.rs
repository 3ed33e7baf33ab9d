//! The rolling distribution on the configuration space and its brackets.
//!
//! Points are `(x, y, u, v, φ)`: chart coordinates on Σ₁, on Σ₂ and the
//! angle of the rotation `A_φ` between the tangent planes. The distribution
//! is spanned by
//!
//! ```text
//! X̃₁ = e₁ + cosφ e₃ + sinφ e₄ + (−a₁ + a₃cosφ + a₄sinφ) ∂φ
//! X̃₂ = e₂ − sinφ e₃ + cosφ e₄ + (−a₂ + a₄cosφ − a₃sinφ) ∂φ
//! ```
//!
//! which is also the horizontal lift of the selfdual null plane at angle φ
//! for the split metric `g₁ ⊕ (−g₂)`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Matrix5};

use crate::fd::{check_step, richardson_derivative};
use crate::split4::{horizontal_corrections, levi_civita_from_structure, StructureFunctions};
use crate::surfaces::{SurfaceFamily, SurfaceJet, Warp};
use crate::{Error, Result};

pub type Vec5 = [f64; 5];

/// Relative threshold for `|κ − λ|` below which the distribution is treated
/// as integrable at a point.
pub const INTEGRABLE_TOL: f64 = 1e-10;

/// Singular values above `RANK_THRESHOLD × σ_max` count towards the rank.
pub const RANK_THRESHOLD: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfigPoint {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
    pub phi: f64,
}

impl ConfigPoint {
    /// New point with `φ` reduced to `[0, 2π)`.
    pub fn new(x: f64, y: f64, u: f64, v: f64, phi: f64) -> Self {
        ConfigPoint { x, y, u, v, phi: phi.rem_euclid(TAU) }
    }

    /// Point without reducing `φ`, used for unwrapped trajectories.
    pub fn unreduced(c: Vec5) -> Self {
        ConfigPoint { x: c[0], y: c[1], u: c[2], v: c[3], phi: c[4] }
    }

    pub fn coords(&self) -> Vec5 {
        [self.x, self.y, self.u, self.v, self.phi]
    }

    pub fn sigma1(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn sigma2(&self) -> [f64; 2] {
        [self.u, self.v]
    }

    /// Box size used to scale finite-difference steps.
    pub fn magnitude(&self) -> f64 {
        self.coords().iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl From<Vec5> for ConfigPoint {
    fn from(c: Vec5) -> Self {
        ConfigPoint::new(c[0], c[1], c[2], c[3], c[4])
    }
}

/// A vector field on the configuration chart, in the coordinate basis
/// `(∂x, ∂y, ∂u, ∂v, ∂φ)`.
pub trait VectorField5 {
    fn eval(&self, p: &Vec5) -> Result<Vec5>;
}

impl<F: Fn(&Vec5) -> Result<Vec5>> VectorField5 for F {
    fn eval(&self, p: &Vec5) -> Result<Vec5> {
        self(p)
    }
}

/// Everything pointwise the frame formulas need.
#[derive(Clone, Copy, Debug)]
pub struct PairData {
    pub warp1: Warp,
    pub warp2: Warp,
    pub jet1: SurfaceJet,
    pub jet2: SurfaceJet,
}

impl PairData {
    pub fn kappa(&self) -> f64 {
        self.jet1.kappa
    }

    pub fn lambda(&self) -> f64 {
        self.jet2.kappa
    }

    /// The four frame vectors `e₁…e₄` in chart coordinates.
    pub fn surface_frame(&self) -> [Vec5; 4] {
        [
            [1.0 / self.warp1.w, 0.0, 0.0, 0.0, 0.0],
            [0.0, 1.0 / self.warp1.r, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0 / self.warp2.w, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0 / self.warp2.r, 0.0],
        ]
    }

    /// The dual coframe `σ¹…σ⁴` in the cobasis `(dx, dy, du, dv, dφ)`.
    pub fn surface_coframe(&self) -> [Vec5; 4] {
        [
            [self.warp1.w, 0.0, 0.0, 0.0, 0.0],
            [0.0, self.warp1.r, 0.0, 0.0, 0.0],
            [0.0, 0.0, self.warp2.w, 0.0, 0.0],
            [0.0, 0.0, 0.0, self.warp2.r, 0.0],
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RollingPair {
    pub s1: SurfaceFamily,
    pub s2: SurfaceFamily,
}

fn comb(terms: &[(f64, &Vec5)]) -> Vec5 {
    let mut out = [0.0; 5];
    for (c, v) in terms {
        for i in 0..5 {
            out[i] += c * v[i];
        }
    }
    out
}

impl RollingPair {
    pub fn new(s1: SurfaceFamily, s2: SurfaceFamily) -> Self {
        RollingPair { s1, s2 }
    }

    pub fn data(&self, p: &Vec5) -> Result<PairData> {
        let (a, b) = ([p[0], p[1]], [p[2], p[3]]);
        if !p[4].is_finite() {
            return Err(Error::domain("non-finite rotation angle"));
        }
        Ok(PairData {
            warp1: self.s1.warp(a)?,
            warp2: self.s2.warp(b)?,
            jet1: self.s1.jet_at(a)?,
            jet2: self.s2.jet_at(b)?,
        })
    }

    /// `(X̃₁, X̃₂)` at `p`.
    pub fn velocity_fields(&self, p: &Vec5) -> Result<[Vec5; 2]> {
        let d = self.data(p)?;
        let (s, c) = p[4].sin_cos();
        let (a1, a2, a3, a4) = (d.jet1.a1, d.jet1.a2, d.jet2.a1, d.jet2.a2);
        let z1 = -a1 + a3 * c + a4 * s;
        let z2 = -a2 + a4 * c - a3 * s;
        Ok(Self::assemble(&d, s, c, z1, z2))
    }

    /// The same fields built as twistor lifts: Levi-Civita connection of the
    /// product frame, horizontal corrections of the null plane at angle `φ`.
    pub fn velocity_fields_via_lift(&self, p: &Vec5) -> Result<[Vec5; 2]> {
        let d = self.data(p)?;
        let c4 = StructureFunctions::product_surfaces(d.jet1.a1, d.jet1.a2, d.jet2.a1, d.jet2.a2);
        let gamma = levi_civita_from_structure(&c4);
        let (z1, z2) = horizontal_corrections(&gamma, p[4]);
        let (s, c) = p[4].sin_cos();
        Ok(Self::assemble(&d, s, c, z1, z2))
    }

    fn assemble(d: &PairData, s: f64, c: f64, z1: f64, z2: f64) -> [Vec5; 2] {
        let e = d.surface_frame();
        let mut x1 = comb(&[(1.0, &e[0]), (c, &e[2]), (s, &e[3])]);
        let mut x2 = comb(&[(1.0, &e[1]), (-s, &e[2]), (c, &e[3])]);
        x1[4] = z1;
        x2[4] = z2;
        [x1, x2]
    }

    pub fn x1(&self) -> impl Fn(&Vec5) -> Result<Vec5> + '_ {
        move |p| Ok(self.velocity_fields(p)?[0])
    }

    pub fn x2(&self) -> impl Fn(&Vec5) -> Result<Vec5> + '_ {
        move |p| Ok(self.velocity_fields(p)?[1])
    }

    /// Closed-form field `X̃_i` (1-based, `i ≤ 5`) of [`derived_frame`].
    pub fn frame_field(&self, i: usize) -> impl Fn(&Vec5) -> Result<Vec5> + '_ {
        assert!((1..=5).contains(&i), "frame index must be in 1..=5");
        move |p| Ok(derived_frame(self, p)?.fields[i - 1])
    }

    /// Errors when the two curvatures agree at `p`.
    pub fn check_nonintegrable(&self, d: &PairData) -> Result<f64> {
        let gap = d.lambda() - d.kappa();
        let scale = 1f64.max(d.kappa().abs()).max(d.lambda().abs());
        if gap.abs() <= INTEGRABLE_TOL * scale {
            return Err(Error::Integrable { gap: gap.abs() });
        }
        Ok(gap)
    }
}

/// Default bracket step `1e−5 × (1 + |p|)`.
pub fn default_bracket_step(p: &Vec5) -> f64 {
    1e-5 * (1.0 + ConfigPoint::unreduced(*p).magnitude())
}

/// `[F, G] = (DG)F − (DF)G` with directional derivatives by central
/// differences at steps `h` and `h/2`, one Richardson level.
pub fn lie_bracket<F, G>(f: &F, g: &G, p: &Vec5, h: f64) -> Result<Vec5>
where
    F: VectorField5 + ?Sized,
    G: VectorField5 + ?Sized,
{
    check_step(h, ConfigPoint::unreduced(*p).magnitude())?;
    let fp = f.eval(p)?;
    let gp = g.eval(p)?;
    let along = |dir: Vec5, field: &dyn VectorField5| {
        richardson_derivative(|t| field.eval(&std::array::from_fn(|i| p[i] + t * dir[i])), h)
    };
    let dg_f = along(fp, &|q: &Vec5| g.eval(q))?;
    let df_g = along(gp, &|q: &Vec5| f.eval(q))?;
    Ok(std::array::from_fn(|i| dg_f[i] - df_g[i]))
}

/// Pointwise values of the derived frame `X̃₁ … X̃₅`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame5 {
    pub fields: [Vec5; 5],
    pub a1: f64,
    pub a2: f64,
}

impl Frame5 {
    /// Columns are the fields.
    pub fn matrix(&self) -> Matrix5<f64> {
        Matrix5::from_fn(|i, j| self.fields[j][i])
    }

    pub fn det(&self) -> f64 {
        self.matrix().determinant()
    }

    /// The frame `X̃₄ − a₂X̃₃`, `X̃₅ + a₁X̃₃` in place of the brackets
    /// `[X̃₁,X̃₃]`, `[X̃₂,X̃₃]`. The ω coframe of the conformal oracle is dual
    /// to this one.
    pub fn cartan_adapted(&self) -> Frame5 {
        let f = &self.fields;
        let x4 = comb(&[(1.0, &f[3]), (-self.a2, &f[2])]);
        let x5 = comb(&[(1.0, &f[4]), (self.a1, &f[2])]);
        Frame5 { fields: [f[0], f[1], f[2], x4, x5], ..*self }
    }
}

/// Closed-form `X̃₃ = [X̃₁,X̃₂]`, `X̃₄ = [X̃₁,X̃₃]`, `X̃₅ = [X̃₂,X̃₃]` in terms
/// of the jets. Σ₁ and Σ₂ frames are Killing-adapted, so `a₁₁ = a₁₂ = 0`,
/// `a₂₂ = 0`, `κ₂ = 0` and likewise `λ₄ = 0` on Σ₂.
pub fn derived_frame(pair: &RollingPair, p: &Vec5) -> Result<Frame5> {
    let d = pair.data(p)?;
    let lk = pair.check_nonintegrable(&d)?;
    let [x1, x2] = pair.velocity_fields(p)?;
    let e = d.surface_frame();
    let (s, c) = p[4].sin_cos();
    let j1 = &d.jet1;
    let j2 = &d.jet2;
    let (a1, a2, a3, a4) = (j1.a1, j1.a2, j2.a1, j2.a2);
    let (a11, a12, a21, a22) = (0.0, 0.0, j1.a21(), 0.0);
    let (k1, k2) = (j1.k1, 0.0);
    let (l3, l4) = (j2.k1, 0.0);

    let mut x3 = comb(&[(a1, &x1), (a2, &x2)]);
    x3[4] += lk;

    let g4 = k1 / lk - (a3 + l4 / lk) * s + (a4 - l3 / lk) * c;
    let x4 = comb(&[
        (a11 + a1 * g4, &x1),
        (a21 + a2 * g4, &x2),
        (a2 - g4, &x3),
        (lk * s, &e[2]),
        (-lk * c, &e[3]),
    ]);
    let g5 = k2 / lk - (a4 - l3 / lk) * s - (a3 + l4 / lk) * c;
    let x5 = comb(&[
        (a12 + a1 * g5, &x1),
        (a22 + a2 * g5, &x2),
        (-a1 - g5, &x3),
        (lk * c, &e[2]),
        (lk * s, &e[3]),
    ]);
    Ok(Frame5 { fields: [x1, x2, x3, x4, x5], a1, a2 })
}

/// Growth vector of the distribution at `p`: ranks of `{X̃₁,X̃₂}`, then with
/// `[X̃₁,X̃₂]`, then with both double brackets. All brackets are numerical.
pub fn growth_vector(pair: &RollingPair, p: &Vec5) -> Result<[usize; 3]> {
    growth_vector_with_step(pair, p, growth_step(p))
}

/// Outer step for the nested brackets: `4e−4 × (1 + |p|)`; the inner
/// bracket runs at a quarter of it. Both truncations stay near `1e−12` and
/// the rounding of the inner difference, amplified by the outer one, near
/// `1e−10`, so a bracket that lies in the span shows up as a singular value
/// ratio below `1e−9`, well clear of the rank guard band.
pub fn growth_step(p: &Vec5) -> f64 {
    4e-4 * (1.0 + ConfigPoint::unreduced(*p).magnitude())
}

/// [`growth_vector`] with outer step `h` and inner step `h/4`.
pub fn growth_vector_with_step(pair: &RollingPair, p: &Vec5, h: f64) -> Result<[usize; 3]> {
    let f1 = pair.x1();
    let f2 = pair.x2();
    let x12 = |q: &Vec5| lie_bracket(&f1, &f2, q, 0.25 * h);
    let [v1, v2] = pair.velocity_fields(p)?;
    let v3 = x12(p)?;
    let v4 = lie_bracket(&f1, &x12, p, h)?;
    let v5 = lie_bracket(&f2, &x12, p, h)?;
    let r1 = numeric_rank(&[v1, v2])?;
    let r2 = numeric_rank(&[v1, v2, v3])?;
    let r3 = numeric_rank(&[v1, v2, v3, v4, v5])?;
    Ok([r1, r2, r3])
}

/// Rank by singular-value thresholding at [`RANK_THRESHOLD`]. Errors if a
/// singular value falls within a decade of the threshold on either side.
pub fn numeric_rank(vectors: &[Vec5]) -> Result<usize> {
    let m = DMatrix::from_fn(5, vectors.len(), |i, j| vectors[j][i]);
    let sv = m.singular_values();
    let smax = sv.iter().fold(0.0_f64, |a, &b| a.max(b));
    if smax == 0.0 {
        return Ok(0);
    }
    let mut rank = 0;
    for &s in sv.iter() {
        let ratio = s / smax;
        if ratio > 0.1 * RANK_THRESHOLD && ratio < 10.0 * RANK_THRESHOLD {
            return Err(Error::IllConditionedRank { ratio, threshold: RANK_THRESHOLD });
        }
        if ratio > RANK_THRESHOLD {
            rank += 1;
        }
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::Epsilon;
    use std::f64::consts::FRAC_PI_2;

    fn sphere_on_plane() -> RollingPair {
        RollingPair::new(SurfaceFamily::Sphere { radius: 1.0 }, SurfaceFamily::Plane)
    }

    #[test]
    fn flat_pair_fields() {
        let pair = RollingPair::new(SurfaceFamily::Plane, SurfaceFamily::Plane);
        let phi = 0.7f64;
        let [x1, x2] = pair.velocity_fields(&[0.1, 0.2, 0.3, 0.4, phi]).unwrap();
        assert_eq!(x1, [1.0, 0.0, phi.cos(), phi.sin(), 0.0]);
        assert_eq!(x2, [0.0, 1.0, -phi.sin(), phi.cos(), 0.0]);
    }

    #[test]
    fn sphere_equator_has_no_phi_component() {
        let [x1, _] = sphere_on_plane().velocity_fields(&[FRAC_PI_2, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(x1[4], 0.0);
    }

    #[test]
    fn coordinate_fields_commute() {
        let dx = |_: &Vec5| Ok([1.0, 0.0, 0.0, 0.0, 0.0]);
        let dy = |_: &Vec5| Ok([0.0, 1.0, 0.0, 0.0, 0.0]);
        let b = lie_bracket(&dx, &dy, &[0.0; 5], 1e-5).unwrap();
        assert_eq!(b, [0.0; 5]);
        assert!(lie_bracket(&dx, &dy, &[0.0; 5], 1e-300).is_err());
    }

    #[test]
    fn x3_of_sphere_on_plane() {
        let pair = sphere_on_plane();
        let p = [1.1, 0.4, 0.3, -0.2, 2.0];
        let b = lie_bracket(&pair.x1(), &pair.x2(), &p, default_bracket_step(&p)).unwrap();
        let f = derived_frame(&pair, &p).unwrap();
        assert!((b[4] - f.fields[2][4]).abs() < 1e-6);
        for i in 0..5 {
            assert!((b[i] - f.fields[2][i]).abs() < 1e-6, "{i}: {} vs {}", b[i], f.fields[2][i]);
        }
        // ∂φ part of X̃₃ is a₂z₂ + (λ − κ); the λ − κ = −1 piece
        let [_, x2] = pair.velocity_fields(&p).unwrap();
        assert!((f.fields[2][4] - f.a2 * x2[4] + 1.0).abs() < 1e-14);
        assert!(f.det().abs() > 1e-3);
    }

    #[test]
    fn integrable_point_is_an_error() {
        let pair = RollingPair::new(SurfaceFamily::Sphere { radius: 1.0 }, SurfaceFamily::Sphere { radius: 1.0 });
        assert!(matches!(derived_frame(&pair, &[1.0, 0.0, 1.0, 0.0, 0.0]), Err(Error::Integrable { .. })));
    }

    #[test]
    fn growth_vectors() {
        let cases = [
            (sphere_on_plane(), [2, 3, 5]),
            (RollingPair::new(SurfaceFamily::Plane, SurfaceFamily::Plane), [2, 2, 2]),
            (RollingPair::new(SurfaceFamily::Sphere { radius: 1.0 }, SurfaceFamily::Sphere { radius: 1.0 }), [2, 2, 2]),
            (RollingPair::new(SurfaceFamily::Sphere { radius: 1.0 }, SurfaceFamily::Sphere { radius: 2.0 }), [2, 3, 5]),
            (RollingPair::new(SurfaceFamily::g2(Epsilon::Plus), SurfaceFamily::Plane), [2, 3, 5]),
        ];
        for (pair, expected) in cases {
            let p = [1.2, 0.5, 0.9, 0.3, 4.0];
            assert_eq!(growth_vector(&pair, &p).unwrap(), expected, "{pair:?}");
        }
    }

    #[test]
    fn ill_conditioned_rank_is_reported() {
        let a = [1.0, 0.0, 0.0, 0.0, 0.0];
        let b = [1.0, 1e-7, 0.0, 0.0, 0.0];
        assert!(matches!(numeric_rank(&[a, b]), Err(Error::IllConditionedRank { .. })));
        assert_eq!(numeric_rank(&[a, [0.0, 1.0, 0.0, 0.0, 0.0]]).unwrap(), 2);
    }
}
