//! Cartan's quartic for a surface with a Killing field rolling on a surface
//! of constant curvature.
//!
//! The quartic is `C(ζ) = A₁ + 4A₂ζ + 6A₃ζ² + 4A₄ζ³ + A₅ζ⁴`, defined up to
//! a nonvanishing factor. All five coefficients vanish identically iff the
//! distribution has G₂ symmetry.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::distribution::{RollingPair, INTEGRABLE_TOL};
use crate::surfaces::{SurfaceFamily, SurfaceJet};
use crate::{Error, Result};

/// Default vanishing threshold relative to [`curvature_scale`].
pub const ZERO_TOL: f64 = 1e-8;

/// Two roots closer than `CLUSTER_RADIUS × (1 + |z|)` are one root.
pub const CLUSTER_RADIUS: f64 = 1e-6;

/// Pointwise scale for the A_i: `(κ−λ)⁴ · max(κ², λ², 1)`.
pub fn curvature_scale(kappa: f64, lambda: f64) -> f64 {
    (kappa - lambda).powi(4) * (kappa * kappa).max(lambda * lambda).max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartanQuartic {
    pub coeffs: [f64; 5],
    /// Magnitude the coefficients are judged against.
    pub scale: f64,
    /// Relative vanishing threshold.
    pub zero_tol: f64,
}

impl CartanQuartic {
    /// Quartic with unit scale and the default threshold.
    pub fn new(coeffs: [f64; 5]) -> Self {
        CartanQuartic { coeffs, scale: 1.0, zero_tol: ZERO_TOL }
    }

    pub fn with_scale(coeffs: [f64; 5], scale: f64) -> Self {
        CartanQuartic { coeffs, scale, zero_tol: ZERO_TOL }
    }

    pub fn with_tolerance(mut self, zero_tol: f64) -> Self {
        self.zero_tol = zero_tol;
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `max_i |A_i| / scale`.
    pub fn scaled_max(&self) -> f64 {
        self.max_abs() / self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.scaled_max() <= self.zero_tol
    }

    /// Coefficients of `1, ζ, …, ζ⁴` after the binomial weights.
    pub fn polynomial(&self) -> [f64; 5] {
        let [a1, a2, a3, a4, a5] = self.coeffs;
        [a1, 4.0 * a2, 6.0 * a3, 4.0 * a4, a5]
    }

    /// Proportionality test: every minor `A_iB_j − A_jB_i` is below
    /// `tol · |A|·|B|`, or both quartics are zero.
    pub fn proportional_to(&self, other: &CartanQuartic, tol: f64) -> bool {
        if self.is_zero() && other.is_zero() {
            return true;
        }
        if self.is_zero() != other.is_zero() {
            return false;
        }
        projective_residual(&self.coeffs, &other.coeffs) <= tol
    }
}

/// Largest 2×2 minor `|A_iB_j − A_jB_i|`, divided by `max|A| · max|B|`.
pub fn projective_residual(a: &[f64; 5], b: &[f64; 5]) -> f64 {
    let na = a.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let nb = b.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if na == 0.0 || nb == 0.0 {
        return if na == nb { 0.0 } else { f64::INFINITY };
    }
    let mut worst = 0.0_f64;
    for i in 0..5 {
        for j in i + 1..5 {
            worst = worst.max((a[i] * b[j] - a[j] * b[i]).abs());
        }
    }
    worst / (na * nb)
}

/// Closed-form coefficients for a Killing-frame jet on Σ₁ and constant
/// curvature `lambda` on Σ₂.
pub fn quartic_killing_case(jet: &SurfaceJet, lambda: f64) -> Result<CartanQuartic> {
    if !jet.killing || jet.a1 != 0.0 {
        return Err(Error::invalid("the closed-form quartic needs a Killing-adapted jet (a₁ = 0)"));
    }
    let (k, l, a) = (jet.kappa, lambda, jet.a2);
    let d = k - l;
    if d.abs() <= INTEGRABLE_TOL * 1f64.max(k.abs()).max(l.abs()) {
        return Err(Error::Integrable { gap: d.abs() });
    }
    let (k1, k11, k111, k1111) = (jet.k1, jet.k11, jet.k111, jet.k1111);
    let (d2, d3) = (d * d, d * d * d);
    let d4 = d2 * d2;
    let c9 = (k - 9.0 * l) * (9.0 * k - l);
    let a1 = 10.0 * d3 * k1111 - 70.0 * d2 * k111 * k1 - 49.0 * d2 * k11 * k11
        + 280.0 * d * k1 * k1 * k11
        + 8.0 * d3 * (2.0 * k + 7.0 * l) * k11
        - 20.0 * d2 * (k + 6.0 * l) * k1 * k1
        - 175.0 * k1.powi(4)
        + d4 * c9;
    let a3 = a1 - 10.0 * d3 * a * k111 + 154.0 / 3.0 * d2 * a * k11 * k1
        - 20.0 * d3 * a * a * k11
        - 4.0 / 3.0 * d3 * (3.0 * k - 7.0 * l) * k11
        - 140.0 / 3.0 * d * a * k1.powi(3)
        + 5.0 / 3.0 * d2 * (21.0 * a * a + 4.0 * k - 11.0 * l) * k1 * k1
        - 4.0 / 3.0 * d3 * (15.0 * a * a + 12.0 * k + 7.0 * l) * a * k1
        + d4 * c9 / 3.0;
    let a4 = -2.0 * a1 + 3.0 * a3;
    let a5 = -5.0 * a1 + 6.0 * a3 + 30.0 * d3 * a * a * k11 - 49.0 * d2 * a * a * k1 * k1
        + 2.0 * d3 * (15.0 * a * a - 3.0 * k - 28.0 * l) * a * k1
        + d4 * c9;
    Ok(CartanQuartic::with_scale([a1, a1, a3, a4, a5], curvature_scale(k, l)))
}

/// Constant curvatures: `C(ζ) = A₁(1 + 2ζ + 2ζ²)²` with
/// `A₁ = (κ−λ)⁴(κ−9λ)(9κ−λ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantQuartic {
    pub quartic: CartanQuartic,
    pub leading: f64,
}

/// `(A₁,…,A₅)` of `(1+2ζ+2ζ²)² = 1 + 4ζ + 8ζ² + 8ζ³ + 4ζ⁴` against the
/// weights `(1, 4, 6, 4, 1)`.
pub const CONSTANT_PATTERN: [f64; 5] = [1.0, 1.0, 4.0 / 3.0, 2.0, 4.0];

pub fn quartic_constant(kappa: f64, lambda: f64) -> ConstantQuartic {
    let leading = (kappa - lambda).powi(4) * (kappa - 9.0 * lambda) * (9.0 * kappa - lambda);
    let coeffs = CONSTANT_PATTERN.map(|c| c * leading);
    ConstantQuartic { quartic: CartanQuartic::with_scale(coeffs, curvature_scale(kappa, lambda)), leading }
}

/// `(9κ−λ)(κ−9λ)λ`.
pub fn necessary_condition_residual(kappa: f64, lambda: f64) -> f64 {
    (9.0 * kappa - lambda) * (kappa - 9.0 * lambda) * lambda
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RootTag {
    Zero,
    Simple,
    OneDouble,
    TwoDouble,
    Triple,
    Quadruple,
}

impl RootTag {
    fn from_multiplicities(mut m: Vec<usize>) -> RootTag {
        m.sort_unstable_by(|a, b| b.cmp(a));
        match m.as_slice() {
            [4] => RootTag::Quadruple,
            [3, 1] => RootTag::Triple,
            [2, 2] => RootTag::TwoDouble,
            [2, 1, 1] => RootTag::OneDouble,
            _ => RootTag::Simple,
        }
    }
}

impl fmt::Display for RootTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootTag::Zero => "zero",
            RootTag::Simple => "[1,1,1,1]",
            RootTag::OneDouble => "[2,1,1]",
            RootTag::TwoDouble => "[2,2]",
            RootTag::Triple => "[3,1]",
            RootTag::Quadruple => "[4]",
        })
    }
}

/// A root of the quartic; `value` is meaningless when `at_infinity`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuarticRoot {
    pub value: Complex64,
    pub multiplicity: usize,
    pub at_infinity: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootType {
    pub tag: RootTag,
    pub roots: Vec<QuarticRoot>,
}

/// Classifies the roots of `C(ζ)` over ℂ. A vanishing `A₅` (and further
/// leading coefficients) puts roots at infinity.
pub fn root_type(q: &CartanQuartic) -> RootType {
    if q.is_zero() {
        return RootType { tag: RootTag::Zero, roots: Vec::new() };
    }
    let poly = q.polynomial();
    let norm = poly.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let mut degree = 4;
    while degree > 0 && poly[degree].abs() <= 1e-12 * norm {
        degree -= 1;
    }
    let mut roots: Vec<QuarticRoot> = Vec::new();
    if degree < 4 {
        roots.push(QuarticRoot { value: Complex64::new(f64::INFINITY, 0.0), multiplicity: 4 - degree, at_infinity: true });
    }
    if degree > 0 {
        let finite = &poly[..=degree];
        let eig = companion_roots(finite);
        roots.extend(cluster_roots(finite, &eig));
    }
    let tag = RootTag::from_multiplicities(roots.iter().map(|r| r.multiplicity).collect());
    RootType { tag, roots }
}

/// Eigenvalues of the companion matrix of `Σ c_k ζ^k`.
fn companion_roots(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

fn eval_derivative(c: &[f64], z: Complex64, order: usize) -> (Complex64, f64) {
    // value of the derivative and the matching sum of absolute terms
    let mut val = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for (j, &cj) in c.iter().enumerate().skip(order) {
        let falling: f64 = (0..order).map(|i| (j - i) as f64).product();
        let term = z.powu((j - order) as u32) * (cj * falling);
        mag += term.norm();
        val += term;
    }
    (val, mag)
}

fn cluster_roots(c: &[f64], eig: &[Complex64]) -> Vec<QuarticRoot> {
    // single-linkage clusters at the tight radius
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &z in eig {
        let near = groups
            .iter()
            .position(|g| g.iter().any(|w| (z - w).norm() <= CLUSTER_RADIUS * (1.0 + z.norm().max(w.norm()))));
        match near {
            Some(i) => groups[i].push(z),
            None => groups.push(vec![z]),
        }
    }
    // Triple and quadruple roots split by ε^(1/m) under rounding; merge
    // nearby clusters when the derivatives confirm the multiplicity.
    loop {
        let mut merged = false;
        'search: for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let ci = centroid(&groups[i]);
                let cj = centroid(&groups[j]);
                if (ci - cj).norm() > 1e-2 * (1.0 + ci.norm().max(cj.norm())) {
                    continue;
                }
                let mut all = groups[i].clone();
                all.extend(&groups[j]);
                let z = centroid(&all);
                let confirmed = (0..all.len()).all(|k| {
                    let (v, mag) = eval_derivative(c, z, k);
                    v.norm() <= 1e-6 * mag.max(f64::MIN_POSITIVE)
                });
                if confirmed {
                    groups[i] = all;
                    groups.remove(j);
                    merged = true;
                    break 'search;
                }
            }
        }
        if !merged {
            break;
        }
    }
    let mut out: Vec<QuarticRoot> = groups
        .iter()
        .map(|g| {
            let mut z = centroid(g);
            if z.im.abs() <= CLUSTER_RADIUS * (1.0 + z.norm()) {
                z.im = 0.0;
            }
            QuarticRoot { value: z, multiplicity: g.len(), at_infinity: false }
        })
        .collect();
    out.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    out
}

fn centroid(g: &[Complex64]) -> Complex64 {
    g.iter().sum::<Complex64>() / g.len() as f64
}

/// The quartic of a rolling pair at `p`: Σ₂ must have constant curvature.
pub fn quartic_at(pair: &RollingPair, p: &[f64; 5]) -> Result<CartanQuartic> {
    let lambda = pair
        .s2
        .constant_curvature()
        .ok_or_else(|| Error::NotConstantCurvature(pair.s2.to_string()))?;
    pair.s2.warp([p[2], p[3]])?;
    let jet = pair.s1.jet_at([p[0], p[1]])?;
    quartic_killing_case(&jet, lambda)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridRow {
    pub point: [f64; 2],
    pub kappa: f64,
    pub quartic: CartanQuartic,
    pub tag: RootTag,
}

#[derive(Clone, Debug, PartialEq)]
pub struct G2Report {
    pub rows: Vec<GridRow>,
    pub max_scaled: f64,
    pub tol: f64,
}

impl G2Report {
    pub fn is_g2(&self) -> bool {
        self.max_scaled <= self.tol
    }
}

/// Evaluates the quartic of `s1` against constant curvature `lambda` on a
/// grid of Σ₁ chart points; G₂ iff every scaled maximum is below `tol`.
pub fn g2_check(s1: &SurfaceFamily, lambda: f64, grid: &[[f64; 2]], tol: f64) -> Result<G2Report> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let rows = grid.iter().map(|&p| g2_row(s1, lambda, p, tol)).collect::<Result<Vec<_>>>()?;
    Ok(report_from_rows(rows, tol))
}

/// One grid row of [`g2_check`].
pub fn g2_row(s1: &SurfaceFamily, lambda: f64, p: [f64; 2], tol: f64) -> Result<GridRow> {
    let jet = s1.jet_at(p)?;
    let quartic = quartic_killing_case(&jet, lambda)?.with_tolerance(tol);
    Ok(GridRow { point: p, kappa: jet.kappa, quartic, tag: root_type(&quartic).tag })
}

pub fn report_from_rows(rows: Vec<GridRow>, tol: f64) -> G2Report {
    let max_scaled = rows.iter().map(|r| r.quartic.scaled_max()).fold(0.0, f64::max);
    G2Report { rows, max_scaled, tol }
}
