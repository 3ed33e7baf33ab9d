//! Linear algebra of ℝ⁴ with the split metric `y₁² + y₂² − y₃² − y₄²`.
//!
//! Bivectors use the fixed ordered basis
//! `(e₁∧e₂, e₁∧e₃, e₁∧e₄, e₂∧e₃, e₂∧e₄, e₃∧e₄)`, which turns the Hodge star into
//! a constant signed permutation. Frame indices are 0-based in code: `Γ[i][j][k]`
//! is `Γ^{i+1}_{(j+1)(k+1)}`.

use std::ops::{Add, Mul, Sub};

/// Diagonal of the split metric in the orthonormal frame.
pub const SPLIT_METRIC: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

/// Index pairs of the bivector basis, in storage order.
pub const BIVECTOR_BASIS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector4(pub [f64; 4]);

impl Vector4 {
    pub fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        Vector4([c1, c2, c3, c4])
    }

    /// Split inner product `g(a, b)`.
    pub fn dot(&self, other: &Vector4) -> f64 {
        (0..4).map(|i| SPLIT_METRIC[i] * self.0[i] * other.0[i]).sum()
    }

    /// `g(v, v)`; may be negative.
    pub fn norm(&self) -> f64 {
        self.dot(self)
    }

    pub fn is_null(&self, tol: f64) -> bool {
        self.norm().abs() <= tol
    }

    pub fn wedge(&self, other: &Vector4) -> Bivector {
        let (a, b) = (self.0, other.0);
        let mut out = [0.0; 6];
        for (slot, &(i, j)) in BIVECTOR_BASIS.iter().enumerate() {
            out[slot] = a[i] * b[j] - a[j] * b[i];
        }
        Bivector(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Bivector(pub [f64; 6]);

impl Bivector {
    pub const ZERO: Bivector = Bivector([0.0; 6]);

    /// Basis bivector `e_{i+1} ∧ e_{j+1}` for `i < j` (0-based).
    pub fn basis(i: usize, j: usize) -> Self {
        let slot = BIVECTOR_BASIS
            .iter()
            .position(|&p| p == (i, j))
            .expect("basis bivector needs i < j < 4");
        let mut out = [0.0; 6];
        out[slot] = 1.0;
        Bivector(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

impl Add for Bivector {
    type Output = Bivector;
    fn add(self, rhs: Bivector) -> Bivector {
        Bivector(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Bivector {
    type Output = Bivector;
    fn sub(self, rhs: Bivector) -> Bivector {
        Bivector(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<Bivector> for f64 {
    type Output = Bivector;
    fn mul(self, rhs: Bivector) -> Bivector {
        Bivector(rhs.0.map(|x| self * x))
    }
}

/// Hodge star on bivectors:
/// `*(e₁∧e₂) = e₃∧e₄`, `*(e₁∧e₃) = e₂∧e₄`, `*(e₁∧e₄) = −e₂∧e₃` and their inverses.
pub fn hodge_star(b: &Bivector) -> Bivector {
    let [b12, b13, b14, b23, b24, b34] = b.0;
    Bivector([b34, b24, -b23, -b14, b13, b12])
}

/// Splits `b` into its selfdual and antiselfdual parts `½(1 ± *)b`.
pub fn selfdual_split(b: &Bivector) -> (Bivector, Bivector) {
    let s = hodge_star(b);
    (0.5 * (*b + s), 0.5 * (*b - s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Duality {
    SelfDual,
    AntiSelfDual,
}

impl Duality {
    pub fn eigenvalue(self) -> f64 {
        match self {
            Duality::SelfDual => 1.0,
            Duality::AntiSelfDual => -1.0,
        }
    }
}

/// A real totally null 2-plane, parametrized as the graph of a rotation
/// (selfdual) or of a reflection (antiselfdual) `ℝ² → ℝ²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullPlane {
    angle: f64,
    duality: Duality,
}

impl NullPlane {
    pub fn new(angle: f64, duality: Duality) -> Self {
        NullPlane {
            angle: angle.rem_euclid(std::f64::consts::TAU),
            duality,
        }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn duality(&self) -> Duality {
        self.duality
    }

    pub fn span(&self) -> (Vector4, Vector4) {
        let (s, c) = self.angle.sin_cos();
        match self.duality {
            Duality::SelfDual => null_plane_span(self.angle),
            Duality::AntiSelfDual => (Vector4::new(1.0, 0.0, c, s), Vector4::new(0.0, 1.0, s, -c)),
        }
    }

    pub fn bivector(&self) -> Bivector {
        let (a, b) = self.span();
        a.wedge(&b)
    }
}

/// Spanning pair of the selfdual null plane at fiber angle `φ`: the graph of
/// the rotation `A_φ`, `X₁ = (1, 0, cos φ, sin φ)`, `X₂ = (0, 1, −sin φ, cos φ)`.
pub fn null_plane_span(phi: f64) -> (Vector4, Vector4) {
    let (s, c) = phi.sin_cos();
    (Vector4::new(1.0, 0.0, c, s), Vector4::new(0.0, 1.0, -s, c))
}

/// Structure functions of a frame: `[e_i, e_j] = c[k][i][j] e_k`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct StructureFunctions(pub [[[f64; 4]; 4]; 4]);

impl StructureFunctions {
    /// Product frame of two surfaces with `[e₁,e₂] = a₁e₁ + a₂e₂` and
    /// `[e₃,e₄] = a₃e₃ + a₄e₄`, all cross brackets zero.
    pub fn product_surfaces(a1: f64, a2: f64, a3: f64, a4: f64) -> Self {
        let mut c = [[[0.0; 4]; 4]; 4];
        c[0][0][1] = a1;
        c[0][1][0] = -a1;
        c[1][0][1] = a2;
        c[1][1][0] = -a2;
        c[2][2][3] = a3;
        c[2][3][2] = -a3;
        c[3][2][3] = a4;
        c[3][3][2] = -a4;
        StructureFunctions(c)
    }

    /// Largest violation of `c[k][i][j] = −c[k][j][i]`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let c = &self.0;
        let mut worst = 0.0_f64;
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    worst = worst.max((c[k][i][j] + c[k][j][i]).abs());
                }
            }
        }
        worst
    }
}

/// Connection coefficients in an orthonormal frame, `∇_{e_k} e_j = Γ[i][j][k] e_i`,
/// so that the connection 1-forms are `Γ^i_j = Γ^i_{jk} σ^k`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ConnectionCoeffs(pub [[[f64; 4]; 4]; 4]);

impl ConnectionCoeffs {
    /// 1-based accessor matching the usual `Γ^i_{jk}` notation.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.0[i - 1][j - 1][k - 1]
    }

    /// Largest violation of `g_im Γ^m_jk + g_jm Γ^m_ik = 0`.
    pub fn metric_defect(&self, diag: &[f64; 4]) -> f64 {
        let g = &self.0;
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    worst = worst.max((diag[i] * g[i][j][k] + diag[j] * g[j][i][k]).abs());
                }
            }
        }
        worst
    }
}

/// Levi-Civita connection of an orthonormal frame with the split metric.
pub fn levi_civita_from_structure(c: &StructureFunctions) -> ConnectionCoeffs {
    levi_civita_with_metric(c, &SPLIT_METRIC)
}

/// Koszul formula in an orthonormal frame with metric `diag`:
/// lowering `C_{iab} = g_ii c^i_ab`, `Γ_{ijk} = −½(C_{ijk} + C_{jki} − C_{kij})`.
pub fn levi_civita_with_metric(c: &StructureFunctions, diag: &[f64; 4]) -> ConnectionCoeffs {
    let low = |i: usize, a: usize, b: usize| diag[i] * c.0[i][a][b];
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let lowered = -0.5 * (low(i, j, k) + low(j, k, i) - low(k, i, j));
                gamma[i][j][k] = lowered / diag[i];
            }
        }
    }
    ConnectionCoeffs(gamma)
}

/// Horizontal corrections `z₁, z₂` of the twistor lift at fiber angle `φ`,
/// expanded as trigonometric polynomials in `φ`.
pub fn horizontal_corrections(g: &ConnectionCoeffs, phi: f64) -> (f64, f64) {
    let (s, c) = phi.sin_cos();
    let q = |i, j, k| g.get(i, j, k);
    let z1 = q(3, 4, 1) - q(1, 2, 1)
        + c * (q(3, 4, 3) - q(2, 3, 1) + q(1, 4, 1) - q(1, 2, 3))
        + s * (q(3, 4, 4) + q(2, 4, 1) + q(1, 3, 1) - q(1, 2, 4))
        + c * c * (q(1, 4, 3) - q(2, 3, 3))
        + c * s * (q(2, 4, 3) - q(2, 3, 4) + q(1, 4, 4) + q(1, 3, 3))
        + s * s * (q(1, 3, 4) + q(2, 4, 4));
    let z2 = q(3, 4, 2) - q(1, 2, 2)
        + c * (q(3, 4, 4) - q(2, 3, 2) + q(1, 4, 2) - q(1, 2, 4))
        + s * (-q(3, 4, 3) + q(2, 4, 2) + q(1, 3, 2) + q(1, 2, 3))
        + c * c * (q(1, 4, 4) - q(2, 3, 4))
        + c * s * (q(2, 4, 4) + q(2, 3, 3) - q(1, 4, 3) + q(1, 3, 4))
        - s * s * (q(1, 3, 3) + q(2, 4, 3));
    (z1, z2)
}

/// `∂_φ` coefficient of the horizontal lift of frame vector `e_i` (1-based `i`).
pub fn twistor_lift_coefficient(g: &ConnectionCoeffs, i: usize, phi: f64) -> f64 {
    assert!((1..=4).contains(&i), "frame index must be in 1..=4");
    let (s, c) = phi.sin_cos();
    g.get(3, 4, i) - g.get(1, 2, i)
        + (g.get(1, 4, i) - g.get(2, 3, i)) * c
        + (g.get(1, 3, i) + g.get(2, 4, i)) * s
}
