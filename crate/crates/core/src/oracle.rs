//! Independent check of the closed-form quartic through the Weyl tensor of
//! the (3,2)-signature conformal metric of the distribution.
//!
//! The θ coframe is built from the ω coframe (dual to the derived frame),
//! `g̃ = θ¹θ⁵ + θ⁵θ¹ − θ²θ⁴ − θ⁴θ² + ⁴⁄₃θ³θ³`, its curvature is differentiated
//! numerically in the chart, and the Cartan coefficients are the Weyl
//! contractions `A₁ = C(Y₄,Y₁,Y₁,Y₄)`, `A₂ = C(Y₄,Y₁,Y₂,Y₄)`,
//! `A₃ = C(Y₄,Y₁,Y₂,Y₅)`, `A₄ = C(Y₄,Y₂,Y₂,Y₅)`, `A₅ = C(Y₅,Y₂,Y₂,Y₅)` on
//! the frame `Y` dual to θ. They agree with the closed form only up to a
//! nonvanishing factor, so comparisons are projective.
//!
//! Riemann convention: `R^i_jkl = ∂_kΓ^i_lj − ∂_lΓ^i_kj + Γ^i_km Γ^m_lj − Γ^i_lm Γ^m_kj`.

use nalgebra::Matrix5;

use crate::cartan::{projective_residual, CartanQuartic};
use crate::distribution::{PairData, RollingPair, Vec5};
use crate::fd::check_step;
use crate::{Error, Result};

pub use crate::cartan::projective_residual as proportionality_residual;

pub type Coframe5 = Matrix5<f64>;
pub type Metric5 = Matrix5<f64>;
type T4 = [[[[f64; 5]; 5]; 5]; 5];

/// Default FD step per coordinate.
pub const DEFAULT_STEP: f64 = 1e-3;

/// "Zero" means below this many noise floors.
pub const NOISE_FACTOR: f64 = 10.0;

/// `η` of the conformal metric in the θ basis.
pub fn eta() -> Matrix5<f64> {
    let mut m = Matrix5::zeros();
    m[(0, 4)] = 1.0;
    m[(4, 0)] = 1.0;
    m[(1, 3)] = -1.0;
    m[(3, 1)] = -1.0;
    m[(2, 2)] = 4.0 / 3.0;
    m
}

fn killing_data(pair: &RollingPair, p: &Vec5) -> Result<(PairData, f64)> {
    if pair.s2.constant_curvature().is_none() {
        return Err(Error::NotConstantCurvature(pair.s2.to_string()));
    }
    let d = pair.data(p)?;
    let lk = pair.check_nonintegrable(&d)?;
    if !d.jet1.killing {
        return Err(Error::invalid("the conformal coframe needs a Killing-adapted Σ₁ frame"));
    }
    Ok((d, lk))
}

fn add_row(out: &mut Vec5, c: f64, row: &Vec5) {
    for i in 0..5 {
        out[i] += c * row[i];
    }
}

/// Rows `ω₁ … ω₅` in the cobasis `(dx, dy, du, dv, dφ)`; dual to
/// [`crate::Frame5::cartan_adapted`].
pub fn omega_coframe(pair: &RollingPair, p: &Vec5) -> Result<Coframe5> {
    let (d, _) = killing_data(pair, p)?;
    let sig = d.surface_coframe();
    let dphi = [0.0, 0.0, 0.0, 0.0, 1.0];
    let (s, c) = p[4].sin_cos();
    let (k, l, a2, k1) = (d.kappa(), d.lambda(), d.jet1.a2, d.jet1.k1);
    let a4 = d.jet2.a2;
    let km = k - l;
    let km2 = km * km;
    let n = a2 * a2 * k + k * k - a2 * k1 - a2 * a2 * l - k * l;

    let mut w = [[0.0; 5]; 5];
    w[0] = sig[0];
    add_row(&mut w[1], (2.0 * a2 * a2 * k + 2.0 * k * k - a2 * k1 - 2.0 * a2 * a2 * l - 3.0 * k * l + l * l) / km2, &sig[1]);
    add_row(&mut w[1], n * s / km2, &sig[2]);
    add_row(&mut w[1], -(a2 * a4 * km + n * c) / km2, &sig[3]);
    add_row(&mut w[1], a2 / km, &dphi);
    add_row(&mut w[2], (k1 - a2 * km) / km2, &sig[1]);
    add_row(&mut w[2], k1 * s / km2, &sig[2]);
    add_row(&mut w[2], (a4 * km - k1 * c) / km2, &sig[3]);
    add_row(&mut w[2], -1.0 / km, &dphi);
    add_row(&mut w[3], -1.0 / km, &sig[1]);
    add_row(&mut w[3], -s / km, &sig[2]);
    add_row(&mut w[3], c / km, &sig[3]);
    add_row(&mut w[4], 1.0 / km, &sig[0]);
    add_row(&mut w[4], -c / km, &sig[2]);
    add_row(&mut w[4], -s / km, &sig[3]);
    Ok(Matrix5::from_fn(|i, j| w[i][j]))
}

/// Rows `θ¹ … θ⁵` assembled from the ω rows.
pub fn theta_coframe(pair: &RollingPair, p: &Vec5) -> Result<Coframe5> {
    let (d, lk) = killing_data(pair, p)?;
    let w = omega_coframe(pair, p)?;
    let (k, l, a2, k1, k11) = (d.kappa(), d.lambda(), d.jet1.a2, d.jet1.k1, d.jet1.k11);
    let km = -lk;
    let row = |i: usize| w.row(i).into_owned();
    let b = a2 + k1 / lk;
    let c4 = a2 * a2 + 1.6 * k - 1.4 * l + 0.1 * (k11 - a2 * k1) / km - 0.5 * k1 * k1 / (km * km);
    let c5 = a2 * a2 + 1.3 * k - 0.7 * l + 0.1 * k11 / km - 0.5 * k1 * k1 / (km * km);
    let e5 = 0.3 * k - 0.7 * l + 0.1 * a2 * k1 / lk;
    let t1 = row(3) - row(4);
    let t2 = row(4);
    let t3 = -row(2);
    let t4 = -row(0) + row(1) + row(2) * b + row(3) * c4;
    let t5 = -row(1) - row(2) * b - row(3) * c5 + row(4) * e5;
    Ok(Matrix5::from_rows(&[t1, t2, t3, t4, t5]))
}

/// `G = Tᵗ η T` in chart coordinates, symmetrized so that `G = Gᵗ` holds
/// bit for bit.
pub fn metric_components(pair: &RollingPair, p: &Vec5) -> Result<Metric5> {
    let t = theta_coframe(pair, p)?;
    let g = t.transpose() * eta() * t;
    Ok((g + g.transpose()) * 0.5)
}

/// Frame `Y₁ … Y₅` dual to θ: the columns of `T⁻¹`.
pub fn dual_frame(t: &Coframe5) -> Result<Matrix5<f64>> {
    t.try_inverse().ok_or_else(|| Error::domain("θ coframe is singular"))
}

/// Number of positive and negative eigenvalues.
pub fn signature(g: &Metric5) -> (usize, usize) {
    let ev = g.symmetric_eigenvalues();
    let scale = ev.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let pos = ev.iter().filter(|&&e| e > 1e-12 * scale).count();
    let neg = ev.iter().filter(|&&e| e < -1e-12 * scale).count();
    (pos, neg)
}

/// Largest `|g̃(Y_a, Y_b)|` over `a, b ∈ {4, 5}`, relative to `|G|·|Y|²`.
pub fn null_defect(pair: &RollingPair, p: &Vec5) -> Result<f64> {
    let t = theta_coframe(pair, p)?;
    let g = t.transpose() * eta() * t;
    let y = dual_frame(&t)?;
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for a in 3..5 {
        for b in 3..5 {
            let ya = y.column(a);
            let yb = y.column(b);
            worst = worst.max((ya.transpose() * g * yb)[(0, 0)].abs());
            scale = scale.max(g.abs().max() * ya.abs().max() * yb.abs().max());
        }
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureBundle {
    /// `Γ^i_jk` as `christoffel[i][j][k]`.
    pub christoffel: [[[f64; 5]; 5]; 5],
    /// `R_ijkl = g_im R^m_jkl`.
    pub riemann: T4,
    pub ricci: [[f64; 5]; 5],
    pub scalar: f64,
    /// Lowered Weyl tensor.
    pub weyl: T4,
    pub metric: Metric5,
}

/// A curvature bundle at step `h` together with the discrepancy to the
/// bundle at `h/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureEstimate {
    pub bundle: CurvatureBundle,
    pub fine: CurvatureBundle,
    pub weyl_noise: f64,
    pub riemann_noise: f64,
}

impl CurvatureBundle {
    pub fn weyl_norm(&self) -> f64 {
        frobenius(&self.weyl)
    }

    pub fn riemann_norm(&self) -> f64 {
        frobenius(&self.riemann)
    }

    /// Largest violation of `R_ijkl = −R_jikl = −R_ijlk = R_klij`.
    pub fn riemann_symmetry_defect(&self) -> f64 {
        let r = &self.riemann;
        let mut worst = 0.0_f64;
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    for l in 0..5 {
                        let v = r[i][j][k][l];
                        worst = worst.max((v + r[j][i][k][l]).abs()).max((v + r[i][j][l][k]).abs()).max((v - r[k][l][i][j]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest component of the trace `g^ik C_ijkl`.
    pub fn weyl_trace_defect(&self) -> f64 {
        let gi = self.metric.try_inverse().unwrap_or_else(Matrix5::zeros);
        let mut worst = 0.0_f64;
        for j in 0..5 {
            for l in 0..5 {
                let mut t = 0.0;
                for i in 0..5 {
                    for k in 0..5 {
                        t += gi[(i, k)] * self.weyl[i][j][k][l];
                    }
                }
                worst = worst.max(t.abs());
            }
        }
        worst
    }

    /// `C(a, b, c, d)` on four vectors.
    pub fn weyl_on(&self, a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
        contract(&self.weyl, a, b, c, d)
    }
}

fn frobenius(t: &T4) -> f64 {
    t.iter().flatten().flatten().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

fn contract(t: &T4, a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                for l in 0..5 {
                    s += t[i][j][k][l] * a[i] * b[j] * c[k] * d[l];
                }
            }
        }
    }
    s
}

fn t4_diff(a: &T4, b: &T4) -> f64 {
    let mut s = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                for l in 0..5 {
                    s += (a[i][j][k][l] - b[i][j][k][l]).powi(2);
                }
            }
        }
    }
    s.sqrt()
}

struct MetricJet {
    g: Metric5,
    d1: [Matrix5<f64>; 5],
    d2: [[Matrix5<f64>; 5]; 5],
}

/// Central first and second derivatives of `G` at spacing `h`.
fn metric_differences<F>(metric: &F, p: &Vec5, h: f64) -> Result<MetricJet>
where
    F: Fn(&Vec5) -> Result<Metric5>,
{
    let at = |offsets: &[(usize, f64)]| {
        let mut q = *p;
        for &(a, s) in offsets {
            q[a] += s;
        }
        metric(&q)
    };
    let g = metric(p)?;
    let mut d1 = [Matrix5::zeros(); 5];
    let mut d2 = [[Matrix5::zeros(); 5]; 5];
    for a in 0..5 {
        let plus = at(&[(a, h)])?;
        let minus = at(&[(a, -h)])?;
        d1[a] = (plus - minus) / (2.0 * h);
        d2[a][a] = (plus - g * 2.0 + minus) / (h * h);
        for b in 0..a {
            let pp = at(&[(a, h), (b, h)])?;
            let pm = at(&[(a, h), (b, -h)])?;
            let mp = at(&[(a, -h), (b, h)])?;
            let mm = at(&[(a, -h), (b, -h)])?;
            let m = (pp - pm - mp + mm) / (4.0 * h * h);
            d2[a][b] = m;
            d2[b][a] = m;
        }
    }
    Ok(MetricJet { g, d1, d2 })
}

fn richardson_jet<F>(metric: &F, p: &Vec5, h: f64) -> Result<MetricJet>
where
    F: Fn(&Vec5) -> Result<Metric5>,
{
    let coarse = metric_differences(metric, p, h)?;
    let fine = metric_differences(metric, p, 0.5 * h)?;
    let mix = |c: &Matrix5<f64>, f: &Matrix5<f64>| (f * 4.0 - c) / 3.0;
    Ok(MetricJet {
        g: fine.g,
        d1: std::array::from_fn(|a| mix(&coarse.d1[a], &fine.d1[a])),
        d2: std::array::from_fn(|a| std::array::from_fn(|b| mix(&coarse.d2[a][b], &fine.d2[a][b]))),
    })
}

fn bundle_from_jet(j: &MetricJet) -> Result<CurvatureBundle> {
    let n = 5;
    let g = &j.g;
    let gi = g.try_inverse().ok_or_else(|| Error::domain("metric is singular"))?;
    // first kind: Gl[l][j][k] = ½(∂_j g_lk + ∂_k g_lj − ∂_l g_jk)
    let mut gl = [[[0.0; 5]; 5]; 5];
    let mut dgl = [[[[0.0; 5]; 5]; 5]; 5];
    for l in 0..n {
        for jj in 0..n {
            for k in 0..n {
                gl[l][jj][k] = 0.5 * (j.d1[jj][(l, k)] + j.d1[k][(l, jj)] - j.d1[l][(jj, k)]);
                for a in 0..n {
                    dgl[a][l][jj][k] = 0.5 * (j.d2[a][jj][(l, k)] + j.d2[a][k][(l, jj)] - j.d2[a][l][(jj, k)]);
                }
            }
        }
    }
    let dgi: [Matrix5<f64>; 5] = std::array::from_fn(|a| -(gi * j.d1[a] * gi));
    let mut gam = [[[0.0; 5]; 5]; 5];
    let mut dgam = [[[[0.0; 5]; 5]; 5]; 5];
    for i in 0..n {
        for jj in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += gi[(i, l)] * gl[l][jj][k];
                }
                gam[i][jj][k] = s;
                for a in 0..n {
                    let mut t = 0.0;
                    for l in 0..n {
                        t += dgi[a][(i, l)] * gl[l][jj][k] + gi[(i, l)] * dgl[a][l][jj][k];
                    }
                    dgam[a][i][jj][k] = t;
                }
            }
        }
    }
    let mut rup = [[[[0.0; 5]; 5]; 5]; 5];
    for i in 0..n {
        for jj in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = dgam[k][i][l][jj] - dgam[l][i][k][jj];
                    for m in 0..n {
                        v += gam[i][k][m] * gam[m][l][jj] - gam[i][l][m] * gam[m][k][jj];
                    }
                    rup[i][jj][k][l] = v;
                }
            }
        }
    }
    let mut rdn = [[[[0.0; 5]; 5]; 5]; 5];
    let mut ric = [[0.0; 5]; 5];
    for i in 0..n {
        for jj in 0..n {
            for k in 0..n {
                for l in 0..n {
                    rdn[i][jj][k][l] = (0..n).map(|m| g[(i, m)] * rup[m][jj][k][l]).sum();
                }
            }
        }
    }
    for jj in 0..n {
        for l in 0..n {
            ric[jj][l] = (0..n).map(|i| rup[i][jj][i][l]).sum();
        }
    }
    let mut scalar = 0.0;
    for jj in 0..n {
        for l in 0..n {
            scalar += gi[(jj, l)] * ric[jj][l];
        }
    }
    let nf = n as f64;
    let p: [[f64; 5]; 5] =
        std::array::from_fn(|a| std::array::from_fn(|b| (ric[a][b] - scalar / (2.0 * (nf - 1.0)) * g[(a, b)]) / (nf - 2.0)));
    let mut weyl = [[[[0.0; 5]; 5]; 5]; 5];
    for i in 0..n {
        for jj in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let kn = g[(i, k)] * p[jj][l] + g[(jj, l)] * p[i][k] - g[(i, l)] * p[jj][k] - g[(jj, k)] * p[i][l];
                    weyl[i][jj][k][l] = rdn[i][jj][k][l] - kn;
                }
            }
        }
    }
    Ok(CurvatureBundle { christoffel: gam, riemann: rdn, ricci: ric, scalar, weyl, metric: *g })
}

/// Curvature of a metric field at `p`: Richardson-extrapolated central
/// differences at step `h`, repeated at `h/2` for the noise estimate.
pub fn curvature<F>(metric: &F, p: &Vec5, h: f64) -> Result<CurvatureEstimate>
where
    F: Fn(&Vec5) -> Result<Metric5>,
{
    let scale = p.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    check_step(0.5 * h, scale)?;
    let coarse = richardson_jet(metric, p, h)?;
    let fine = richardson_jet(metric, p, 0.5 * h)?;
    // cancellation detector on the raw second derivatives
    let gsize = coarse.g.abs().max();
    let mut disc = 0.0_f64;
    let mut size = 0.0_f64;
    for a in 0..5 {
        for b in 0..5 {
            disc = disc.max((coarse.d2[a][b] - fine.d2[a][b]).abs().max());
            size = size.max(coarse.d2[a][b].abs().max());
        }
    }
    if disc > 1e-3 * (gsize + size) {
        return Err(Error::StepTooSmall { step: h, scale });
    }
    let bundle = bundle_from_jet(&coarse)?;
    let fine = bundle_from_jet(&fine)?;
    let weyl_noise = t4_diff(&bundle.weyl, &fine.weyl);
    let riemann_noise = t4_diff(&bundle.riemann, &fine.riemann);
    Ok(CurvatureEstimate { bundle, fine, weyl_noise, riemann_noise })
}

/// The Weyl-based quartic at a point with its noise estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleQuartic {
    pub quartic: CartanQuartic,
    /// `|A_i(h) − A_i(h/2)|`.
    pub coeff_noise: [f64; 5],
    pub weyl_norm: f64,
    pub weyl_noise: f64,
}

impl OracleQuartic {
    /// All contractions below [`NOISE_FACTOR`] noise floors.
    pub fn coefficients_vanish(&self) -> bool {
        let floor = self.coeff_noise.iter().fold(0.0_f64, |m, c| m.max(*c));
        self.quartic.max_abs() < NOISE_FACTOR * floor
    }

    /// Weyl norm below [`NOISE_FACTOR`] noise floors.
    pub fn conformally_flat(&self) -> bool {
        self.weyl_norm < NOISE_FACTOR * self.weyl_noise
    }
}

fn contractions(b: &CurvatureBundle, y: &Matrix5<f64>) -> [f64; 5] {
    let col = |i: usize| -> Vec5 { std::array::from_fn(|r| y[(r, i)]) };
    let (y1, y2, y4, y5) = (col(0), col(1), col(3), col(4));
    [
        b.weyl_on(&y4, &y1, &y1, &y4),
        b.weyl_on(&y4, &y1, &y2, &y4),
        b.weyl_on(&y4, &y1, &y2, &y5),
        b.weyl_on(&y4, &y2, &y2, &y5),
        b.weyl_on(&y5, &y2, &y2, &y5),
    ]
}

pub fn cartan_from_weyl(pair: &RollingPair, p: &Vec5, h: f64) -> Result<OracleQuartic> {
    let t = theta_coframe(pair, p)?;
    let y = dual_frame(&t)?;
    let metric = |q: &Vec5| metric_components(pair, q);
    let est = curvature(&metric, p, h)?;
    let coarse = contractions(&est.bundle, &y);
    let fine = contractions(&est.fine, &y);
    let scale = coarse.iter().fold(0.0_f64, |m, c| m.max(c.abs())).max(f64::MIN_POSITIVE);
    Ok(OracleQuartic {
        quartic: CartanQuartic::with_scale(coarse, scale),
        coeff_noise: std::array::from_fn(|i| (coarse[i] - fine[i]).abs()),
        weyl_norm: est.bundle.weyl_norm(),
        weyl_noise: est.weyl_noise,
    })
}

/// Proportionality of two quartics: every normalized minor below `tol`,
/// or both zero-tagged.
pub fn compare_projective(qa: &CartanQuartic, qb: &CartanQuartic, tol: f64) -> bool {
    qa.proportional_to(qb, tol)
}

/// Proportionality residual between the oracle and the closed form.
pub fn oracle_residual(oracle: &OracleQuartic, closed: &CartanQuartic) -> f64 {
    projective_residual(&oracle.quartic.coeffs, &closed.coeffs)
}
