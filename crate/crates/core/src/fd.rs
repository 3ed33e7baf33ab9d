//! Finite-difference helpers shared by the bracket, curvature, rolling and
//! mesh code.

use crate::{Error, Result};

/// Central difference of a vector-valued function at `0` with one Richardson
/// level: `(4·D(h/2) − D(h)) / 3`, fourth order in `h`.
pub fn richardson_derivative<const N: usize, F>(mut f: F, h: f64) -> Result<[f64; N]>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let mut central = |step: f64| -> Result<[f64; N]> {
        let plus = f(step)?;
        let minus = f(-step)?;
        Ok(std::array::from_fn(|i| (plus[i] - minus[i]) / (2.0 * step)))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok(std::array::from_fn(|i| (4.0 * fine[i] - coarse[i]) / 3.0))
}

/// Rejects steps that would drown the difference quotient in rounding.
pub fn check_step(h: f64, scale: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) || h < 1e3 * f64::EPSILON * scale.max(1.0) {
        return Err(Error::StepTooSmall { step: h, scale });
    }
    Ok(())
}

/// Fornberg's recursion: weights `w[k][j]` such that
/// `f^{(k)}(z) ≈ Σ_j w[k][j] f(nodes[j])` for `k ≤ max_order`.
pub fn fornberg_weights(z: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Number of samples in the sampled-derivative stencils (sixth order for
/// first derivatives).
pub const STENCIL_POINTS: usize = 7;

/// Derivative of order `order` of uniformly spaced samples, using a
/// `STENCIL_POINTS`-wide window: centred in the interior, shifted one-sided
/// near the ends.
pub fn sampled_derivative(values: &[f64], spacing: f64, order: usize) -> Result<Vec<f64>> {
    sampled_derivative_with(values, spacing, order, STENCIL_POINTS)
}

/// [`sampled_derivative`] with a `points`-wide window for first derivatives.
pub fn sampled_derivative_with(values: &[f64], spacing: f64, order: usize, points: usize) -> Result<Vec<f64>> {
    let n = values.len();
    let width = points + order.saturating_sub(1);
    if n < width {
        return Err(Error::invalid(format!(
            "need at least {width} samples for a derivative of order {order}, got {n}"
        )));
    }
    let half = width / 2;
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; width];
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let start = i.saturating_sub(half).min(n - width);
        let offset = i - start;
        let w = cache[offset].get_or_insert_with(|| {
            let nodes: Vec<f64> = (0..width).map(|k| k as f64).collect();
            fornberg_weights(offset as f64, &nodes, order).swap_remove(order)
        });
        // weights of a derivative sum to zero; differencing against one
        // sample makes constants exact
        let base = if order == 0 { 0.0 } else { values[i] };
        let d: f64 = w.iter().zip(&values[start..start + width]).map(|(a, b)| a * (b - base)).sum();
        out.push(d / spacing.powi(order as i32));
    }
    Ok(out)
}
